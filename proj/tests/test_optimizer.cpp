#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rieszlab/config.hpp"
#include "rieszlab/constants.hpp"
#include "rieszlab/continuum_energy.hpp"
#include "rieszlab/discrete_energy.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/lattice.hpp"
#include "rieszlab/optimizer.hpp"

using namespace riesz;

namespace {

Configuration small_grid() {
  std::vector<Vec> pts;
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) pts.push_back({0.1 + 0.15 * x, 0.1 + 0.15 * y, 0.0});
  return validate_configuration(std::move(pts), 2, 0.05);
}

const Box kDomain{{0.0, 0.0, 0.0}, {0.6, 0.6, 0.0}};

AnnealSchedule quick_schedule() {
  AnnealSchedule s;
  s.epochs = 15;
  s.cooling = 0.9;
  s.moves_per_epoch = 150;
  s.step = 0.02;
  s.teleport_fraction = 0.1;
  return s;
}

}  // namespace

TEST_CASE("annealing is deterministic, feasible and never worsens the start") {
  const Configuration init = small_grid();
  const Params params(2, -1.0, 0.05);
  const ConfinementSpec g = ConfinementSpec::for_sigma(-1.0, -1.8, 12.0);
  const AnnealSchedule schedule = quick_schedule();

  const AnnealResult a = anneal_discrete(params, Objective::confined, &g, init, kDomain, schedule, 3);
  const AnnealResult b = anneal_discrete(params, Objective::confined, &g, init, kDomain, schedule, 3);

  CHECK(a.energy == b.energy);
  REQUIRE(a.config.size() == b.config.size());
  for (std::size_t i = 0; i < a.config.size(); ++i)
    for (int k = 0; k < 2; ++k) CHECK(a.config.points[i][k] == b.config.points[i][k]);

  CHECK(a.energy <= energy_confined(params, init, g).total + 1e-9);
  CHECK_NOTHROW(validate_configuration(a.config.points, 2, 0.05));
  for (const Vec& p : a.config.points) CHECK(kDomain.contains(p, 2));

  REQUIRE(a.trace.size() == 15);
  for (std::size_t e = 1; e < a.trace.size(); ++e) {
    CHECK(a.trace[e].temperature == doctest::Approx(0.9 * a.trace[e - 1].temperature).epsilon(1e-12));
    CHECK(a.trace[e].best_energy <= a.trace[e - 1].best_energy + 1e-12);
    CHECK(a.trace[e].accept_rate >= 0.0);
    CHECK(a.trace[e].accept_rate <= 1.0);
  }

  const AnnealResult c = anneal_discrete(params, Objective::confined, &g, init, kDomain, schedule, 4);
  CHECK(c.energy != a.energy);  // a different seed explores differently
}

TEST_CASE("annealing rejects inconsistent setups") {
  const Configuration init = small_grid();
  const Params params(2, -1.0, 0.05);
  const ConfinementSpec g = ConfinementSpec::for_sigma(-1.0, -1.8, 12.0);
  AnnealSchedule schedule = quick_schedule();

  CHECK_THROWS_AS(anneal_discrete(params, Objective::confined, nullptr, init, kDomain, schedule, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(anneal_discrete(params, Objective::renormalized, &g, init, kDomain, schedule, 1),
                  RegimeMismatch);
  CHECK_THROWS_AS(anneal_discrete(Params(2, -1.0, 0.1), Objective::pair, &g, init, kDomain,
                                  schedule, 1),
                  std::invalid_argument);  // particle scale mismatch

  const Box tight{{0.0, 0.0, 0.0}, {0.3, 0.3, 0.0}};
  CHECK_THROWS_AS(anneal_discrete(params, Objective::pair, &g, init, tight, schedule, 1),
                  InfeasibleInit);

  Configuration overlapping;
  overlapping.d = 2;
  overlapping.epsilon = 0.05;
  overlapping.points = {{0.1, 0.1, 0.0}, {0.15, 0.1, 0.0}};
  CHECK_THROWS_AS(anneal_discrete(params, Objective::pair, &g, overlapping, kDomain, schedule, 1),
                  InfeasibleInit);

  schedule.cooling = 1.5;
  CHECK_THROWS_AS(anneal_discrete(params, Objective::pair, &g, init, kDomain, schedule, 1),
                  std::invalid_argument);
}

TEST_CASE("descent reduces the objective monotonically and reports honestly") {
  DescentOptions opts;
  opts.domain = Box{{-1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  opts.h = 1.0 / 16.0;
  opts.max_steps = 60;
  opts.tol_factor = 0.5;
  const ConfinementSpec g = ConfinementSpec::for_sigma(-0.5, -1.5, 6.0);
  const DescentResult res = minimize_density(1, -0.5, g, opts);

  for (double v : res.rho.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  REQUIRE_FALSE(res.trace.empty());
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] <= res.trace[i - 1] + 1e-12);
  CHECK(res.objective == doctest::Approx(res.trace.back()).epsilon(1e-12));
  CHECK(res.objective == doctest::Approx(riesz_energy_confined(1, -0.5, res.rho, g)).epsilon(1e-9));
  CHECK(res.steps <= 60);
  CHECK(static_cast<std::size_t>(res.steps) + 1 == res.trace.size());

  const ScalarField residual = first_variation_residual(1, -0.5, res.rho, g);
  CHECK(res.kkt == doctest::Approx(kkt_violation(res.rho, residual)).epsilon(1e-12));
}

TEST_CASE("shape diagnostics recognize a ball and flag degenerate inputs") {
  const double h = 1.0 / 128.0;
  const double radius = 0.3;
  const Vec center{0.007, -0.013, 0.0};
  const Box bounds{{-0.5, -0.5, 0.0}, {0.5, 0.5, 0.0}};
  const PixelSet disk =
      rasterize([&](const Vec& p) { return dist(p, center) <= radius; }, bounds, 2, h);
  // Window wider than the support, so the boundary guard stays quiet.
  ScalarField wide;
  wide.dim = 2;
  wide.h = h;
  wide.origin = {-64, -64, 0};
  wide.shape = {128, 128, 1};
  wide.values.assign(wide.size(), 0.0);
  for (const Cell& c : disk.cells) wide.values[wide.index(c)] = 1.0;
  const ShapeDiagnostics diag = shape_diagnostics(validate_density_field(wide));
  CHECK(diag.mass == doctest::Approx(disk.measure()).epsilon(1e-12));
  CHECK(diag.support_measure == doctest::Approx(disk.measure()).epsilon(1e-12));
  CHECK(diag.bang_bang_index == 0.0);
  CHECK(diag.ball_deficit < 0.08);

  ScalarField empty;
  empty.dim = 2;
  empty.h = h;
  empty.shape = {4, 4, 1};
  empty.values.assign(16, 0.0);
  CHECK_THROWS_AS(shape_diagnostics(validate_density_field(empty)), EmptySubject);

  ScalarField cramped;
  cramped.dim = 2;
  cramped.h = h;
  cramped.shape = {3, 3, 1};
  cramped.values.assign(9, 1.0);
  CHECK_THROWS_AS(shape_diagnostics(validate_density_field(cramped)), SupportTouchesBoundary);
}

TEST_CASE("configuration diagnostics work on the smoothed measure") {
  const double eps = 0.01;
  const auto pts = lattice_points_in(optimal_lattice(2, 2.0 * eps),
                                     Region::make_ball({0.0, 0.0, 0.0}, 0.25));
  const Configuration config = validate_configuration(pts, 2, eps);
  const ShapeDiagnostics diag = shape_diagnostics(config);
  CHECK(std::abs(diag.mass - total_mass(config)) <= 0.02 * total_mass(config));
  CHECK(diag.ball_deficit < 0.2);

  CHECK_THROWS_AS(shape_diagnostics(Configuration{}), EmptySubject);
}
