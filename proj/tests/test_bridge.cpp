#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rieszlab/bridge.hpp"
#include "rieszlab/config.hpp"
#include "rieszlab/constants.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/lattice.hpp"

using namespace riesz;

namespace {
doctest::Approx near(double x) { return doctest::Approx(x).epsilon(1e-12); }
}  // namespace

TEST_CASE("mesoscale cube side is the geometric mean of the two scales") {
  CHECK(mesoscale_cell(0.01, 0.25) == near(0.05));
  CHECK(mesoscale_cell(0.02, 0.02) == near(0.02));
}

TEST_CASE("sparse cubes shrink concentrically to the mass they hold") {
  const double eps = 0.01;
  const double r_eps = 0.25;  // cube side 0.05
  const Configuration config = validate_configuration(
      {{0.005, 0.005, 0.0}, {0.04, 0.005, 0.0}, {0.005, 0.04, 0.0}, {0.04, 0.04, 0.0}}, 2, eps);
  const ScaledEmpiricalMeasure mu{config};
  const PixelSet set = measure_to_set(mu, r_eps);
  REQUIRE_FALSE(set.cells.empty());

  // Everything stays inside the single occupied mesoscale cube.
  const double rho = mesoscale_cell(eps, r_eps);
  const auto cube_cells = static_cast<std::int64_t>(std::llround(rho / set.h));
  std::int64_t lo_x = cube_cells, hi_x = -1, lo_y = cube_cells, hi_y = -1;
  for (const Cell& c : set.cells) {
    CHECK(c[0] >= 0);
    CHECK(c[0] < cube_cells);
    CHECK(c[1] >= 0);
    CHECK(c[1] < cube_cells);
    lo_x = std::min(lo_x, c[0]);
    hi_x = std::max(hi_x, c[0]);
    lo_y = std::min(lo_y, c[1]);
    hi_y = std::max(hi_y, c[1]);
  }
  // Concentric block: centered, same extent on both axes, even side, and at
  // most the corner trim away from a full square.
  CHECK(lo_x == lo_y);
  CHECK(hi_x == hi_y);
  CHECK(lo_x == cube_cells - 1 - hi_x);
  const auto side = hi_x - lo_x + 1;
  CHECK(side % 2 == 0);
  CHECK(static_cast<std::int64_t>(set.cells.size()) <= side * side);
  CHECK(static_cast<std::int64_t>(set.cells.size()) > (side - 2) * (side - 2));

  // The carved volume tracks the scaled mass to half a fine cell.
  const double cell_volume = set.h * set.h;
  CHECK(std::abs(set.measure() - mu.mass()) <= 0.5 * cell_volume * (1.0 + 1e-12));
}

TEST_CASE("full cubes are kept whole and the excess mass is dropped") {
  const double eps = 0.01;
  const double r_eps = 0.25;
  // A 3 x 3 contact grid carries more scaled mass than the cube can hold.
  std::vector<Vec> pts;
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) pts.push_back({0.005 + 0.02 * x, 0.005 + 0.02 * y, 0.0});
  const Configuration config = validate_configuration(std::move(pts), 2, eps);
  const ScaledEmpiricalMeasure mu{config};
  const double cube_volume = std::pow(mesoscale_cell(eps, r_eps), 2);
  REQUIRE(mu.mass() > cube_volume);

  const PixelSet set = measure_to_set(mu, r_eps);
  CHECK(set.measure() == near(cube_volume));
  CHECK(set.measure() < mu.mass());
}

TEST_CASE("masses add across occupied cubes") {
  const double eps = 0.01;
  const double r_eps = 0.25;
  std::vector<Vec> pts;
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) pts.push_back({0.0125 + 0.025 * x, 0.0125 + 0.025 * y, 0.0});
  const Configuration config = validate_configuration(std::move(pts), 2, eps);
  const ScaledEmpiricalMeasure mu{config};
  const PixelSet set = measure_to_set(mu, r_eps);
  CHECK(std::abs(set.measure() - mu.mass()) <= 0.05 * mu.mass());
}

TEST_CASE("the bridge needs a genuine scale separation") {
  const Configuration config = validate_configuration({{0.1, 0.1, 0.0}}, 2, 0.01);
  CHECK_THROWS_AS(measure_to_set(ScaledEmpiricalMeasure{config}, 0.015), RegimeMismatch);
}

TEST_CASE("set_to_measure fills the set at matching density") {
  std::vector<Cell> cells;
  for (std::int64_t y = 0; y < 12; ++y)
    for (std::int64_t x = 0; x < 12; ++x) cells.push_back({x, y, 0});
  const PixelSet square = make_pixel_set(cells, 2, 1.0 / 32.0);  // side 0.375

  const ScaledEmpiricalMeasure mu = set_to_measure(square, 0.005);
  CHECK(mu.config.epsilon == near(0.005));
  CHECK(std::abs(mu.mass() - square.measure()) <= 0.1 * square.measure());
  for (const Vec& p : mu.config.points) CHECK(square.contains_point(p));
}

TEST_CASE("smoothed measures carry the scaled mass at the packing level") {
  const Configuration config =
      validate_configuration({{0.0, 0.0, 0.0}, {0.5, 0.1, 0.0}, {0.2, 0.4, 0.0}}, 2, 0.05);
  const ScalarField smooth = smoothed_measure(config);
  CHECK(smooth.h == near(0.05 / 4.0));
  const double level = 1.0 / packing_density(2);
  double peak = 0.0;
  for (double v : smooth.values) {
    CHECK(v >= 0.0);
    CHECK(v <= level * (1.0 + 1e-9));
    peak = std::max(peak, v);
  }
  CHECK(peak == near(level));
  CHECK(std::abs(smooth.integral() - total_mass(config)) <= 0.02 * total_mass(config));
}

TEST_CASE("bridge reports tie their fields together") {
  std::vector<Vec> pts;
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x)
      pts.push_back({0.011 + 0.022 * x + 0.001 * y, 0.011 + 0.0205 * y, 0.0});
  const Configuration config = validate_configuration(std::move(pts), 2, 0.01);
  const Params params(2, 0.5, 0.01, 0.25);
  const BridgeReport rep = energy_bridge_report(params, config);

  CHECK(rep.epsilon == near(0.01));
  CHECK(rep.r_eps == near(0.25));
  CHECK(rep.mass_measure == near(total_mass(config)));
  CHECK(rep.mass_gap == near(std::abs(rep.mass_set - rep.mass_measure)));
  CHECK(rep.energy_gap == near(std::abs(rep.energy_set - rep.energy_measure)));

  const double gamma = gamma_r_sigma(2, 0.5, 0.25);
  CHECK(rep.renormalized_measure == near(rep.energy_measure - gamma * rep.mass_measure));
  CHECK(rep.renormalized_set == near(rep.energy_set - gamma * rep.mass_set));
  CHECK(rep.renormalized_gap == near(std::abs(rep.renormalized_set - rep.renormalized_measure)));

  // Envelopes scale with sqrt(eps / r_eps) times the scaled mass; both must
  // be strictly positive for the gap comparisons to mean anything.
  CHECK(rep.bound_mass > 0.0);
  CHECK(rep.bound_energy > 0.0);
  CHECK(rep.bound_mass < rep.mass_measure);

  Configuration bad;
  bad.d = 2;
  bad.epsilon = 0.01;
  bad.points = {{0.0, 0.0, 0.0}, {0.01, 0.0, 0.0}};
  CHECK_THROWS_AS(energy_bridge_report(params, bad), std::invalid_argument);
}
