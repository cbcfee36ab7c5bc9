#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rieszlab/constants.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/lattice.hpp"

using namespace riesz;

namespace {

doctest::Approx near(double x) { return doctest::Approx(x).epsilon(1e-12); }

double min_pair_dist(const std::vector<Vec>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, dist(pts[i], pts[j]));
  return best;
}

}  // namespace

TEST_CASE("optimal lattices realize the optimal packing densities") {
  for (int d = 1; d <= 3; ++d) {
    const LatticeSpec spec = optimal_lattice(d, 2.0);
    CHECK(spec.dim() == d);
    // Unit spheres at spacing 2 tile space at exactly the optimal density.
    CHECK(spec.point_density() == near(packing_density(d) / unit_ball_volume(d)));
  }
  // Halving the spacing multiplies the point density by 2^d.
  CHECK(optimal_lattice(2, 1.0).point_density() == near(4.0 * optimal_lattice(2, 2.0).point_density()));
  CHECK_THROWS_AS(optimal_lattice(4, 2.0), std::invalid_argument);
}

TEST_CASE("lattice points in a 1d box are the even integers") {
  const Region box = Region::make_box({{0.0, 0.0, 0.0}, {10.0, 0.0, 0.0}});
  const auto pts = lattice_points_in(optimal_lattice(1, 2.0), box);
  REQUIRE(pts.size() == 5);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i][0] == near(2.0 * static_cast<double>(i)));
}

TEST_CASE("hexagonal points respect the box, the spacing and lex order") {
  const Region box = Region::make_box({{0.0, 0.0, 0.0}, {4.0, 4.0, 0.0}});
  const auto pts = lattice_points_in(optimal_lattice(2, 2.0), box);
  CHECK(pts.size() == 6);  // rows at y = 0, sqrt(3), 2 sqrt(3); two points each
  CHECK(min_pair_dist(pts) >= 2.0 - 1e-9);
  for (const Vec& p : pts) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] < 4.0);
    CHECK(p[1] >= 0.0);
    CHECK(p[1] < 4.0);
  }
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(LexLess{}(pts[i - 1], pts[i]));
}

TEST_CASE("lattice neighbor shells have the right sizes") {
  // Hexagonal: six neighbors at distance 2 around the origin.
  const auto hex = lattice_points_in(optimal_lattice(2, 2.0),
                                     Region::make_ball({0.0, 0.0, 0.0}, 2.1));
  CHECK(hex.size() == 7);
  // Close packing in 3d: twelve neighbors.
  const auto fcc = lattice_points_in(optimal_lattice(3, 2.0),
                                     Region::make_ball({0.0, 0.0, 0.0}, 2.1));
  CHECK(fcc.size() == 13);
}

TEST_CASE("box packings beat the optimal density and are reproducible") {
  const BoxDensityResult a = estimate_box_density(2, 6.0, 300, 7);
  CHECK(a.count >= 12);
  CHECK(a.count == a.config.size());
  CHECK(a.density == near(static_cast<double>(a.count) * unit_ball_volume(2) / 36.0));
  CHECK(a.density >= packing_density(2) - 1e-12);
  CHECK(min_pair_dist(a.config.points) >= 2.0 * (1.0 - 1e-9));
  for (const Vec& p : a.config.points) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] < 6.0);
    CHECK(p[1] >= 0.0);
    CHECK(p[1] < 6.0);
  }

  const BoxDensityResult b = estimate_box_density(2, 6.0, 300, 7);
  REQUIRE(b.count == a.count);
  for (std::size_t i = 0; i < a.count; ++i)
    for (int k = 0; k < 2; ++k) CHECK(a.config.points[i][k] == b.config.points[i][k]);

  const BoxDensityResult line = estimate_box_density(1, 10.5, 0, 1);
  CHECK(line.count >= 6);
  CHECK(line.density >= packing_density(1) - 1e-12);

  CHECK_THROWS_AS(estimate_box_density(2, 1.5, 100, 1), std::invalid_argument);
}

TEST_CASE("recovery configurations carry the mass of the density") {
  // Unit square at level 1: scaled point masses add back up to the area,
  // short of a boundary strip of order the lattice spacing.
  const double h = 1.0 / 16.0;
  std::vector<Cell> cells;
  for (std::int64_t y = 0; y < 16; ++y)
    for (std::int64_t x = 0; x < 16; ++x) cells.push_back({x, y, 0});
  const PixelSet square = make_pixel_set(cells, 2, h);
  const DensityField ind = indicator_field(square);

  const double eps = 0.02;
  const Configuration fine = recovery_configuration(ind, eps);
  const double mass = total_mass(fine);
  CHECK(mass > 0.85);
  CHECK(mass < 1.02);
  for (const Vec& p : fine.points) CHECK(square.contains_point(p));

  // A quarter level quadruples the spacing budget per point and recovers
  // a quarter of the mass.
  ScalarField quarter = ind;
  for (double& v : quarter.values) v *= 0.25;
  const Configuration sparse = recovery_configuration(validate_density_field(quarter), eps);
  CHECK(std::abs(total_mass(sparse) - 0.25) < 0.05);

  ScalarField zero = ind;
  zero.values.assign(zero.values.size(), 0.0);
  CHECK_THROWS_AS(recovery_configuration(validate_density_field(zero), eps), EmptySubject);
}
