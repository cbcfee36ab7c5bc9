#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rieszlab/config.hpp"
#include "rieszlab/constants.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/grid.hpp"

using namespace riesz;

namespace {
doctest::Approx near(double x) { return doctest::Approx(x).epsilon(1e-12); }
}  // namespace

TEST_CASE("unit ball volumes and optimal packing densities") {
  CHECK(unit_ball_volume(1) == near(2.0));
  CHECK(unit_ball_volume(2) == near(kPi));
  CHECK(unit_ball_volume(3) == near(4.0 * kPi / 3.0));
  CHECK(packing_density(1) == near(1.0));
  CHECK(packing_density(2) == near(kPi / (2.0 * std::sqrt(3.0))));
  CHECK(packing_density(3) == near(kPi / (3.0 * std::sqrt(2.0))));
  CHECK_THROWS_AS(unit_ball_volume(4), std::invalid_argument);
  CHECK_THROWS_AS(packing_density(0), std::invalid_argument);
}

TEST_CASE("sphere mass weight is eps^d omega_d over the packing density") {
  CHECK(sphere_mass_weight(1, 0.25) == near(0.5));
  CHECK(sphere_mass_weight(2, 0.1) == near(0.02 * std::sqrt(3.0)));
  CHECK(sphere_mass_weight(3, 0.1) == near(4.0 * std::sqrt(2.0) * 1e-3));
}

TEST_CASE("params validate regime and ranges") {
  const Params integrable(2, -1.0, 0.1);
  CHECK(integrable.regime() == Regime::integrable);
  CHECK(integrable.mass_weight() == near(sphere_mass_weight(2, 0.1)));
  CHECK_FALSE(integrable.r_eps.has_value());

  const Params regularized(2, 0.5, 0.01, 0.25);
  CHECK(regularized.regime() == Regime::regularized);
  CHECK(regularized.r_eps.value() == near(0.25));

  CHECK_THROWS_AS(Params(2, -1.0, 0.1, 0.5), std::invalid_argument);   // no r_eps when integrable
  CHECK_THROWS_AS(Params(2, 0.5, 0.01), std::invalid_argument);        // r_eps required otherwise
  CHECK_THROWS_AS(Params(2, 0.5, 0.01, 0.015), std::invalid_argument); // r_eps must exceed 2 eps
  CHECK_THROWS_AS(Params(2, 0.5, 0.01, 1.5), std::invalid_argument);   // ... and stay below 1
  CHECK_THROWS_AS(Params(1, -1.0, 0.1), std::invalid_argument);        // sigma must exceed -d
  CHECK_THROWS_AS(Params(2, 1.0, 0.01, 0.25), std::invalid_argument);  // sigma must stay below 1
  CHECK_THROWS_AS(Params(4, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(Params(2, -1.0, 1.5), std::invalid_argument);
}

TEST_CASE("configurations enforce the hard core and zero padded axes") {
  std::vector<Vec> pts = {{0.0, 0.0, 7.0}, {0.5, 0.0, -3.0}};
  const Configuration ok = validate_configuration(pts, 2, 0.1);
  CHECK(ok.size() == 2);
  CHECK(ok.points[0][2] == 0.0);
  CHECK(ok.points[1][2] == 0.0);
  CHECK(total_mass(ok) == near(2.0 * sphere_mass_weight(2, 0.1)));

  const ScaledEmpiricalMeasure mu{ok};
  CHECK(mu.weight() == near(sphere_mass_weight(2, 0.1)));
  CHECK(mu.mass() == near(total_mass(ok)));

  // Exact contact is allowed; anything measurably closer is not.
  CHECK_NOTHROW(validate_configuration({{0.0, 0.0, 0.0}, {0.2, 0.0, 0.0}}, 2, 0.1));
  CHECK_THROWS_AS(validate_configuration({{0.0, 0.0, 0.0}, {0.19, 0.0, 0.0}}, 2, 0.1),
                  HardSphereViolation);
  CHECK_THROWS_AS(validate_configuration({{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}, 1, 0.1),
                  HardSphereViolation);
}

TEST_CASE("grid cells, centers and field windows agree") {
  CHECK(cell_of({-0.05, 0.25, 0.0}, 0.1) == Cell{-1, 2, 0});
  const Vec c = cell_center({-1, 2, 0}, 0.1, 2);
  CHECK(c[0] == near(-0.05));
  CHECK(c[1] == near(0.25));
  CHECK(c[2] == 0.0);

  ScalarField f;
  f.dim = 2;
  f.h = 0.5;
  f.origin = {-1, 0, 0};
  f.shape = {2, 2, 1};
  f.values = {1.0, 2.0, 3.0, 4.0};
  CHECK(f.size() == 4);
  CHECK(f.at({-1, 0, 0}) == 1.0);
  CHECK(f.at({0, 1, 0}) == 4.0);
  CHECK(f.at({5, 5, 0}) == 0.0);
  CHECK(f.integral() == near(10.0 * 0.25));
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.index(f.cell_at(i)) == i);
}

TEST_CASE("pixel sets normalize, measure and compare") {
  PixelSet s = make_pixel_set({{1, 0, 0}, {0, 0, 0}, {1, 0, 0}}, 2, 0.5);
  CHECK(s.cells.size() == 2);
  CHECK(s.measure() == near(0.5));
  CHECK(s.contains({0, 0, 0}));
  CHECK_FALSE(s.contains({2, 0, 0}));
  CHECK(s.contains_point({0.7, 0.2, 0.0}));
  CHECK_FALSE(s.contains_point({0.7, 0.7, 0.0}));

  // Same square sampled at two resolutions: zero symmetric difference.
  PixelSet fine = make_pixel_set({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, 2, 0.25);
  PixelSet coarse = make_pixel_set({{0, 0, 0}}, 2, 0.5);
  CHECK(symmetric_difference_measure(fine, coarse) == near(0.0));
  PixelSet shifted = make_pixel_set({{1, 0, 0}}, 2, 0.5);
  CHECK(symmetric_difference_measure(coarse, shifted) == near(0.5));
}

TEST_CASE("rasterize fills a disk to pixel accuracy") {
  const double h = 1.0 / 32.0;
  const double radius = 0.25;
  const Box bounds{{-0.3, -0.3, 0.0}, {0.3, 0.3, 0.0}};
  const PixelSet disk =
      rasterize([&](const Vec& p) { return norm(p) <= radius; }, bounds, 2, h);
  const double area = kPi * radius * radius;
  CHECK(std::abs(disk.measure() - area) < 2.0 * kPi * radius * h);
}

TEST_CASE("indicator fields round-trip through support and level detection") {
  const PixelSet set = make_pixel_set({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, 2, 0.25);
  const DensityField ind = indicator_field(set);
  CHECK(ind.integral() == near(set.measure()));
  const PixelSet back = support_of(ind);
  CHECK(symmetric_difference_measure(set, back) == near(0.0));

  const SingleLevel lvl = single_level_of(ind);
  CHECK(lvl.level == near(1.0));
  CHECK(symmetric_difference_measure(lvl.support, set) == near(0.0));

  ScalarField mixed = ind;
  mixed.values[0] = 0.5;
  CHECK_THROWS_AS(single_level_of(validate_density_field(mixed)), std::invalid_argument);

  ScalarField bad = ind;
  bad.values[0] = 1.5;
  CHECK_THROWS_AS(validate_density_field(bad), std::invalid_argument);

  ScalarField empty = ind;
  empty.values.assign(empty.values.size(), 0.0);
  CHECK_THROWS_AS(single_level_of(validate_density_field(empty)), LevelOutOfRange);
}
