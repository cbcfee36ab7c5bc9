#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rieszlab/constants.hpp"
#include "rieszlab/continuum_energy.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/kernels.hpp"

using namespace riesz;

namespace {

PixelSet interval(double length, double h) {
  std::vector<Cell> cells;
  const auto n = static_cast<std::int64_t>(std::llround(length / h));
  for (std::int64_t x = 0; x < n; ++x) cells.push_back({x, 0, 0});
  return make_pixel_set(cells, 1, h);
}

PixelSet square(std::int64_t n, double h) {
  std::vector<Cell> cells;
  for (std::int64_t y = 0; y < n; ++y)
    for (std::int64_t x = 0; x < n; ++x) cells.push_back({x, y, 0});
  return make_pixel_set(cells, 2, h);
}

}  // namespace

TEST_CASE("interval self-energy matches the exact integral") {
  // -int_0^1 int_0^1 |x-y|^-1/2 = -8/3.
  const DensityField rho = indicator_field(interval(1.0, 1.0 / 64.0));
  const double value = riesz_energy(1, -0.5, rho);
  CHECK(std::abs(value - (-8.0 / 3.0)) < 1e-4);
}

TEST_CASE("truncated interval energy matches the exact integral") {
  // -2 int_r^1 (1-t)/t dt at r = 1/2 is -2 (ln 2 - 1/2).
  const PixelSet set = interval(1.0, 1.0 / 128.0);
  const double value = j_truncated(1, 0.0, set, 0.5);
  CHECK(std::abs(value - (-2.0 * (std::log(2.0) - 0.5))) < 5e-4);
}

TEST_CASE("renormalized truncation subtracts gamma_r times the measure") {
  const PixelSet set = interval(0.75, 1.0 / 64.0);
  const double r = 0.25;
  const double direct = j_truncated(1, 0.25, set, r);
  CHECK(j_renormalized(1, 0.25, set, r) ==
        doctest::Approx(direct - gamma_r_sigma(1, 0.25, r) * set.measure()).epsilon(1e-12));
}

TEST_CASE("interval fractional perimeter matches the closed form") {
  // P^sigma([0,L]) = 2 L^(1-sigma) / (sigma (1 - sigma)).
  const double sigma = 0.5;
  const double value = fractional_perimeter(1, sigma, interval(1.0, 1.0 / 128.0));
  CHECK(value == doctest::Approx(8.0).epsilon(1e-6));
  const QuadValue report = fractional_perimeter_report(1, sigma, interval(1.0, 1.0 / 128.0));
  CHECK(report.value == doctest::Approx(value).epsilon(1e-12));
  CHECK(report.error >= 0.0);
  CHECK(std::abs(report.value - 8.0) <= 10.0 * report.error + 1e-9);
}

TEST_CASE("fractional perimeter scales exactly with the set") {
  // Doubling the set and the pitch together is the same quadrature in
  // different units, so the values must sit in the ratio 2^(d - sigma).
  const double sigma = 0.5;
  const double small = fractional_perimeter(2, sigma, square(16, 1.0 / 64.0));
  const double big = fractional_perimeter(2, sigma, square(16, 1.0 / 32.0));
  CHECK(big == doctest::Approx(std::pow(2.0, 2.0 - sigma) * small).epsilon(1e-10));
}

TEST_CASE("window-renormalized perimeter of an interval hits 2L(1 - ln L)") {
  const double h = 1.0 / 128.0;
  CHECK(p0_perimeter(1, interval(1.0, h), {1.5, 2.0, 3.0}) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(p0_perimeter(1, interval(0.5, h), {1.0, 1.5, 2.0}) ==
        doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-3));
}

TEST_CASE("window values plateau past the diameter, and only there") {
  const PixelSet sq = square(16, 1.0 / 32.0);  // side 1/2, diameter 0.707
  const std::vector<double> radii = {0.9, 1.2, 1.5};
  const std::vector<double> profile = p0_profile(2, sq, radii);
  REQUIRE(profile.size() == 3);
  const double spread = *std::max_element(profile.begin(), profile.end()) -
                        *std::min_element(profile.begin(), profile.end());
  CHECK(spread < 1e-3);
  const QuadValue report = p0_perimeter_report(2, sq, radii);
  CHECK(report.value >= *std::min_element(profile.begin(), profile.end()) - 1e-12);
  CHECK(report.value <= *std::max_element(profile.begin(), profile.end()) + 1e-12);

  CHECK_THROWS_AS(p0_perimeter(2, sq, {0.3, 0.5}), NoPlateau);
  CHECK_THROWS_AS(p0_perimeter(2, sq, {1.2, 0.9}), std::invalid_argument);
}

TEST_CASE("renormalized truncations approach the perimeter limit") {
  // j_renormalized(E, r) -> P^sigma(E) - gamma^sigma |E| as r -> 0.
  const double sigma = 0.5;
  const PixelSet sq = square(32, 1.0 / 64.0);
  const double target =
      fractional_perimeter(2, sigma, sq) - gamma_sigma_tail(2, sigma) * sq.measure();
  double first = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double gap = prev;
  for (double r : {0.2, 0.1, 0.05}) {
    gap = std::abs(j_renormalized(2, sigma, sq, r) - target);
    CHECK(gap < prev);
    prev = gap;
    if (first == 0.0) first = gap;
  }
  // The defect closes like sqrt(r), so quartering r should halve it.
  CHECK(gap < 0.62 * first);
  CHECK(gap < 0.35 * std::abs(target));
}

TEST_CASE("first variation balances confinement against the interaction") {
  const DensityField rho = indicator_field(interval(1.0, 1.0 / 16.0));

  // Pure attraction: every cell at the upper bound wants to stay.
  const ScalarField pull = first_variation_residual(1, -0.5, rho, {0.0, 0.0, 1.0});
  REQUIRE(pull.values.size() == rho.values.size());
  CHECK(pull.origin == rho.origin);
  for (double v : pull.values) CHECK(v < 0.0);
  CHECK(kkt_violation(rho, pull) == 0.0);

  // A flat confinement larger than the interaction flips every sign and
  // makes the saturated density maximally non-stationary.
  const ScalarField push = first_variation_residual(1, -0.5, rho, {10.0, 0.0, 1.0});
  for (std::size_t i = 0; i < push.values.size(); ++i)
    CHECK(push.values[i] == doctest::Approx(pull.values[i] + 10.0).epsilon(1e-12));
  CHECK(kkt_violation(rho, push) > 0.0);
}

TEST_CASE("confined energy is the pair term plus the potential integral") {
  const DensityField rho = indicator_field(square(8, 1.0 / 16.0));
  const ConfinementSpec g{-1.0, 3.0, 1.0};
  double potential = 0.0;
  for (std::size_t i = 0; i < rho.values.size(); ++i)
    potential += g(cell_center(rho.cell_at(i), rho.h, rho.dim)) * rho.values[i];
  potential *= rho.h * rho.h;
  CHECK(riesz_energy_confined(2, -1.0, rho, g) ==
        doctest::Approx(riesz_energy(2, -1.0, rho) + potential).epsilon(1e-12));
}

TEST_CASE("continuum domains are enforced") {
  const PixelSet sq = square(8, 1.0 / 16.0);
  const DensityField rho = indicator_field(sq);
  CHECK_THROWS_AS(riesz_energy(2, 0.5, rho), NonIntegrableSigma);
  CHECK_THROWS_AS(riesz_energy(2, -2.0, rho), NonIntegrableSigma);
  CHECK_THROWS_AS(j_truncated(2, -0.5, sq, 0.25), SigmaOutOfRange);
  CHECK_THROWS_AS(j_truncated(2, 0.5, sq, 0.1), ResolutionTooCoarse);
  CHECK_THROWS_AS(fractional_perimeter(2, 0.0, sq), SigmaOutOfRange);
  CHECK_THROWS_AS(first_variation_residual(2, 0.5, rho, {0.0, 1.0, 1.0}), NonIntegrableSigma);
}
