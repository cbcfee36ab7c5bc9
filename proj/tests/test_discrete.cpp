#include <cmath>
#include <vector>

#include "doctest.h"
#include "rieszlab/config.hpp"
#include "rieszlab/discrete_energy.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/kernels.hpp"

using namespace riesz;

namespace {

Configuration jittered_grid(int d, double epsilon, double spacing, int per_axis) {
  std::vector<Vec> pts;
  for (int z = 0; z < (d > 2 ? per_axis : 1); ++z)
    for (int y = 0; y < (d > 1 ? per_axis : 1); ++y)
      for (int x = 0; x < per_axis; ++x) {
        // A deterministic sub-contact jitter so no distance is special.
        const double wob = 0.1 * spacing;
        Vec p{x * spacing + wob * std::sin(3.7 * x + 1.3 * y + 0.4 * z),
              d > 1 ? y * spacing + wob * std::cos(2.9 * y + 0.7 * x) : 0.0,
              d > 2 ? z * spacing + wob * std::sin(1.9 * z + 0.2 * x) : 0.0};
        pts.push_back(p);
      }
  return validate_configuration(std::move(pts), d, epsilon);
}

double naive_pair(const Params& params, const Configuration& config) {
  const KernelSpec kernel(params);
  const double w = params.mass_weight();
  double sum = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i)
    for (std::size_t j = 0; j < config.size(); ++j) {
      if (i == j) continue;
      sum += *kernel.potential(dist(config.points[i], config.points[j])) * w * w;
    }
  return sum;
}

}  // namespace

TEST_CASE("pair energies match a naive ordered double loop") {
  const Configuration flat = jittered_grid(2, 0.05, 0.16, 6);
  const Params integrable(2, -1.0, 0.05);
  CHECK(pair_energy(integrable, flat).value() ==
        doctest::Approx(naive_pair(integrable, flat)).epsilon(1e-12));

  const Params regularized(2, 0.5, 0.05, 0.4);
  CHECK(pair_energy(regularized, flat).value() ==
        doctest::Approx(naive_pair(regularized, flat)).epsilon(1e-12));

  const Configuration solid = jittered_grid(3, 0.05, 0.15, 4);
  const Params deep(3, -1.5, 0.05);
  CHECK(pair_energy(deep, solid).value() ==
        doctest::Approx(naive_pair(deep, solid)).epsilon(1e-12));
}

TEST_CASE("degenerate configurations have zero pair energy") {
  const Configuration empty = validate_configuration({}, 2, 0.05);
  const Configuration lone = validate_configuration({{0.3, 0.3, 0.0}}, 2, 0.05);
  const Params params(2, -1.0, 0.05);
  CHECK(pair_energy(params, empty).value() == 0.0);
  CHECK(pair_energy(params, lone).value() == 0.0);
  CHECK(energy(params, empty).total == 0.0);
}

TEST_CASE("barrier pairs flag the breakdown instead of blowing up") {
  // Constructed directly, bypassing validation, as a raw point list would.
  Configuration bad;
  bad.d = 2;
  bad.epsilon = 0.05;
  bad.points = {{0.0, 0.0, 0.0}, {0.05, 0.0, 0.0}};
  const Params params(2, -1.0, 0.05);
  CHECK_FALSE(pair_energy(params, bad).has_value());
  const EnergyBreakdown b = energy(params, bad);
  CHECK(b.forbidden);
  CHECK(b.pair == 0.0);
  CHECK(b.total == 0.0);
}

TEST_CASE("renormalized energy subtracts gamma times the scaled count") {
  const Configuration flat = jittered_grid(2, 0.05, 0.16, 5);
  const Params params(2, 0.25, 0.05, 0.3);
  const EnergyBreakdown plain = energy(params, flat);
  const EnergyBreakdown renorm = energy_renormalized(params, flat);
  const double shift = -gamma_r_sigma(2, 0.25, 0.3) * params.mass_weight() *
                       static_cast<double>(flat.size());
  CHECK(renorm.pair == doctest::Approx(plain.pair).epsilon(1e-15));
  CHECK(renorm.renormalization == doctest::Approx(shift).epsilon(1e-12));
  CHECK(renorm.total == doctest::Approx(plain.pair + shift).epsilon(1e-12));

  CHECK_THROWS_AS(energy_renormalized(Params(2, -1.0, 0.05), flat), RegimeMismatch);
}

TEST_CASE("confined energy adds the scaled potential of every particle") {
  const Configuration flat = jittered_grid(2, 0.05, 0.16, 5);
  const Params params(2, -1.0, 0.05);
  const ConfinementSpec g = ConfinementSpec::for_sigma(-1.0, -1.8, 12.0);
  const EnergyBreakdown b = energy_confined(params, flat, g);
  double manual = 0.0;
  for (const Vec& p : flat.points) manual += g(p) * params.mass_weight();
  CHECK(b.confinement == doctest::Approx(manual).epsilon(1e-12));
  CHECK(b.total == doctest::Approx(b.pair + b.confinement).epsilon(1e-12));
  CHECK(b.pair == doctest::Approx(energy(params, flat).pair).epsilon(1e-15));
}
