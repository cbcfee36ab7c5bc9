#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rieszlab/constants.hpp"
#include "rieszlab/kernels.hpp"

using namespace riesz;

namespace {
doctest::Approx near(double x) { return doctest::Approx(x).epsilon(1e-12); }
}  // namespace

TEST_CASE("gamma closed forms hit hand-computed values") {
  // d = 2, sigma = 0: 2 pi log r at r = 1/e.
  CHECK(gamma_r_sigma(2, 0.0, std::exp(-1.0)) == near(-2.0 * kPi));
  // d = 1, sigma = 1/2: 2 (1 - r^-sigma) / sigma at r = 1/4 gives -4.
  CHECK(gamma_r_sigma(1, 0.5, 0.25) == near(-4.0));
  // r = 1 leaves nothing to integrate.
  CHECK(gamma_r_sigma(3, 0.75, 1.0) == near(0.0));
  // d = 3, R = e^2: 4 pi log(R^3) / ... = d omega_d log R = 8 pi.
  CHECK(gamma_R_zero(3, std::exp(2.0)) == near(8.0 * kPi));
  CHECK(gamma_R_zero(2, 1.0) == near(0.0));
  CHECK(gamma_sigma_tail(2, 0.5) == near(4.0 * kPi));
  CHECK(gamma_sigma_tail(1, 0.25) == near(8.0));
}

TEST_CASE("gamma_r is continuous through sigma -> 0") {
  for (int d = 1; d <= 3; ++d) {
    const double at_zero = gamma_r_sigma(d, 0.0, 0.1);
    const double nearby = gamma_r_sigma(d, 1e-6, 0.1);
    CHECK(std::abs(nearby - at_zero) <= 1e-3 * std::abs(at_zero));
  }
}

TEST_CASE("gamma domains are enforced") {
  CHECK_THROWS_AS(gamma_r_sigma(2, -0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(gamma_r_sigma(2, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(gamma_r_sigma(2, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_r_sigma(2, 0.5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(gamma_R_zero(2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(gamma_sigma_tail(2, 0.0), std::invalid_argument);
}

TEST_CASE("integrable kernel: hard core then an immediate attractive tail") {
  const KernelSpec k{Params(2, -1.0, 0.1)};
  CHECK_FALSE(k.potential(0.19).has_value());
  CHECK(k.potential(0.2001).value() == near(-std::pow(0.2001, -1.0)));
  CHECK(k.potential(0.5).value() == near(-2.0));
  CHECK(k.tail(0.5) == near(2.0));
}

TEST_CASE("regularized kernel: hard core, zero plateau, then the tail") {
  const KernelSpec k{Params(2, 0.5, 0.01, 0.25)};
  CHECK_FALSE(k.potential(0.015).has_value());
  CHECK(k.potential(0.1).value() == 0.0);
  CHECK(k.potential(0.2499).value() == 0.0);
  CHECK(k.potential(0.3).value() == near(-std::pow(0.3, -2.5)));
  CHECK(k.potential(2.0).value() == near(-std::pow(2.0, -2.5)));
}

TEST_CASE("confinement defaults its growth to the kernel decay") {
  const ConfinementSpec g = ConfinementSpec::for_sigma(-1.0, -1.8, 12.0);
  CHECK(g.power == near(1.0));
  CHECK(g({0.25, 0.0, 0.0}) == near(-1.8 + 12.0 * 0.25));
  CHECK(g({0.3, 0.4, 0.0}) == near(-1.8 + 12.0 * 0.5));

  const ConfinementSpec q{0.0, 2.0, 2.0};
  CHECK(q({0.3, 0.4, 0.0}) == near(2.0 * 0.25));
}

TEST_CASE("mesoscale schedule defaults and domain") {
  const MesoscaleSchedule mid = mesoscale_schedule(0.5);
  CHECK(mid.exponent == near(0.25));
  CHECK(mid(0.01) == near(std::pow(0.01, 0.25)));
  const MesoscaleSchedule log_case = mesoscale_schedule(0.0);
  CHECK(log_case.exponent == near(0.5));
  CHECK(mesoscale_schedule(0.5, 0.4).exponent == near(0.4));
  CHECK_FALSE(mid.describe().empty());
  CHECK_THROWS_AS(mid(1.5), std::invalid_argument);
  CHECK_THROWS_AS(mid(0.0), std::invalid_argument);
}

TEST_CASE("default schedules are admissible: the ratio shrinks with eps") {
  for (double sigma : {0.0, 0.25, 0.5, 0.75}) {
    const MesoscaleSchedule sched = mesoscale_schedule(sigma);
    double prev = admissibility_ratio(sigma, 1e-2, sched(1e-2));
    for (double eps : {1e-3, 1e-4, 1e-5}) {
      const double cur = admissibility_ratio(sigma, eps, sched(eps));
      CHECK(cur < prev);
      prev = cur;
    }
  }
}
