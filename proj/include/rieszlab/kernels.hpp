#pragma once

#include <optional>
#include <string>

#include "rieszlab/config.hpp"

namespace riesz {

// Attractive pair interaction with a hard core at 2*eps. In the integrable
// regime (sigma < 0) the tail -r^-(d+sigma) starts right at contact; in the
// regularized regime it is cut off below the mesoscale radius r_eps, leaving
// a zero plateau on [2*eps, r_eps).
struct KernelSpec {
  Params params;

  explicit KernelSpec(Params p) : params(std::move(p)) {}

  // nullopt encodes the forbidden (hard-core) outcome; never an infinity.
  std::optional<double> potential(double r) const;

  // |z|^-(d+sigma), the magnitude of the attractive tail.
  double tail(double r) const;
};

// Radial confinement g(x) = c1 + c2 * |x|^power. The default power is -sigma,
// which makes g grow exactly fast enough to balance the attractive tail.
struct ConfinementSpec {
  double c1 = 0.0;
  double c2 = 1.0;
  double power = 1.0;

  static ConfinementSpec for_sigma(double sigma, double c1, double c2) {
    return {c1, c2, -sigma};
  }
  double operator()(const Vec& x) const;
};

// gamma_r^sigma = -integral of |z|^-(d+sigma) over B_1 \ B_r. Closed form
// d*omega_d*(1 - r^-sigma)/sigma, with the sigma -> 0 limit d*omega_d*log(r)
// taken exactly at sigma = 0 (the expm1 form is stable for small sigma).
double gamma_r_sigma(int d, double sigma, double r);

// gamma_R^0 = integral of |z|^-d over B_R \ B_1 = d*omega_d*log(R), R >= 1.
double gamma_R_zero(int d, double R);

// gamma^sigma = integral of |z|^-(d+sigma) over the complement of B_1,
// finite for sigma > 0: d*omega_d/sigma.
double gamma_sigma_tail(int d, double sigma);

// Mesoscale radius as a function of eps: r_eps = eps^exponent. The default
// exponent sits at the geometric mean of the admissible range.
struct MesoscaleSchedule {
  double sigma;
  double exponent;

  double operator()(double eps) const;
  std::string describe() const;
};

MesoscaleSchedule mesoscale_schedule(double sigma, std::optional<double> exponent = std::nullopt);

// Vanishing of this ratio along eps -> 0 is what makes a schedule admissible:
// eps^(1/(2*sigma+1))/r_eps for sigma > 0, eps*log(r_eps)^2/r_eps at sigma = 0.
double admissibility_ratio(double sigma, double eps, double r_eps);

}  // namespace riesz
