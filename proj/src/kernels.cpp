#include "rieszlab/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace riesz {

std::optional<double> KernelSpec::potential(double r) const {
  const double contact = 2.0 * params.epsilon;
  if (r < contact * (1.0 - kContactSlack)) return std::nullopt;
  if (params.regime() == Regime::regularized && r < *params.r_eps) return 0.0;
  return -tail(r);
}

double KernelSpec::tail(double r) const { return std::pow(r, -(params.d + params.sigma)); }

double ConfinementSpec::operator()(const Vec& x) const {
  return c1 + c2 * std::pow(norm(x), power);
}

double gamma_r_sigma(int d, double sigma, double r) {
  if (!(sigma >= 0.0) || !(sigma < 1.0)) throw std::invalid_argument("gamma_r_sigma: sigma in [0,1)");
  if (!(r > 0.0) || !(r <= 1.0)) throw std::invalid_argument("gamma_r_sigma: r in (0,1]");
  const double dom = d * unit_ball_volume(d);
  if (sigma == 0.0) return dom * std::log(r);
  // (1 - r^-sigma)/sigma, written to stay accurate as sigma -> 0.
  return dom * (-std::expm1(-sigma * std::log(r)) / sigma);
}

double gamma_R_zero(int d, double R) {
  if (!(R >= 1.0)) throw std::invalid_argument("gamma_R_zero: R >= 1");
  return d * unit_ball_volume(d) * std::log(R);
}

double gamma_sigma_tail(int d, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gamma_sigma_tail: sigma > 0");
  return d * unit_ball_volume(d) / sigma;
}

double MesoscaleSchedule::operator()(double eps) const {
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("schedule: eps in (0,1)");
  return std::pow(eps, exponent);
}

std::string MesoscaleSchedule::describe() const {
  std::ostringstream os;
  os << "r_eps = eps^" << exponent << " (sigma = " << sigma << ")";
  return os.str();
}

MesoscaleSchedule mesoscale_schedule(double sigma, std::optional<double> exponent) {
  if (!(sigma >= 0.0) || !(sigma < 1.0))
    throw std::invalid_argument("mesoscale_schedule: sigma in [0,1)");
  // Admissible exponents fill (0, 1/(2*sigma+1)); the default takes the
  // geometric mean of that range. At sigma = 0 the square root works.
  double def = sigma > 0.0 ? 1.0 / (2.0 * (2.0 * sigma + 1.0)) : 0.5;
  double e = exponent.value_or(def);
  if (!(e > 0.0) || !(e < 1.0)) throw std::invalid_argument("mesoscale_schedule: exponent in (0,1)");
  return MesoscaleSchedule{sigma, e};
}

double admissibility_ratio(double sigma, double eps, double r_eps) {
  if (sigma > 0.0) return std::pow(eps, 1.0 / (2.0 * sigma + 1.0)) / r_eps;
  const double lg = std::log(r_eps);
  return eps * lg * lg / r_eps;
}

}  // namespace riesz
