#include "rieszlab/discrete_energy.hpp"

#include <cmath>

#include "rieszlab/errors.hpp"
#include "rieszlab/geometry.hpp"
#include "rieszlab/summation.hpp"

namespace riesz {

std::optional<double> pair_energy(const Params& params, const Configuration& config) {
  const KernelSpec kernel(params);
  const double w = params.mass_weight();
  const auto& pts = config.points;
  KahanSum total;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      auto v = kernel.potential(dist(pts[i], pts[j]));
      if (!v) return std::nullopt;
      if (*v != 0.0) total.add(2.0 * *v);  // ordered pairs
    }
  return total.value() * w * w;
}

EnergyBreakdown energy(const Params& params, const Configuration& config) {
  EnergyBreakdown out;
  auto pair = pair_energy(params, config);
  if (!pair) {
    out.forbidden = true;
    return out;
  }
  out.pair = *pair;
  out.total = out.pair;
  return out;
}

EnergyBreakdown energy_renormalized(const Params& params, const Configuration& config) {
  if (params.regime() != Regime::regularized)
    throw RegimeMismatch("renormalized energy needs the regularized regime (sigma >= 0)");
  EnergyBreakdown out = energy(params, config);
  if (out.forbidden) return out;
  const double gamma = gamma_r_sigma(params.d, params.sigma, *params.r_eps);
  out.renormalization = -gamma * params.mass_weight() * static_cast<double>(config.size());
  out.total = out.pair + out.renormalization;
  return out;
}

EnergyBreakdown energy_confined(const Params& params, const Configuration& config,
                                const ConfinementSpec& g) {
  EnergyBreakdown out = energy(params, config);
  if (out.forbidden) return out;
  const double w = params.mass_weight();
  KahanSum conf;
  for (const Vec& x : config.points) conf.add(g(x));
  out.confinement = conf.value() * w;
  out.total = out.pair + out.confinement;
  return out;
}

}  // namespace riesz
