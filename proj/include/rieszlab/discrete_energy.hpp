#pragma once

#include <optional>

#include "rieszlab/config.hpp"
#include "rieszlab/kernels.hpp"

namespace riesz {

// One evaluation of a point-configuration energy, split into its additive
// parts. `forbidden` is set when some pair sits inside the hard-sphere
// barrier (possible for raw point lists that bypassed validation); numeric
// fields are zero in that case.
struct EnergyBreakdown {
  bool forbidden = false;
  double pair = 0.0;            // sum over ordered pairs i != j of f(|x_i - x_j|) w^2
  double renormalization = 0.0; // -gamma * w * N, regularized regime only
  double confinement = 0.0;     // sum_i g(x_i) w
  double total = 0.0;
};

// Pair interaction energy of the scaled empirical measure: every ordered pair
// weighted by w^2 = (eps^d omega_d / C_d)^2. Empty when some pair is inside
// the barrier. The attractive tail is long range, so the sum is an exact
// O(N^2) loop with compensated accumulation; callers control N through the
// eps sweep they request.
std::optional<double> pair_energy(const Params& params, const Configuration& config);

EnergyBreakdown energy(const Params& params, const Configuration& config);

// Pair energy minus gamma_{r_eps}^sigma * w * N. RegimeMismatch unless the
// kernel is regularized (sigma >= 0).
EnergyBreakdown energy_renormalized(const Params& params, const Configuration& config);

// Pair energy plus the confinement term sum_i g(x_i) w.
EnergyBreakdown energy_confined(const Params& params, const Configuration& config,
                                const ConfinementSpec& g);

}  // namespace riesz
