#pragma once

#include <cstdint>
#include <vector>

#include "rieszlab/config.hpp"
#include "rieszlab/continuum_energy.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/kernels.hpp"

namespace riesz {

// Which discrete functional the annealer drives downhill.
enum class Objective { pair, renormalized, confined };

// Non-positive fields are filled in from the instance: t0 from the median
// pair energy magnitude, moves_per_epoch from 50 N, step from eps / 2.
struct AnnealSchedule {
  double t0 = 0.0;
  double cooling = 0.95;
  int epochs = 200;
  std::int64_t moves_per_epoch = 0;
  double step = 0.0;
  double teleport_fraction = 0.05;
};

struct AnnealTraceRow {
  int epoch = 0;
  double temperature = 0.0;
  double energy = 0.0;       // current total
  double best_energy = 0.0;  // best seen so far
  double accept_rate = 0.0;
};

struct AnnealResult {
  Configuration config;  // best configuration seen
  double energy = 0.0;
  std::vector<AnnealTraceRow> trace;
};

// Metropolis annealing over hard-sphere configurations inside `domain`
// (moves leaving the domain or breaking the 2 eps barrier are rejected).
// Proposals are Gaussian displacements with occasional uniform teleports.
// Deterministic for a fixed seed. InfeasibleInit if init violates the
// barrier or the domain.
AnnealResult anneal_discrete(const Params& params, Objective objective,
                             const ConfinementSpec* confinement, const Configuration& init,
                             const Box& domain, const AnnealSchedule& schedule,
                             std::uint64_t seed);

struct DescentOptions {
  Box domain;              // grid window
  double h = 0.0;          // grid pitch
  int max_steps = 400;
  double tol_factor = 10.0;  // stationarity target, in units of h
  QuadratureSpec quad{};
};

struct DescentResult {
  DensityField rho;
  double objective = 0.0;
  double kkt = 0.0;  // final bang-bang violation of the residual
  int steps = 0;
  std::vector<double> trace;  // objective per accepted step
};

// Projected gradient descent with backtracking for the confined attractive
// energy over densities 0 <= rho <= 1 on a fixed grid. Starts from the
// indicator of a centered ball carrying unit mass.
DescentResult minimize_density(int d, double sigma, const ConfinementSpec& g,
                               const DescentOptions& opts);

// How ball-like and how bang-bang a density is. ball_deficit compares the
// support (cells above half the peak value) with the ball of the same total
// mass centered at the barycenter, by relative symmetric difference;
// bang_bang_index is the mass fraction sitting on cells with intermediate
// values (strictly between 0.05 and 0.95). SupportTouchesBoundary when the
// support presses against the grid window, EmptySubject when there is no
// mass. The Configuration overload works on the smoothed measure.
struct ShapeDiagnostics {
  double ball_deficit = 0.0;
  double bang_bang_index = 0.0;
  double mass = 0.0;
  double support_measure = 0.0;
};

ShapeDiagnostics shape_diagnostics(const DensityField& rho);
ShapeDiagnostics shape_diagnostics(const Configuration& config);

}  // namespace riesz
