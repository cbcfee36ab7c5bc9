#include "rieszlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "rieszlab/bridge.hpp"
#include "rieszlab/discrete_energy.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/summation.hpp"

namespace riesz {
namespace {

// Distributions are hand-rolled on top of the raw generator because the
// standard library ones are not pinned across implementations, and runs must
// replay bit for bit from a seed.
struct Sampler {
  std::mt19937_64 gen;

  explicit Sampler(std::uint64_t seed) : gen(seed) {}

  double u01() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  std::size_t index(std::size_t n) {
    const auto i = static_cast<std::size_t>(u01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }
};

double confinement_sum(const std::vector<Vec>& pts, const ConfinementSpec& g, double w) {
  KahanSum acc;
  for (const Vec& p : pts) acc.add(g(p) * w);
  return acc.value();
}

// Variable part of the objective (pair term, plus confinement when driven).
double live_energy(const Params& params, const std::vector<Vec>& pts,
                   const ConfinementSpec* conf) {
  const Configuration view{params.d, params.epsilon, pts};
  const auto pair = pair_energy(params, view);
  if (!pair) throw std::logic_error("annealer reached an infeasible state");
  double e = *pair;
  if (conf) e += confinement_sum(pts, *conf, params.mass_weight());
  return e;
}

}  // namespace

AnnealResult anneal_discrete(const Params& params, Objective objective,
                             const ConfinementSpec* confinement, const Configuration& init,
                             const Box& domain, const AnnealSchedule& schedule,
                             std::uint64_t seed) {
  if (init.d != params.d) throw std::invalid_argument("dimension mismatch with init");
  if (init.epsilon != params.epsilon)
    throw std::invalid_argument("particle scale mismatch with init");
  if (objective == Objective::confined && confinement == nullptr)
    throw std::invalid_argument("confined objective needs a confinement spec");
  if (objective == Objective::renormalized && params.regime() != Regime::regularized)
    throw RegimeMismatch("renormalized objective needs the regularized regime");
  if (!(schedule.cooling > 0.0) || !(schedule.cooling <= 1.0))
    throw std::invalid_argument("cooling factor must lie in (0, 1]");
  if (schedule.epochs < 1) throw std::invalid_argument("need at least one epoch");

  const int d = params.d;
  const double w = params.mass_weight();
  const KernelSpec kernel(params);
  const ConfinementSpec* conf = objective == Objective::confined ? confinement : nullptr;

  std::vector<Vec> pts = init.points;
  const std::size_t n = pts.size();
  for (const Vec& p : pts)
    if (!domain.contains(p, d)) throw InfeasibleInit("initial point outside the domain");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!kernel.potential(dist(pts[i], pts[j])))
        throw InfeasibleInit("initial points inside the hard-sphere barrier");

  // The renormalization term is constant in the positions; it shifts reported
  // energies but never a Metropolis decision.
  double constant = 0.0;
  if (objective == Objective::renormalized)
    constant = -gamma_r_sigma(d, params.sigma, *params.r_eps) * w * static_cast<double>(n);

  double t0 = schedule.t0;
  if (!(t0 > 0.0)) {
    std::vector<double> magnitudes;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        magnitudes.push_back(std::abs(2.0 * w * w * *kernel.potential(dist(pts[i], pts[j]))));
    if (conf)
      for (const Vec& p : pts) magnitudes.push_back(std::abs((*conf)(p)*w));
    if (magnitudes.empty()) {
      t0 = 1.0;
    } else {
      auto mid = magnitudes.begin() + static_cast<std::ptrdiff_t>(magnitudes.size() / 2);
      std::nth_element(magnitudes.begin(), mid, magnitudes.end());
      t0 = std::max(*mid, 1e-300);
    }
  }
  const std::int64_t moves =
      schedule.moves_per_epoch > 0 ? schedule.moves_per_epoch : 50 * static_cast<std::int64_t>(n);
  const double step = schedule.step > 0.0 ? schedule.step : 0.5 * params.epsilon;

  Sampler rng(seed);
  double live = live_energy(params, pts, conf);
  std::vector<Vec> best_pts = pts;
  double best_live = live;

  AnnealResult result;
  result.trace.reserve(static_cast<std::size_t>(schedule.epochs));

  for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
    const double temp = t0 * std::pow(schedule.cooling, epoch);
    std::int64_t accepted = 0;
    for (std::int64_t mv = 0; mv < moves && n > 0; ++mv) {
      const std::size_t i = rng.index(n);
      const bool teleport = rng.u01() < schedule.teleport_fraction;
      Vec prop = pts[i];
      for (int k = 0; k < d; ++k)
        prop[k] = teleport ? domain.lo[k] + rng.u01() * (domain.hi[k] - domain.lo[k])
                           : pts[i][k] + step * rng.normal();
      if (!domain.contains(prop, d)) continue;

      double delta = 0.0;
      bool feasible = true;
      for (std::size_t j = 0; j < n && feasible; ++j) {
        if (j == i) continue;
        const auto after = kernel.potential(dist(prop, pts[j]));
        if (!after) {
          feasible = false;
          break;
        }
        delta += 2.0 * w * w * (*after - *kernel.potential(dist(pts[i], pts[j])));
      }
      if (!feasible) continue;
      if (conf) delta += ((*conf)(prop) - (*conf)(pts[i])) * w;

      if (delta > 0.0 && rng.u01() >= std::exp(-delta / temp)) continue;
      pts[i] = prop;
      live += delta;
      ++accepted;
      if (live < best_live) {
        best_live = live;
        best_pts = pts;
      }
    }
    // Refresh from scratch so incremental-delta roundoff cannot accumulate
    // over the run.
    live = live_energy(params, pts, conf);
    AnnealTraceRow row;
    row.epoch = epoch;
    row.temperature = temp;
    row.energy = live + constant;
    row.best_energy = best_live + constant;
    row.accept_rate = moves > 0 ? static_cast<double>(accepted) / static_cast<double>(moves) : 0.0;
    result.trace.push_back(row);
  }

  best_live = live_energy(params, best_pts, conf);
  result.config = Configuration{d, params.epsilon, std::move(best_pts)};
  result.energy = best_live + constant;
  return result;
}

DescentResult minimize_density(int d, double sigma, const ConfinementSpec& g,
                               const DescentOptions& opts) {
  if (!(opts.h > 0.0)) throw std::invalid_argument("grid pitch must be positive");
  for (int k = 0; k < d; ++k)
    if (!(opts.domain.hi[k] > opts.domain.lo[k]))
      throw std::invalid_argument("descent domain must have positive extent");
  const double h = opts.h;
  const double vol = std::pow(h, d);

  DensityField rho;
  rho.dim = d;
  rho.h = h;
  for (int k = 0; k < d; ++k) {
    const auto first = static_cast<std::int64_t>(std::floor(opts.domain.lo[k] / h));
    const auto last = static_cast<std::int64_t>(std::ceil(opts.domain.hi[k] / h)) - 1;
    rho.origin[static_cast<std::size_t>(k)] = first;
    rho.shape[static_cast<std::size_t>(k)] = std::max<std::int64_t>(1, last - first + 1);
  }
  rho.values.assign(rho.size(), 0.0);

  Vec center{0.0, 0.0, 0.0};
  for (int k = 0; k < d; ++k) center[k] = 0.5 * (opts.domain.lo[k] + opts.domain.hi[k]);
  const double radius = std::pow(1.0 / unit_ball_volume(d), 1.0 / d);
  std::vector<double> gval(rho.size());
  for (std::size_t flat = 0; flat < rho.size(); ++flat) {
    const Vec x = cell_center(rho.cell_at(flat), h, d);
    gval[flat] = g(x);
    if (dist(x, center) <= radius) rho.values[flat] = 1.0;
  }

  const auto objective_of = [&](const DensityField& r) {
    const double attract = riesz_energy(d, sigma, r, opts.quad);
    KahanSum confine;
    for (std::size_t flat = 0; flat < r.values.size(); ++flat)
      confine.add(gval[flat] * r.values[flat] * vol);
    return attract + confine.value();
  };

  DescentResult result;
  double objective = objective_of(rho);
  result.trace.push_back(objective);
  ScalarField res = first_variation_residual(d, sigma, rho, g, opts.quad);
  double kkt = kkt_violation(rho, res);
  const double tol = opts.tol_factor * h;

  double tau = 1.0;
  DensityField cand = rho;
  while (kkt > tol && result.steps < opts.max_steps) {
    bool accepted = false;
    double cand_objective = 0.0;
    while (tau >= 1e-14) {
      double dirder = 0.0;
      for (std::size_t flat = 0; flat < rho.values.size(); ++flat) {
        const double moved =
            std::clamp(rho.values[flat] - tau * res.values[flat], 0.0, 1.0);
        cand.values[flat] = moved;
        dirder += res.values[flat] * (moved - rho.values[flat]) * vol;
      }
      cand_objective = objective_of(cand);
      if (cand_objective <= objective + 0.1 * dirder) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) break;
    std::swap(rho.values, cand.values);
    objective = cand_objective;
    ++result.steps;
    result.trace.push_back(objective);
    res = first_variation_residual(d, sigma, rho, g, opts.quad);
    kkt = kkt_violation(rho, res);
    tau = std::min(tau * 1.3, 1e3);
  }

  result.rho = std::move(rho);
  result.objective = objective;
  result.kkt = kkt;
  return result;
}

namespace {

// Shared body for both diagnostics entry points. Nothing here needs the
// [0, 1] bound, only a nonnegative field, so smoothed measures qualify.
ShapeDiagnostics field_diagnostics(const ScalarField& rho) {
  const int d = rho.dim;
  const double h = rho.h;
  const double vol = std::pow(h, d);
  const double mass = rho.integral();
  if (!(mass > 0.0)) throw EmptySubject("density carries no mass");

  // Support at half the peak value, so cells a ball merely grazes do not
  // count: smoothed point measures have a one-cell fringe of partial
  // coverage all along the boundary.
  const double peak = *std::max_element(rho.values.begin(), rho.values.end());
  const PixelSet supp = support_of(rho, 0.5 * peak);
  for (const Cell& c : supp.cells)
    for (int k = 0; k < d; ++k)
      if (c[k] == rho.origin[k] || c[k] == rho.origin[k] + rho.shape[k] - 1)
        throw SupportTouchesBoundary("support reaches the grid window");

  Vec bary{0.0, 0.0, 0.0};
  for (std::size_t flat = 0; flat < rho.values.size(); ++flat) {
    if (rho.values[flat] == 0.0) continue;
    const Vec x = cell_center(rho.cell_at(flat), h, d);
    bary = bary + (rho.values[flat] * vol / mass) * x;
  }

  const double radius = std::pow(mass / unit_ball_volume(d), 1.0 / d);
  Box bounds;
  for (int k = 0; k < d; ++k) {
    bounds.lo[k] = bary[k] - radius - 2.0 * h;
    bounds.hi[k] = bary[k] + radius + 2.0 * h;
  }
  const PixelSet ball =
      rasterize([&](const Vec& p) { return dist(p, bary) <= radius; }, bounds, d, h);

  ShapeDiagnostics diag;
  diag.mass = mass;
  diag.support_measure = supp.measure();
  diag.ball_deficit = symmetric_difference_measure(supp, ball) / supp.measure();
  KahanSum mid;
  for (double v : rho.values)
    if (v > 0.05 && v < 0.95) mid.add(v * vol);
  diag.bang_bang_index = mid.value() / mass;
  return diag;
}

}  // namespace

ShapeDiagnostics shape_diagnostics(const DensityField& rho) { return field_diagnostics(rho); }

ShapeDiagnostics shape_diagnostics(const Configuration& config) {
  if (config.points.empty()) throw EmptySubject("configuration has no points");
  const ScalarField smooth = smoothed_measure(config);

  // Re-window with a two-cell margin: the smoothed field is built on the tight
  // bounding box, which is not a constraint worth reporting on.
  ScalarField padded;
  padded.dim = smooth.dim;
  padded.h = smooth.h;
  padded.origin = smooth.origin;
  padded.shape = smooth.shape;
  for (int k = 0; k < smooth.dim; ++k) {
    padded.origin[static_cast<std::size_t>(k)] -= 2;
    padded.shape[static_cast<std::size_t>(k)] += 4;
  }
  padded.values.assign(padded.size(), 0.0);
  for (std::size_t flat = 0; flat < smooth.values.size(); ++flat)
    padded.values[padded.index(smooth.cell_at(flat))] = smooth.values[flat];
  return field_diagnostics(padded);
}

}  // namespace riesz
