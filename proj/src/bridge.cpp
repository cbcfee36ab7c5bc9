#include "rieszlab/bridge.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "rieszlab/constants.hpp"
#include "rieszlab/continuum_energy.hpp"
#include "rieszlab/discrete_energy.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/lattice.hpp"

namespace riesz {

namespace {

// Fine sub-grid resolution per mesoscale cube and axis. Shrunk cubes are
// realized cell by cell on this grid, so the worst realization error per cube
// is half a fine cell; at least a thousand fine cells per cube keeps that
// below 1e-3 of a cube, small next to the sqrt(eps / r_eps) discard signal
// the mass gap is supposed to measure.
int subgrid_resolution(int d) {
  switch (d) {
    case 1: return 1024;
    case 2: return 32;
    default: return 10;
  }
}

// Envelope prefactors for the gap bounds reported alongside the gaps.
// Calibrated once against the default sweep (d = 2, sigma = 1/2, disk
// subject, eps in [0.005, 0.02]) and frozen.
constexpr double kMassEnvelopeFactor = 2.0;
constexpr double kEnergyEnvelopeFactor = 2.0;

}  // namespace

double mesoscale_cell(double epsilon, double r_eps) {
  if (!(epsilon > 0.0) || !(r_eps > 0.0)) {
    throw std::invalid_argument("mesoscale_cell: scales must be positive");
  }
  return std::sqrt(epsilon * r_eps);
}

PixelSet measure_to_set(const ScaledEmpiricalMeasure& mu, double r_eps) {
  const Configuration& config = mu.config;
  const int d = config.d;
  const double eps = config.epsilon;
  if (!(r_eps > 2.0 * eps)) {
    throw RegimeMismatch("measure_to_set: needs r_eps > 2*eps so the mesoscale cube "
                         "sits between the particle scale and the plateau radius");
  }
  const double rho = mesoscale_cell(eps, r_eps);
  const int sub = subgrid_resolution(d);
  const double fine_h = rho / static_cast<double>(sub);

  PixelSet out;
  out.dim = d;
  out.h = fine_h;
  if (config.points.empty()) return out;

  // Scaled mass per mesoscale cube, via the particle count it holds.
  std::map<Cell, std::int64_t, LexLess> counts;
  for (const Vec& p : config.points) ++counts[cell_of(p, rho)];

  const double w = mu.weight();
  const double cube_volume = std::pow(rho, d);
  std::int64_t cube_cells = 1;
  for (int k = 0; k < d; ++k) cube_cells *= sub;
  const double cell_volume = cube_volume / static_cast<double>(cube_cells);
  const auto block_cells = [d](std::int64_t s) {
    std::int64_t v = 1;
    for (int k = 0; k < d; ++k) v *= s;
    return v;
  };

  std::vector<Cell> block;
  for (const auto& [cube, n] : counts) {
    const double mass = w * static_cast<double>(n);
    std::int64_t want = cube_cells;
    std::int64_t side = sub;
    if (mass < cube_volume) {
      // Fine cells needed to carry the held mass, and the smallest centered
      // block with even sides that covers them.
      want = std::clamp<std::int64_t>(std::llround(mass / cell_volume), 1, cube_cells);
      side = 2;
      while (block_cells(side) < want) side += 2;
    }
    const std::int64_t offset = (sub - side) / 2;

    block.clear();
    std::array<std::int64_t, 3> count{1, 1, 1};
    for (int k = 0; k < d; ++k) count[k] = side;
    Cell c{0, 0, 0};
    for (c[2] = 0; c[2] < count[2]; ++c[2])
      for (c[1] = 0; c[1] < count[1]; ++c[1])
        for (c[0] = 0; c[0] < count[0]; ++c[0]) block.push_back(c);

    // Trim the overshoot corner-first, keeping the cells nearest the block
    // center, so the realized volume matches the held mass to half a fine
    // cell and the block stays concentric.
    if (static_cast<std::int64_t>(block.size()) > want) {
      const double mid = 0.5 * static_cast<double>(side - 1);
      std::sort(block.begin(), block.end(), [&](const Cell& a, const Cell& b) {
        double da = 0.0;
        double db = 0.0;
        for (int k = 0; k < d; ++k) {
          da += (static_cast<double>(a[k]) - mid) * (static_cast<double>(a[k]) - mid);
          db += (static_cast<double>(b[k]) - mid) * (static_cast<double>(b[k]) - mid);
        }
        if (da != db) return da < db;
        return LexLess{}(a, b);
      });
      block.resize(static_cast<std::size_t>(want));
    }

    for (const Cell& bc : block) {
      Cell g{0, 0, 0};
      for (int k = 0; k < d; ++k) g[k] = cube[k] * sub + offset + bc[k];
      out.cells.push_back(g);
    }
  }
  out.normalize();
  return out;
}

ScaledEmpiricalMeasure set_to_measure(const PixelSet& set, double epsilon) {
  return {recovery_configuration(indicator_field(set), epsilon)};
}

BridgeReport energy_bridge_report(const Params& params, const Configuration& config) {
  if (params.regime() != Regime::regularized || !params.r_eps) {
    throw RegimeMismatch("energy_bridge_report: bridge gaps are defined for the "
                         "regularized regime with a mesoscale radius");
  }
  const double r = *params.r_eps;
  const ScaledEmpiricalMeasure mu{config};
  const PixelSet set = measure_to_set(mu, r);

  BridgeReport rep;
  rep.epsilon = params.epsilon;
  rep.r_eps = r;
  rep.mass_measure = mu.mass();
  rep.mass_set = set.measure();
  rep.mass_gap = std::abs(rep.mass_set - rep.mass_measure);

  const EnergyBreakdown discrete = energy(params, config);
  if (discrete.forbidden) {
    throw std::invalid_argument("energy_bridge_report: configuration violates the "
                                "hard-sphere constraint");
  }
  rep.energy_measure = discrete.pair;
  rep.energy_set = j_truncated(params.d, params.sigma, set, r);
  rep.energy_gap = std::abs(rep.energy_set - rep.energy_measure);

  const double gamma = gamma_r_sigma(params.d, params.sigma, r);
  rep.renormalized_measure = rep.energy_measure - gamma * rep.mass_measure;
  rep.renormalized_set = rep.energy_set - gamma * rep.mass_set;
  rep.renormalized_gap = std::abs(rep.renormalized_set - rep.renormalized_measure);

  const double root = std::sqrt(params.epsilon / r);
  rep.bound_mass = kMassEnvelopeFactor * root * rep.mass_measure;
  rep.bound_energy = kEnergyEnvelopeFactor * std::abs(gamma) * root * rep.mass_measure;
  return rep;
}

ScalarField smoothed_measure(const Configuration& config) {
  const int d = config.d;
  const double eps = config.epsilon;
  const double h = 0.25 * eps;
  const double level = 1.0 / packing_density(d);
  constexpr int kSub = 4;  // coverage sub-samples per axis and cell

  ScalarField out;
  out.dim = d;
  out.h = h;
  if (config.points.empty()) {
    out.values.assign(1, 0.0);
    return out;
  }

  Vec lo = config.points.front();
  Vec hi = lo;
  for (const Vec& p : config.points) {
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  for (int k = 0; k < d; ++k) {
    out.origin[k] = static_cast<std::int64_t>(std::floor((lo[k] - eps) / h));
    const auto top = static_cast<std::int64_t>(std::floor((hi[k] + eps) / h));
    out.shape[k] = top - out.origin[k] + 1;
  }
  out.values.assign(out.size(), 0.0);

  std::array<int, 3> samples{1, 1, 1};
  for (int k = 0; k < d; ++k) samples[k] = kSub;
  const double total = static_cast<double>(samples[0] * samples[1] * samples[2]);
  for (const Vec& p : config.points) {
    Cell first{0, 0, 0};
    Cell last{0, 0, 0};
    for (int k = 0; k < d; ++k) {
      first[k] = static_cast<std::int64_t>(std::floor((p[k] - eps) / h));
      last[k] = static_cast<std::int64_t>(std::floor((p[k] + eps) / h));
    }
    Cell c{0, 0, 0};
    for (c[2] = first[2]; c[2] <= last[2]; ++c[2]) {
      for (c[1] = first[1]; c[1] <= last[1]; ++c[1]) {
        for (c[0] = first[0]; c[0] <= last[0]; ++c[0]) {
          int hits = 0;
          for (int i2 = 0; i2 < samples[2]; ++i2) {
            for (int i1 = 0; i1 < samples[1]; ++i1) {
              for (int i0 = 0; i0 < samples[0]; ++i0) {
                Vec q{0.0, 0.0, 0.0};
                const std::array<int, 3> idx{i0, i1, i2};
                for (int k = 0; k < d; ++k) {
                  q[k] = (static_cast<double>(c[k]) +
                          (static_cast<double>(idx[k]) + 0.5) / kSub) * h;
                }
                if (dist(q, p) <= eps) ++hits;
              }
            }
          }
          if (hits > 0) out.values[out.index(c)] += level * static_cast<double>(hits) / total;
        }
      }
    }
  }
  return out;
}

}  // namespace riesz
