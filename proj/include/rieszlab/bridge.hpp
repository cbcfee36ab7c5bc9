#pragma once

#include "rieszlab/config.hpp"
#include "rieszlab/grid.hpp"

namespace riesz {

// Mesoscale cube side used when trading a scaled empirical measure for a set:
// the geometric mean of the particle scale and the kernel plateau radius.
double mesoscale_cell(double epsilon, double r_eps);

// Companion set of a scaled empirical measure, built on the mesoscale grid of
// cubes of side sqrt(eps * r_eps): cubes holding at least their own volume in
// scaled mass are kept whole, the others shrink concentrically until their
// volume matches the mass they hold. The shrunk block lives on a fine
// sub-grid, sized down to the smallest centered cube at least as large as the
// held mass and then trimmed corner-first to match it within 0.1% of a cube.
// Keeping full cubes whole discards the local mass excess, and that discarded
// excess is the sqrt(eps / r_eps) mass gap the bridge reports track.
// RegimeMismatch unless r_eps > 2 eps.
PixelSet measure_to_set(const ScaledEmpiricalMeasure& mu, double r_eps);

// Hard-sphere configuration whose scaled empirical measure tracks the
// indicator of E: optimal-lattice points at the density matching mass |E|,
// restricted to E. Inverse direction of measure_to_set up to o(1).
ScaledEmpiricalMeasure set_to_measure(const PixelSet& set, double epsilon);

// Side-by-side comparison of the discrete energies of mu and the truncated
// continuum energies of its companion set, with the a priori closeness
// envelopes the gaps must respect.
struct BridgeReport {
  double epsilon = 0.0;
  double r_eps = 0.0;
  double mass_measure = 0.0;          // w N
  double mass_set = 0.0;              // |E|
  double mass_gap = 0.0;              // | |E| - w N |
  double energy_measure = 0.0;        // pair energy of mu
  double energy_set = 0.0;            // truncated energy of E at r_eps
  double energy_gap = 0.0;
  double renormalized_measure = 0.0;  // pair energy - gamma_{r_eps} w N
  double renormalized_set = 0.0;      // truncated energy - gamma_{r_eps} |E|
  double renormalized_gap = 0.0;
  double bound_mass = 0.0;            // envelope sqrt(eps/r_eps), mass scaled
  double bound_energy = 0.0;          // envelope |gamma| sqrt(eps/r_eps), mass scaled
};

BridgeReport energy_bridge_report(const Params& params, const Configuration& config);

// The measure smoothed at the particle scale: density 1 / C^d on the union of
// the radius-eps balls around the particles, block averaged on cells of side
// eps / 4. Same total mass and same weak-* limits as the scaled empirical
// measure. Values top out at 1 / C^d, above 1, so this is not a DensityField.
ScalarField smoothed_measure(const Configuration& config);

}  // namespace riesz
