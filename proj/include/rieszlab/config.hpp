#pragma once

#include <optional>
#include <vector>

#include "rieszlab/constants.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/geometry.hpp"

namespace riesz {

enum class Regime { integrable, regularized };

// Relative slack allowed at contact distance, so lattice-generated pairs at
// exact contact survive floating-point roundtrips through scaling.
inline constexpr double kContactSlack = 1e-12;

// Problem parameters shared across the library. sigma in (-d, 0) selects the
// integrable regime (no mesoscale radius); sigma in [0, 1) the regularized
// one, which needs r_eps in (2*eps, 1).
struct Params {
  int d;
  double sigma;
  double epsilon;
  std::optional<double> r_eps;

  Params(int d_, double sigma_, double epsilon_, std::optional<double> r_eps_ = std::nullopt);

  Regime regime() const { return sigma < 0.0 ? Regime::integrable : Regime::regularized; }
  double mass_weight() const { return sphere_mass_weight(d, epsilon); }
};

// A finite point set with pairwise distances >= 2*eps. Construct through
// validate_configuration; direct brace-initialization skips the check and is
// reserved for code that has already established admissibility.
struct Configuration {
  int d = 1;
  double epsilon = 0.1;
  std::vector<Vec> points;

  std::size_t size() const { return points.size(); }
};

// Checks the hard-sphere constraint with a bucket grid of side 2*eps, so the
// work is linear in N for bounded-density inputs. Contact distance is allowed
// with 1e-12 relative slack so lattice points at exact contact validate.
Configuration validate_configuration(std::vector<Vec> points, int d, double epsilon);

// Total scaled mass carried by the configuration: N * eps^d * omega_d / C^d.
double total_mass(const Configuration& config);

// Configuration viewed as a measure, each point weighted by the sphere mass.
struct ScaledEmpiricalMeasure {
  Configuration config;

  double weight() const { return sphere_mass_weight(config.d, config.epsilon); }
  double mass() const { return total_mass(config); }
};

}  // namespace riesz
