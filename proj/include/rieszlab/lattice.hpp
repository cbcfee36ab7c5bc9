#pragma once

#include <cstdint>
#include <vector>

#include "rieszlab/config.hpp"
#include "rieszlab/grid.hpp"

namespace riesz {

// The densest-packing lattices in d <= 3: 2Z scaled, hexagonal, fcc.
enum class LatticeKind { integer_line, hexagonal, fcc };

struct LatticeSpec {
  LatticeKind kind = LatticeKind::integer_line;
  double spacing = 2.0;  // nearest-neighbor distance

  int dim() const {
    return kind == LatticeKind::integer_line ? 1 : kind == LatticeKind::hexagonal ? 2 : 3;
  }
  // Points per unit volume.
  double point_density() const;
};

LatticeSpec optimal_lattice(int d, double spacing);

struct Region {
  enum class Kind { box, ball } kind = Kind::box;
  Box box;       // half-open when kind == box
  Vec center{};  // ball data, closed ball
  double radius = 0.0;

  static Region make_box(const Box& b) { return {Kind::box, b, {}, 0.0}; }
  static Region make_ball(const Vec& c, double r) { return {Kind::ball, {}, c, r}; }
  bool contains(const Vec& p, int dim) const;
};

// All lattice points inside the region, in lexicographic order.
std::vector<Vec> lattice_points_in(const LatticeSpec& spec, const Region& region);

// Best packing of 2-separated points in [0, r)^d found by structured lattice
// crops, randomized insertion and overlap relaxation; density is
// count * omega_d / r^d. Deterministic for a fixed seed, and never below the
// best structured crop.
struct BoxDensityResult {
  Configuration config;
  std::size_t count = 0;
  double density = 0.0;
};

BoxDensityResult estimate_box_density(int d, double r, std::int64_t anneal_budget,
                                      std::uint64_t seed);

// Lattice filling of the support of a single-level density a * 1_A: points of
// the optimal lattice with spacing 2 eps a^(-1/d) whose cell lies in A. The
// scaled mass of the result converges to the integral of rho as eps -> 0.
Configuration recovery_configuration(const DensityField& rho, double epsilon);

}  // namespace riesz
