#pragma once

#include <cmath>
#include <stdexcept>

namespace riesz {

inline constexpr double kPi = 3.14159265358979323846;

// Volume of the unit ball in dimension d.
inline double unit_ball_volume(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
    default: throw std::invalid_argument("unit_ball_volume: d must be 1, 2 or 3");
  }
}

// Best possible sphere packing density. Known exactly in d = 1, 2, 3;
// higher dimensions are rejected everywhere in this library.
inline double packing_density(int d) {
  switch (d) {
    case 1: return 1.0;
    case 2: return kPi / (2.0 * std::sqrt(3.0));
    case 3: return kPi / (3.0 * std::sqrt(2.0));
    default: throw std::invalid_argument("packing_density: d must be 1, 2 or 3");
  }
}

// Mass carried by one hard sphere of radius eps: eps^d * omega_d / C^d.
inline double sphere_mass_weight(int d, double eps) {
  return std::pow(eps, d) * unit_ball_volume(d) / packing_density(d);
}

}  // namespace riesz
