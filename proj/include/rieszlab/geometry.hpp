#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace riesz {

// Points and cell indices are stored zero-padded to three components so the
// same arithmetic works for d = 1, 2, 3 without templates on the dimension.
using Vec = std::array<double, 3>;
using Cell = std::array<std::int64_t, 3>;

inline Vec vec(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

struct LexLess {
  bool operator()(const Vec& a, const Vec& b) const {
    if (a[0] != b[0]) return a[0] < b[0];
    if (a[1] != b[1]) return a[1] < b[1];
    return a[2] < b[2];
  }
  bool operator()(const Cell& a, const Cell& b) const {
    if (a[0] != b[0]) return a[0] < b[0];
    if (a[1] != b[1]) return a[1] < b[1];
    return a[2] < b[2];
  }
};

// Axis-aligned box, lo inclusive, hi exclusive. Unused axes carry [0,1).
struct Box {
  Vec lo{0.0, 0.0, 0.0};
  Vec hi{1.0, 1.0, 1.0};

  bool contains(const Vec& p, int dim) const {
    for (int k = 0; k < dim; ++k)
      if (p[k] < lo[k] || p[k] >= hi[k]) return false;
    return true;
  }
  double volume(int dim) const {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= hi[k] - lo[k];
    return v;
  }
};

}  // namespace riesz
