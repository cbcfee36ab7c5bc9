#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "rieszlab/geometry.hpp"

namespace riesz {

inline Cell cell_of(const Vec& p, double h) {
  return {static_cast<std::int64_t>(std::floor(p[0] / h)),
          static_cast<std::int64_t>(std::floor(p[1] / h)),
          static_cast<std::int64_t>(std::floor(p[2] / h))};
}

inline Vec cell_center(const Cell& c, double h, int dim) {
  Vec p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) p[k] = (static_cast<double>(c[k]) + 0.5) * h;
  return p;
}

// Finite union of half-open grid cells [i*h, (i+1)*h)^d, kept sorted and
// deduplicated so iteration order and serialization are deterministic.
struct PixelSet {
  int dim = 1;
  double h = 1.0;
  std::vector<Cell> cells;

  double measure() const { return static_cast<double>(cells.size()) * std::pow(h, dim); }
  bool contains(const Cell& c) const {
    return std::binary_search(cells.begin(), cells.end(), c, LexLess{});
  }
  bool contains_point(const Vec& p) const { return contains(cell_of(p, h)); }

  void normalize() {
    std::sort(cells.begin(), cells.end(), LexLess{});
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  }
};

PixelSet make_pixel_set(std::vector<Cell> cells, int dim, double h);

// Rasterize a membership predicate over cell centers inside a bounding box.
PixelSet rasterize(const std::function<bool(const Vec&)>& inside, const Box& bounds, int dim,
                   double h);

// Dense scalar values on a grid window: origin is the lowest cell index,
// values are row-major with the first axis fastest. Unused axes have size 1.
struct ScalarField {
  int dim = 1;
  double h = 1.0;
  Cell origin{0, 0, 0};
  std::array<std::int64_t, 3> shape{1, 1, 1};
  std::vector<double> values;

  std::size_t size() const {
    return static_cast<std::size_t>(shape[0] * shape[1] * shape[2]);
  }
  std::size_t index(const Cell& c) const {
    return static_cast<std::size_t>(((c[2] - origin[2]) * shape[1] + (c[1] - origin[1])) * shape[0] +
                                    (c[0] - origin[0]));
  }
  bool in_window(const Cell& c) const {
    for (int k = 0; k < 3; ++k)
      if (c[k] < origin[k] || c[k] >= origin[k] + shape[k]) return false;
    return true;
  }
  double at(const Cell& c) const { return in_window(c) ? values[index(c)] : 0.0; }
  Cell cell_at(std::size_t flat) const {
    auto i0 = static_cast<std::int64_t>(flat) % shape[0];
    auto rest = static_cast<std::int64_t>(flat) / shape[0];
    return {origin[0] + i0, origin[1] + rest % shape[1], origin[2] + rest / shape[1]};
  }
  double integral() const;
};

// ScalarField whose values lie in [0, 1]; enforced by validate_density_field.
struct DensityField : ScalarField {};

DensityField validate_density_field(ScalarField field);

// DensityField that is a * indicator(A) for one level a; returns a and A.
struct SingleLevel {
  double level;
  PixelSet support;
};
SingleLevel single_level_of(const DensityField& rho, double rel_tol = 1e-9);

DensityField indicator_field(const PixelSet& set);
PixelSet support_of(const ScalarField& field, double threshold = 1e-12);

// Exact Lebesgue measure of the symmetric difference of two cell unions,
// valid for unrelated grid resolutions (computed by box overlap).
double symmetric_difference_measure(const PixelSet& a, const PixelSet& b);

}  // namespace riesz
