#include "rieszlab/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "rieszlab/errors.hpp"

namespace riesz {

PixelSet make_pixel_set(std::vector<Cell> cells, int dim, double h) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("pixel set: dimension must be 1, 2 or 3");
  if (!(h > 0.0)) throw std::invalid_argument("pixel set: resolution must be positive");
  for (auto& c : cells)
    for (int k = dim; k < 3; ++k) c[k] = 0;
  PixelSet set{dim, h, std::move(cells)};
  set.normalize();
  return set;
}

PixelSet rasterize(const std::function<bool(const Vec&)>& inside, const Box& bounds, int dim,
                   double h) {
  Cell lo{0, 0, 0}, hi{1, 1, 1};
  for (int k = 0; k < dim; ++k) {
    lo[k] = static_cast<std::int64_t>(std::floor(bounds.lo[k] / h)) - 1;
    hi[k] = static_cast<std::int64_t>(std::ceil(bounds.hi[k] / h)) + 1;
  }
  std::vector<Cell> cells;
  for (std::int64_t z = lo[2]; z < (dim > 2 ? hi[2] : 1); ++z)
    for (std::int64_t y = lo[1]; y < (dim > 1 ? hi[1] : 1); ++y)
      for (std::int64_t x = lo[0]; x < hi[0]; ++x) {
        Cell c{x, dim > 1 ? y : 0, dim > 2 ? z : 0};
        if (inside(cell_center(c, h, dim))) cells.push_back(c);
      }
  return make_pixel_set(std::move(cells), dim, h);
}

double ScalarField::integral() const {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    double t = v - comp;
    double s = sum + t;
    comp = (s - sum) - t;
    sum = s;
  }
  return sum * std::pow(h, dim);
}

DensityField validate_density_field(ScalarField field) {
  if (field.dim < 1 || field.dim > 3)
    throw std::invalid_argument("density field: dimension must be 1, 2 or 3");
  if (!(field.h > 0.0)) throw std::invalid_argument("density field: resolution must be positive");
  if (field.size() != field.values.size())
    throw std::invalid_argument("density field: shape does not match value count");
  for (double v : field.values)
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw std::invalid_argument("density field: values must lie in [0,1]");
  DensityField out;
  static_cast<ScalarField&>(out) = std::move(field);
  return out;
}

SingleLevel single_level_of(const DensityField& rho, double rel_tol) {
  double level = 0.0;
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    const double v = rho.values[i];
    if (v == 0.0) continue;
    if (level == 0.0)
      level = v;
    else if (std::abs(v - level) > rel_tol * level)
      throw std::invalid_argument("density field carries more than one level");
    cells.push_back(rho.cell_at(i));
  }
  if (!(level > 0.0) || level > 1.0)
    throw LevelOutOfRange("single-level density must have level in (0,1]");
  return {level, make_pixel_set(std::move(cells), rho.dim, rho.h)};
}

DensityField indicator_field(const PixelSet& set) {
  ScalarField f;
  f.dim = set.dim;
  f.h = set.h;
  if (set.cells.empty()) {
    f.values.assign(1, 0.0);
    return validate_density_field(std::move(f));
  }
  Cell lo = set.cells.front(), hi = set.cells.front();
  for (const auto& c : set.cells)
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], c[k]);
      hi[k] = std::max(hi[k], c[k]);
    }
  f.origin = lo;
  for (int k = 0; k < 3; ++k) f.shape[k] = hi[k] - lo[k] + 1;
  f.values.assign(f.size(), 0.0);
  for (const auto& c : set.cells) f.values[f.index(c)] = 1.0;
  return validate_density_field(std::move(f));
}

PixelSet support_of(const ScalarField& field, double threshold) {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < field.values.size(); ++i)
    if (std::abs(field.values[i]) > threshold) cells.push_back(field.cell_at(i));
  return make_pixel_set(std::move(cells), field.dim, field.h);
}

namespace {

double overlap_with_set(const Cell& a, double ha, const PixelSet& b, int dim) {
  Cell lo{0, 0, 0}, hi{1, 1, 1};
  for (int k = 0; k < dim; ++k) {
    const double alo = static_cast<double>(a[k]) * ha;
    const double ahi = alo + ha;
    lo[k] = static_cast<std::int64_t>(std::floor(alo / b.h));
    hi[k] = static_cast<std::int64_t>(std::floor((ahi - 1e-300) / b.h)) + 1;
  }
  double total = 0.0;
  for (std::int64_t z = lo[2]; z < (dim > 2 ? hi[2] : 1); ++z)
    for (std::int64_t y = lo[1]; y < (dim > 1 ? hi[1] : 1); ++y)
      for (std::int64_t x = lo[0]; x < hi[0]; ++x) {
        Cell c{x, dim > 1 ? y : 0, dim > 2 ? z : 0};
        if (!b.contains(c)) continue;
        double vol = 1.0;
        for (int k = 0; k < dim; ++k) {
          const double alo = static_cast<double>(a[k]) * ha;
          const double blo = static_cast<double>(c[k]) * b.h;
          const double w = std::min(alo + ha, blo + b.h) - std::max(alo, blo);
          vol *= std::max(w, 0.0);
        }
        total += vol;
      }
  return total;
}

}  // namespace

double symmetric_difference_measure(const PixelSet& a, const PixelSet& b) {
  if (a.dim != b.dim) throw std::invalid_argument("symmetric difference: dimension mismatch");
  double inter = 0.0;
  if (a.h == b.h) {
    // Aligned grids: intersection is a plain sorted merge.
    std::size_t i = 0, j = 0;
    LexLess less;
    while (i < a.cells.size() && j < b.cells.size()) {
      if (less(a.cells[i], b.cells[j]))
        ++i;
      else if (less(b.cells[j], a.cells[i]))
        ++j;
      else {
        inter += 1.0;
        ++i;
        ++j;
      }
    }
    inter *= std::pow(a.h, a.dim);
  } else {
    const bool a_coarser = a.h >= b.h;
    const PixelSet& outer = a_coarser ? a : b;
    const PixelSet& fine = a_coarser ? b : a;
    for (const auto& c : outer.cells) inter += overlap_with_set(c, outer.h, fine, a.dim);
  }
  return a.measure() + b.measure() - 2.0 * inter;
}

}  // namespace riesz
