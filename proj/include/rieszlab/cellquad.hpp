#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "rieszlab/geometry.hpp"
#include "rieszlab/grid.hpp"

namespace riesz {

// Pair weights W(c) = integral over a cell pair at offset c of |x - y|^-alpha,
// normalized so that sums of W over cell pairs approximate the double integral
// of the kernel against the two indicator (or density) factors.
//
// Three zones, switched on the Chebyshev radius of the offset:
//   * |c|_inf <= exact_radius: exact correlation integrals. The pair integral
//     equals the integral of K(|z|) against the tensor hat function centered
//     at c*h, computed by adaptive panels with the radial singularity at the
//     origin summed in closed form over a self-similar dyadic decomposition.
//   * beyond: midpoint rule h^(2d) K(c*h), plus h^2 and h^4 moment
//     corrections when `corrected` is set.
// Offsets whose cell pair straddles a keep_min/keep_max cutoff are resolved
// by sub-cell subdivision so truncated sums converge at the same rate as the
// bulk. Weights depend only on the offset, so direct and FFT summation paths
// agree to rounding.
struct PairWeightSpec {
  int dim = 1;
  double h = 1.0;
  double alpha = 0.0;  // kernel exponent; any alpha < dim + 2 whose kept pairs are integrable
  double keep_min = 0.0;                                      // drop pairs with center distance < keep_min
  double keep_max = std::numeric_limits<double>::infinity();  // ... or >= keep_max
  int exact_radius = 6;
  int subdivision = 4;  // sub-cells per axis at truncation boundaries
  bool corrected = true;
  // Cross sums of disjoint sets never pair a cell with itself; setting this
  // makes the zero offset weigh 0 so FFT correlation roundoff there cannot
  // request a divergent self integral.
  bool skip_zero = false;
};

class PairWeights {
 public:
  explicit PairWeights(const PairWeightSpec& spec);

  // Weight for the ordered cell pair (i, i + c). Not thread safe: straddle
  // offsets are cached lazily.
  double operator()(const Cell& c) const;

  const PairWeightSpec& spec() const { return spec_; }

  // Exact-zone value bypassing keep cutoffs, for diagnostics and tests.
  double exact_weight(const Cell& c) const;
  // Far-zone midpoint (+ correction) value, for tests.
  double far_weight(const Cell& c) const;

 private:
  double straddle_weight(const Cell& c) const;
  bool kept(double center_dist) const;

  PairWeightSpec spec_;
  // Weights are invariant under coordinate permutations and sign flips, so
  // caches key on the sorted absolute offset. Lazy, hence not thread safe.
  mutable std::map<std::int64_t, double> exact_;
  mutable std::map<std::int64_t, double> straddle_;
};

// Integral of |z|^-alpha against the tensor hat
// prod_k (h - |z_k - c_k h|)_+ over R^d, which is the exact cell-pair
// integral at offset c. Exposed for oracle tests against closed forms.
double hat_kernel_integral(int dim, double h, double alpha, const Cell& c);

// Sum over all ordered cell pairs (including i == j, subject to keep rules)
// of W(c_j - c_i). PixelSet overload weighs every pair by 1; field overloads
// weigh by the cell values.
double pair_sum(const PixelSet& cells, const PairWeights& w);
double pair_sum(const ScalarField& f, const PairWeights& w);
// Sum over ordered pairs (i in a, j in b) of a_i b_j W(c_j - c_i); fields
// must share h and dim but may have different windows.
double cross_sum(const ScalarField& a, const ScalarField& b, const PairWeights& w);

// FFT-accelerated equivalents (identical weights, same results to rounding).
double pair_sum_fft(const ScalarField& f, const PairWeights& w);
double cross_sum_fft(const ScalarField& a, const ScalarField& b, const PairWeights& w);

// Size-based dispatch between the direct and FFT paths.
double pair_sum_auto(const ScalarField& f, const PairWeights& w);

// Discrete convolution r_i = sum_j f_j W(c_j - c_i) evaluated over the window
// of f itself (FFT path). Used for first-variation fields and descent.
ScalarField convolve(const ScalarField& f, const PairWeights& w);

}  // namespace riesz
