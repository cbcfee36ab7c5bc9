#include "rieszlab/continuum_energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rieszlab/constants.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/gauss.hpp"
#include "rieszlab/summation.hpp"

namespace riesz {
namespace {

// Box complements decompose into half-spaces, quadrant wedges and (in 3d)
// corner octants by inclusion-exclusion. Their kernel integrals against each
// cell of E give the tail of the perimeter outside any finite window exactly,
// so no distance truncation enters the fractional perimeter at all.

double lbeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16, kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double reg_inc_beta(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// Integral of (1 + |v|^2)^(-alpha/2) over R^m, the constant that integrates
// transverse directions out of a half-space kernel integral.
double kappa(int m, double alpha) {
  if (m == 0) return 1.0;
  return std::pow(kPi, 0.5 * m) *
         std::exp(std::lgamma(0.5 * (alpha - m)) - std::lgamma(0.5 * alpha));
}

// Quadrant tail: integral of |v|^-(sigma+2) over {v1 > a, v2 > b}, a, b > 0.
// Polar angle integrals reduce to incomplete beta functions.
double quadrant_tail(double a, double b, double sigma, double beta_norm) {
  const double p = 0.5 * (sigma + 1.0);
  const double r2 = a * a + b * b;
  const double ta = std::pow(a, -sigma) * reg_inc_beta(a * a / r2, p, 0.5);
  const double tb = std::pow(b, -sigma) * reg_inc_beta(b * b / r2, p, 0.5);
  return beta_norm * (ta + tb) / (2.0 * sigma);
}

// Octant tail: integral of |v|^-alpha over {v_k > t_k}, t_k > 0, alpha > 3.
// Mapped to the unit cube by v_k = t_k / u_k and integrated by tensor GL.
double octant_tail(const double t[3], double alpha) {
  const GaussLegendre& gl = gauss_legendre(8);
  KahanSum sum;
  for (std::size_t i = 0; i < gl.x.size(); ++i)
    for (std::size_t j = 0; j < gl.x.size(); ++j)
      for (std::size_t k = 0; k < gl.x.size(); ++k) {
        const double u[3] = {0.5 + 0.5 * gl.x[i], 0.5 + 0.5 * gl.x[j], 0.5 + 0.5 * gl.x[k]};
        const double wq = 0.125 * gl.w[i] * gl.w[j] * gl.w[k];
        double r2 = 0.0, jac = 1.0;
        for (int m = 0; m < 3; ++m) {
          const double v = t[m] / u[m];
          r2 += v * v;
          jac *= v / u[m];
        }
        sum.add(wq * jac * std::pow(r2, -0.5 * alpha));
      }
  return sum.value();
}

// Physical coordinates of the padded window faces.
struct OutFaces {
  double lo[3] = {0.0, 0.0, 0.0};
  double hi[3] = {0.0, 0.0, 0.0};
};

constexpr int kOutPad = 2;

OutFaces padded_faces(const PixelSet& set, int pad) {
  OutFaces f;
  for (int k = 0; k < set.dim; ++k) {
    std::int64_t lo = set.cells.front()[static_cast<std::size_t>(k)];
    std::int64_t hi = lo;
    for (const Cell& c : set.cells) {
      lo = std::min(lo, c[static_cast<std::size_t>(k)]);
      hi = std::max(hi, c[static_cast<std::size_t>(k)]);
    }
    f.lo[k] = static_cast<double>(lo - pad) * set.h;
    f.hi[k] = static_cast<double>(hi + 1 + pad) * set.h;
  }
  return f;
}

// Field of ones on the padded window with E's cells cleared: the part of the
// complement that is summed cell pair by cell pair.
ScalarField complement_field(const PixelSet& set, int pad) {
  ScalarField f;
  f.dim = set.dim;
  f.h = set.h;
  for (int k = 0; k < set.dim; ++k) {
    std::int64_t lo = set.cells.front()[static_cast<std::size_t>(k)];
    std::int64_t hi = lo;
    for (const Cell& c : set.cells) {
      lo = std::min(lo, c[static_cast<std::size_t>(k)]);
      hi = std::max(hi, c[static_cast<std::size_t>(k)]);
    }
    f.origin[static_cast<std::size_t>(k)] = lo - pad;
    f.shape[static_cast<std::size_t>(k)] = hi - lo + 1 + 2 * pad;
  }
  f.values.assign(f.size(), 1.0);
  for (const Cell& c : set.cells) f.values[f.index(c)] = 0.0;
  return f;
}

std::size_t nonzero_count(const ScalarField& f) {
  std::size_t n = 0;
  for (double v : f.values)
    if (v != 0.0) ++n;
  return n;
}

double cross_sum_auto(const ScalarField& a, const ScalarField& b, const PairWeights& w) {
  if (nonzero_count(a) <= 2048 && nonzero_count(b) <= 2048) return cross_sum(a, b, w);
  return cross_sum_fft(a, b, w);
}

// Kernel integral of E against everything outside the padded window:
// half-space terms are exact per cell, wedge terms integrate the quadrant
// tail over each cell by tensor GL, corner terms likewise in 3d.
double outside_tail(int d, double sigma, const PixelSet& set, const OutFaces& faces,
                    int wedge_gl) {
  const double alpha = static_cast<double>(d) + sigma;
  const double h = set.h;
  const double kap_half = kappa(d - 1, alpha);
  const double beta_norm = std::exp(lbeta(0.5 * (sigma + 1.0), 0.5));
  const GaussLegendre& gl = gauss_legendre(wedge_gl);

  KahanSum halves, wedges, corners;
  for (const Cell& cell : set.cells) {
    double xl[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) xl[k] = static_cast<double>(cell[static_cast<std::size_t>(k)]) * h;

    // Gap from this cell to each window face, by axis and side.
    double gap[3][2];
    for (int k = 0; k < d; ++k) {
      gap[k][0] = xl[k] - faces.lo[k];
      gap[k][1] = faces.hi[k] - xl[k] - h;
    }

    for (int k = 0; k < d; ++k)
      for (int side = 0; side < 2; ++side) {
        const double tmin = gap[k][side];
        halves.add(std::pow(tmin + h, 1.0 - sigma) - std::pow(tmin, 1.0 - sigma));
      }

    for (int k1 = 0; k1 < d; ++k1)
      for (int k2 = k1 + 1; k2 < d; ++k2)
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2) {
            const double g1 = gap[k1][s1], g2 = gap[k2][s2];
            double acc = 0.0;
            for (std::size_t i = 0; i < gl.x.size(); ++i)
              for (std::size_t j = 0; j < gl.x.size(); ++j) {
                const double u1 = g1 + h * (0.5 + 0.5 * gl.x[i]);
                const double u2 = g2 + h * (0.5 + 0.5 * gl.x[j]);
                acc += 0.25 * gl.w[i] * gl.w[j] * quadrant_tail(u1, u2, sigma, beta_norm);
              }
            wedges.add(acc * h * h);
          }

    if (d == 3) {
      const GaussLegendre& g4 = gauss_legendre(4);
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
          for (int s3 = 0; s3 < 2; ++s3) {
            double acc = 0.0;
            for (std::size_t i = 0; i < g4.x.size(); ++i)
              for (std::size_t j = 0; j < g4.x.size(); ++j)
                for (std::size_t k = 0; k < g4.x.size(); ++k) {
                  const double t[3] = {gap[0][s1] + h * (0.5 + 0.5 * g4.x[i]),
                                       gap[1][s2] + h * (0.5 + 0.5 * g4.x[j]),
                                       gap[2][s3] + h * (0.5 + 0.5 * g4.x[k])};
                  acc += 0.125 * g4.w[i] * g4.w[j] * g4.w[k] * octant_tail(t, alpha);
                }
            corners.add(acc * h * h * h);
          }
    }
  }

  const double half_sum = kap_half * std::pow(h, d - 1) / (sigma * (1.0 - sigma)) * halves.value();
  const double wedge_sum = (d >= 2 ? kappa(d - 2, alpha) * std::pow(h, d - 2) : 0.0) * wedges.value();
  return half_sum - wedge_sum + corners.value();
}

int exact_radius_of(const QuadratureSpec& quad) {
  return std::max(1, static_cast<int>(std::llround(quad.diagonal_radius)));
}

PairWeightSpec base_spec(int d, double h, double alpha, const QuadratureSpec& quad) {
  PairWeightSpec spec;
  spec.dim = d;
  spec.h = h;
  spec.alpha = alpha;
  spec.exact_radius = exact_radius_of(quad);
  spec.subdivision = quad.subdivision;
  return spec;
}

void check_dim(int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("d must be 1, 2 or 3");
}

double confinement_integral(const ConfinementSpec& g, const DensityField& rho) {
  const double cell_vol = std::pow(rho.h, rho.dim);
  KahanSum sum;
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    if (rho.values[i] == 0.0) continue;
    sum.add(g(cell_center(rho.cell_at(i), rho.h, rho.dim)) * rho.values[i]);
  }
  return sum.value() * cell_vol;
}

double fractional_perimeter_impl(int d, double sigma, const PixelSet& set, int exact_radius,
                                 int subdivision, int wedge_gl) {
  const DensityField inside = indicator_field(set);
  const ScalarField outside = complement_field(set, kOutPad);
  PairWeightSpec spec;
  spec.dim = d;
  spec.h = set.h;
  spec.alpha = static_cast<double>(d) + sigma;
  spec.exact_radius = exact_radius;
  spec.subdivision = subdivision;
  spec.skip_zero = true;
  PairWeights w(spec);
  const double near = cross_sum_auto(inside, outside, w);
  const double tail = outside_tail(d, sigma, set, padded_faces(set, kOutPad), wedge_gl);
  return near + tail;
}

// Largest pairwise distance between points of the set, bounded above through
// cell centers of the boundary cells plus the cell diagonal.
double diameter_bound(const PixelSet& set) {
  std::vector<Cell> boundary;
  for (const Cell& c : set.cells) {
    bool interior = true;
    for (int k = 0; k < set.dim && interior; ++k)
      for (int s = -1; s <= 1 && interior; s += 2) {
        Cell n = c;
        n[static_cast<std::size_t>(k)] += s;
        if (!set.contains(n)) interior = false;
      }
    if (!interior) boundary.push_back(c);
  }
  if (boundary.empty()) boundary = set.cells;
  double best2 = 0.0;
  for (std::size_t i = 0; i < boundary.size(); ++i)
    for (std::size_t j = i + 1; j < boundary.size(); ++j) {
      double r2 = 0.0;
      for (int k = 0; k < set.dim; ++k) {
        const double t = static_cast<double>(boundary[i][static_cast<std::size_t>(k)] -
                                             boundary[j][static_cast<std::size_t>(k)]);
        r2 += t * t;
      }
      best2 = std::max(best2, r2);
    }
  return (std::sqrt(best2) + std::sqrt(static_cast<double>(set.dim))) * set.h;
}

struct P0Profile {
  std::vector<double> values;
  double diameter = 0.0;
};

P0Profile p0_profile_impl(int d, const PixelSet& set, const std::vector<double>& R_list,
                          const QuadratureSpec& quad) {
  check_dim(d);
  if (set.dim != d) throw std::invalid_argument("set dimension mismatch");
  P0Profile out;
  if (set.cells.empty()) {
    out.values.assign(R_list.size(), 0.0);
    return out;
  }
  for (std::size_t i = 0; i + 1 < R_list.size(); ++i)
    if (!(R_list[i] < R_list[i + 1]))
      throw std::invalid_argument("R_list must be strictly increasing");
  const double h = set.h;
  out.diameter = diameter_bound(set);
  const DensityField inside = indicator_field(set);
  const double measure = set.measure();
  const double shell_rate = static_cast<double>(d) * unit_ball_volume(d);

  for (double R : R_list) {
    if (!(R > 2.0 * std::sqrt(static_cast<double>(d)) * h))
      throw ResolutionTooCoarse("window radius must exceed a few cells");
    const int pad = static_cast<int>(std::ceil(R / h)) + 2;

    PairWeightSpec cross_spec = base_spec(d, h, static_cast<double>(d), quad);
    cross_spec.keep_max = R;
    cross_spec.skip_zero = true;
    PairWeights w_cross(cross_spec);
    const double cross = cross_sum_auto(inside, complement_field(set, pad), w_cross);

    double self = 0.0;
    if (R <= out.diameter) {
      PairWeightSpec self_spec = base_spec(d, h, static_cast<double>(d), quad);
      self_spec.keep_min = R;
      PairWeights w_self(self_spec);
      self = pair_sum_auto(inside, w_self);
    }
    out.values.push_back(cross - self - measure * shell_rate * std::log(R));
  }
  return out;
}

struct P0Value {
  double value = 0.0;
  double spread = 0.0;
};

P0Value p0_value(int d, const PixelSet& set, const std::vector<double>& R_list,
                 const QuadratureSpec& quad) {
  P0Profile profile = p0_profile_impl(d, set, R_list, quad);
  if (set.cells.empty()) return {};
  std::vector<double> plateau;
  for (std::size_t i = 0; i < R_list.size(); ++i)
    if (R_list[i] > profile.diameter) plateau.push_back(profile.values[i]);
  if (plateau.size() < 2)
    throw NoPlateau("need at least two window radii beyond the set diameter");
  const double lo = *std::min_element(plateau.begin(), plateau.end());
  const double hi = *std::max_element(plateau.begin(), plateau.end());
  const double tol = (d == 3 ? 3e-4 : 1e-6) * std::max(1.0, std::abs(plateau.front()));
  if (hi - lo > tol) throw NoPlateau("window values disagree beyond the set diameter");
  return {plateau.front(), hi - lo};
}

}  // namespace

double riesz_energy(int d, double sigma, const DensityField& rho, const QuadratureSpec& quad) {
  check_dim(d);
  if (!(sigma > -static_cast<double>(d) && sigma < 0.0))
    throw NonIntegrableSigma("riesz_energy needs sigma in (-d, 0)");
  if (rho.dim != d) throw std::invalid_argument("density dimension mismatch");
  PairWeights w(base_spec(d, rho.h, static_cast<double>(d) + sigma, quad));
  return -pair_sum_auto(rho, w);
}

double riesz_energy_confined(int d, double sigma, const DensityField& rho,
                             const ConfinementSpec& g, const QuadratureSpec& quad) {
  return riesz_energy(d, sigma, rho, quad) + confinement_integral(g, rho);
}

double j_truncated(int d, double sigma, const PixelSet& set, double r,
                   const QuadratureSpec& quad) {
  check_dim(d);
  if (!(sigma >= 0.0 && sigma < 1.0))
    throw SigmaOutOfRange("truncated energy needs sigma in [0, 1)");
  if (set.dim != d) throw std::invalid_argument("set dimension mismatch");
  if (!(r > 2.0 * set.h))
    throw ResolutionTooCoarse("truncation radius must exceed two cells");
  if (set.cells.empty()) return 0.0;
  PairWeightSpec spec = base_spec(d, set.h, static_cast<double>(d) + sigma, quad);
  spec.keep_min = r;
  PairWeights w(spec);
  return -pair_sum_auto(indicator_field(set), w);
}

double j_renormalized(int d, double sigma, const PixelSet& set, double r,
                      const QuadratureSpec& quad) {
  return j_truncated(d, sigma, set, r, quad) - gamma_r_sigma(d, sigma, r) * set.measure();
}

double fractional_perimeter(int d, double sigma, const PixelSet& set,
                            const QuadratureSpec& quad) {
  check_dim(d);
  if (!(sigma > 0.0 && sigma < 1.0))
    throw SigmaOutOfRange("fractional perimeter needs sigma in (0, 1)");
  if (set.dim != d) throw std::invalid_argument("set dimension mismatch");
  if (set.cells.empty()) return 0.0;
  return fractional_perimeter_impl(d, sigma, set, exact_radius_of(quad), quad.subdivision, 6);
}

QuadValue fractional_perimeter_report(int d, double sigma, const PixelSet& set,
                                      const QuadratureSpec& quad) {
  const double value = fractional_perimeter(d, sigma, set, quad);
  if (set.cells.empty()) return {};
  const int radius = exact_radius_of(quad);
  const double alt =
      fractional_perimeter_impl(d, sigma, set, std::max(2, radius - 2), quad.subdivision, 4);
  const double error = std::max(std::abs(value - alt), 1e-13 * std::abs(value));
  return {value, error};
}

double p0_perimeter(int d, const PixelSet& set, const std::vector<double>& R_list,
                    const QuadratureSpec& quad) {
  return p0_value(d, set, R_list, quad).value;
}

QuadValue p0_perimeter_report(int d, const PixelSet& set, const std::vector<double>& R_list,
                              const QuadratureSpec& quad) {
  P0Value v = p0_value(d, set, R_list, quad);
  return {v.value, std::max(v.spread, 1e-13 * std::abs(v.value))};
}

std::vector<double> p0_profile(int d, const PixelSet& set, const std::vector<double>& R_list,
                               const QuadratureSpec& quad) {
  return p0_profile_impl(d, set, R_list, quad).values;
}

ScalarField first_variation_residual(int d, double sigma, const DensityField& rho,
                                     const ConfinementSpec& g, const QuadratureSpec& quad) {
  check_dim(d);
  if (!(sigma > -static_cast<double>(d) && sigma < 0.0))
    throw NonIntegrableSigma("first variation needs sigma in (-d, 0)");
  if (rho.dim != d) throw std::invalid_argument("density dimension mismatch");
  PairWeights w(base_spec(d, rho.h, static_cast<double>(d) + sigma, quad));
  ScalarField conv = convolve(rho, w);
  const double inv_vol = 1.0 / std::pow(rho.h, d);
  ScalarField res = conv;
  for (std::size_t i = 0; i < res.values.size(); ++i)
    res.values[i] = g(cell_center(res.cell_at(i), rho.h, d)) - 2.0 * conv.values[i] * inv_vol;
  return res;
}

double kkt_violation(const DensityField& rho, const ScalarField& residual, double active_tol) {
  if (rho.values.size() != residual.values.size())
    throw std::invalid_argument("residual window mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    const double v = rho.values[i];
    const double r = residual.values[i];
    double violation;
    if (v <= active_tol)
      violation = std::max(0.0, -r);
    else if (v >= 1.0 - active_tol)
      violation = std::max(0.0, r);
    else
      violation = std::abs(r);
    worst = std::max(worst, violation);
  }
  return worst;
}

}  // namespace riesz
