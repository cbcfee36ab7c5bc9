#include "rieszlab/cellquad.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rieszlab/gauss.hpp"
#include "rieszlab/summation.hpp"

namespace riesz {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

constexpr int kGlNodes = 16;

// ---------------------------------------------------------------------------
// 1d closed forms: integral of (A + B t) t^-alpha over [a, b], 0 <= a < b.

double seg_integral(double A, double B, double alpha, double a, double b) {
  double out = 0.0;
  if (A != 0.0) {
    if (alpha == 1.0) {
      if (a <= 0.0) throw std::invalid_argument("divergent cell pair integral");
      out += A * std::log(b / a);
    } else {
      double e = 1.0 - alpha;
      if (a <= 0.0 && e < 0.0) throw std::invalid_argument("divergent cell pair integral");
      out += A * (std::pow(b, e) - (a > 0.0 ? std::pow(a, e) : 0.0)) / e;
    }
  }
  if (B != 0.0) {
    if (alpha == 2.0) {
      if (a <= 0.0) throw std::invalid_argument("divergent cell pair integral");
      out += B * std::log(b / a);
    } else {
      double e = 2.0 - alpha;
      if (a <= 0.0 && e < 0.0) throw std::invalid_argument("divergent cell pair integral");
      out += B * (std::pow(b, e) - (a > 0.0 ? std::pow(a, e) : 0.0)) / e;
    }
  }
  return out;
}

// Exact windowed hat integral in one dimension:
//   int over {lo <= |t| < hi} of (h - |t - c h|)_+ |t|^-alpha dt.
double hat_window_1d(double h, double alpha, std::int64_t c, double lo, double hi) {
  const double ch = static_cast<double>(c) * h;
  // Hat pieces as (A + B t) over [t0, t1].
  struct Piece {
    double t0, t1, A, B;
  };
  const Piece pieces[2] = {{ch - h, ch, h - ch, 1.0}, {ch, ch + h, h + ch, -1.0}};
  double out = 0.0;
  for (const Piece& p : pieces) {
    // Positive t part: [t0, t1] cap [lo, hi).
    double a = std::max(p.t0, lo);
    double b = std::min(p.t1, hi);
    if (b > a && b > 0.0) out += seg_integral(p.A, p.B, alpha, std::max(a, 0.0), b);
    // Negative t part via u = -t: [t0, t1] cap [-hi, -lo].
    double ua = std::max(-p.t1, lo);
    double ub = std::min(-p.t0, hi);
    if (ub > ua && ub > 0.0) out += seg_integral(p.A, -p.B, alpha, std::max(ua, 0.0), ub);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multilinear corner sums: J(U) = int over the unit box of
// |z|^-alpha prod_{k in U} |z_k| dz, by exact dyadic self-similarity. The
// shell integral (unit box minus its half) is smooth and done by tensor GL
// over the "first axis past 1/2" decomposition of the positive octant.

double shell_sym(int d, double alpha, unsigned mask) {
  const GaussLegendre& gl = gauss_legendre(kGlNodes);
  KahanSum total;
  // Positive octant shell: union over lead axis k of
  //   {z_k in (1/2, 1], z_j in [0, 1/2] for j < k, z_m in [0, 1] for m > k}.
  for (int lead = 0; lead < d; ++lead) {
    double lo[3] = {0.0, 0.0, 0.0}, hi[3] = {1.0, 1.0, 1.0};
    for (int k = 0; k < d; ++k) {
      if (k == lead) {
        lo[k] = 0.5;
        hi[k] = 1.0;
      } else if (k < lead) {
        lo[k] = 0.0;
        hi[k] = 0.5;
      }
    }
    int n[3];
    for (int k = 0; k < 3; ++k) n[k] = k < d ? kGlNodes : 1;
    for (int i2 = 0; i2 < n[2]; ++i2)
      for (int i1 = 0; i1 < n[1]; ++i1)
        for (int i0 = 0; i0 < n[0]; ++i0) {
          int idx[3] = {i0, i1, i2};
          double z[3] = {0.0, 0.0, 0.0};
          double wq = 1.0;
          for (int k = 0; k < d; ++k) {
            double half = 0.5 * (hi[k] - lo[k]);
            z[k] = 0.5 * (lo[k] + hi[k]) + half * gl.x[static_cast<std::size_t>(idx[k])];
            wq *= half * gl.w[static_cast<std::size_t>(idx[k])];
          }
          double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
          double f = std::pow(r2, -0.5 * alpha);
          for (int k = 0; k < d; ++k)
            if (mask & (1u << k)) f *= z[k];
          total.add(wq * f);
        }
  }
  return std::ldexp(total.value(), d);  // octant -> full box by symmetry
}

// J(U) constants for every U subset, for one (d, alpha).
struct CornerTable {
  int d = 0;
  double alpha = 0.0;
  std::array<double, 8> j{};  // index = axis mask

  static CornerTable make(int d, double alpha) {
    CornerTable t;
    t.d = d;
    t.alpha = alpha;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      double p = static_cast<double>(d) - alpha + static_cast<double>(__builtin_popcount(mask));
      if (p <= 0.0) {
        t.j[mask] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      t.j[mask] = shell_sym(d, alpha, mask) / (1.0 - std::exp2(-p));
    }
    return t;
  }
};

// ---------------------------------------------------------------------------
// Exact hat-weighted kernel integrals for one offset (sorted absolute parts).

using AbsOffset = std::array<std::int64_t, 3>;

double tensor_hat_gl(int d, double h, double alpha, const AbsOffset& a,
                     const std::array<std::vector<double>, 3>& breaks) {
  const GaussLegendre& gl = gauss_legendre(kGlNodes);
  KahanSum total;
  // Iterate tensor products of per-axis panels.
  std::array<std::size_t, 3> np{1, 1, 1};
  for (int k = 0; k < d; ++k) np[static_cast<std::size_t>(k)] = breaks[static_cast<std::size_t>(k)].size() - 1;
  for (std::size_t p2 = 0; p2 < np[2]; ++p2)
    for (std::size_t p1 = 0; p1 < np[1]; ++p1)
      for (std::size_t p0 = 0; p0 < np[0]; ++p0) {
        std::size_t pidx[3] = {p0, p1, p2};
        double plo[3] = {0.0, 0.0, 0.0}, phi[3] = {0.0, 0.0, 0.0};
        bool empty = false;
        for (int k = 0; k < d; ++k) {
          plo[k] = breaks[static_cast<std::size_t>(k)][pidx[k]];
          phi[k] = breaks[static_cast<std::size_t>(k)][pidx[k] + 1];
          if (!(phi[k] > plo[k])) empty = true;
        }
        if (empty) continue;
        int n[3];
        for (int k = 0; k < 3; ++k) n[k] = k < d ? kGlNodes : 1;
        for (int i2 = 0; i2 < n[2]; ++i2)
          for (int i1 = 0; i1 < n[1]; ++i1)
            for (int i0 = 0; i0 < n[0]; ++i0) {
              int idx[3] = {i0, i1, i2};
              double z[3] = {0.0, 0.0, 0.0};
              double wq = 1.0;
              double hat = 1.0;
              for (int k = 0; k < d; ++k) {
                double half = 0.5 * (phi[k] - plo[k]);
                z[k] = 0.5 * (plo[k] + phi[k]) + half * gl.x[static_cast<std::size_t>(idx[k])];
                wq *= half * gl.w[static_cast<std::size_t>(idx[k])];
                hat *= std::max(0.0, h - std::abs(z[k] - static_cast<double>(a[static_cast<std::size_t>(k)]) * h));
              }
              double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
              total.add(wq * hat * std::pow(r2, -0.5 * alpha));
            }
      }
  return total.value();
}

// Offsets whose support excludes the origin: GL panels split at hat apexes,
// refined once more for close offsets where the kernel varies fastest.
double regular_weight(int d, double h, double alpha, const AbsOffset& a) {
  std::int64_t amax = 0;
  for (int k = 0; k < d; ++k) amax = std::max(amax, a[static_cast<std::size_t>(k)]);
  std::array<std::vector<double>, 3> breaks;
  for (int k = 0; k < d; ++k) {
    double c = static_cast<double>(a[static_cast<std::size_t>(k)]) * h;
    std::vector<double>& b = breaks[static_cast<std::size_t>(k)];
    if (amax <= 3) {
      b = {c - h, c - 0.5 * h, c, c + 0.5 * h, c + h};
    } else {
      b = {c - h, c, c + h};
    }
  }
  return tensor_hat_gl(d, h, alpha, a, breaks);
}

// Offsets touching the origin (all |c_k| <= 1, d >= 2): the corner box of
// half-width h/2 is summed in closed form over the dyadic multilinear
// expansion; the rest of the support is regular GL panels.
double singular_weight(int d, double h, double alpha, const AbsOffset& a,
                       const CornerTable& corner) {
  unsigned M = 0;
  int m = 0;
  for (int k = 0; k < d; ++k)
    if (a[static_cast<std::size_t>(k)] == 1) {
      M |= 1u << k;
      ++m;
    }
  if (!(alpha < static_cast<double>(d + m)))
    throw std::invalid_argument("divergent cell pair integral");

  const double delta = 0.5 * h;
  // Corner box: T(z) = prod_{k in M} |z_k| * prod_{k notin M} (h - |z_k|)
  // expanded into monomials, each integrating to a power of delta times a
  // J(U) constant (restricted to the touching orthant on M axes).
  const unsigned Mc = ((1u << d) - 1u) & ~M;
  KahanSum corner_sum;
  for (unsigned S = 0;; S = (S - Mc) & Mc) {
    // S runs over subsets of Mc (standard subset-enumeration trick).
    unsigned U = M | S;
    int sbits = __builtin_popcount(S);
    int mcbits = __builtin_popcount(Mc);
    double p = static_cast<double>(d) - alpha + static_cast<double>(__builtin_popcount(U));
    double term = ((sbits % 2) ? -1.0 : 1.0) * std::pow(h, mcbits - sbits) *
                  std::pow(delta, p) * corner.j[U] / std::ldexp(1.0, m);
    corner_sum.add(term);
    if (S == Mc) break;
  }

  // Remainder: support minus the corner box.
  std::array<std::vector<double>, 3> breaks;
  std::array<std::vector<bool>, 3> inner;
  for (int k = 0; k < d; ++k) {
    double c = static_cast<double>(a[static_cast<std::size_t>(k)]) * h;
    double lo = c - h, hi = c + h;
    std::vector<double> pts = {lo, hi, c, -delta, delta, 0.0};
    std::sort(pts.begin(), pts.end());
    std::vector<double>& b = breaks[static_cast<std::size_t>(k)];
    for (double t : pts) {
      if (t < lo - 1e-14 * h || t > hi + 1e-14 * h) continue;
      if (!b.empty() && t - b.back() < 1e-14 * h) continue;
      b.push_back(t);
    }
    inner[static_cast<std::size_t>(k)].resize(b.size() - 1);
    for (std::size_t p = 0; p + 1 < b.size(); ++p)
      inner[static_cast<std::size_t>(k)][p] = b[p] >= -delta - 1e-14 * h && b[p + 1] <= delta + 1e-14 * h;
  }

  const GaussLegendre& gl = gauss_legendre(kGlNodes);
  KahanSum rem;
  std::array<std::size_t, 3> np{1, 1, 1};
  for (int k = 0; k < d; ++k) np[static_cast<std::size_t>(k)] = breaks[static_cast<std::size_t>(k)].size() - 1;
  for (std::size_t p2 = 0; p2 < np[2]; ++p2)
    for (std::size_t p1 = 0; p1 < np[1]; ++p1)
      for (std::size_t p0 = 0; p0 < np[0]; ++p0) {
        std::size_t pidx[3] = {p0, p1, p2};
        bool all_inner = true;
        for (int k = 0; k < d; ++k) all_inner = all_inner && inner[static_cast<std::size_t>(k)][pidx[static_cast<std::size_t>(k)]];
        if (all_inner) continue;
        double plo[3], phi[3];
        for (int k = 0; k < d; ++k) {
          plo[k] = breaks[static_cast<std::size_t>(k)][pidx[static_cast<std::size_t>(k)]];
          phi[k] = breaks[static_cast<std::size_t>(k)][pidx[static_cast<std::size_t>(k)] + 1];
        }
        int n[3];
        for (int k = 0; k < 3; ++k) n[k] = k < d ? kGlNodes : 1;
        for (int i2 = 0; i2 < n[2]; ++i2)
          for (int i1 = 0; i1 < n[1]; ++i1)
            for (int i0 = 0; i0 < n[0]; ++i0) {
              int idx[3] = {i0, i1, i2};
              double z[3] = {0.0, 0.0, 0.0};
              double wq = 1.0;
              double hat = 1.0;
              for (int k = 0; k < d; ++k) {
                double half = 0.5 * (phi[k] - plo[k]);
                z[k] = 0.5 * (plo[k] + phi[k]) + half * gl.x[static_cast<std::size_t>(idx[k])];
                wq *= half * gl.w[static_cast<std::size_t>(idx[k])];
                hat *= std::max(0.0, h - std::abs(z[k] - static_cast<double>(a[static_cast<std::size_t>(k)]) * h));
              }
              double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
              rem.add(wq * hat * std::pow(r2, -0.5 * alpha));
            }
      }
  return corner_sum.value() + rem.value();
}

// ---------------------------------------------------------------------------
// Far zone: two-point midpoint rule with 4th and 6th order moment
// corrections of the radial kernel.

double far_weight_impl(int d, double h, double alpha, const AbsOffset& a, bool corrected) {
  double r2 = 0.0, s4num = 0.0;
  for (int k = 0; k < d; ++k) {
    double t = static_cast<double>(a[static_cast<std::size_t>(k)]) * h;
    r2 += t * t;
    s4num += t * t * t * t;
  }
  const double K = std::pow(r2, -0.5 * alpha);
  double w = K;
  if (corrected) {
    const double dd = static_cast<double>(d);
    const double lap = alpha * (alpha + 2.0 - dd) * K / r2;
    const double bilap = alpha * (alpha + 2.0 - dd) * (alpha + 2.0) * (alpha + 4.0 - dd) * K / (r2 * r2);
    const double S4 = s4num / (r2 * r2);
    const double sum4 = alpha * (alpha + 2.0) * (K / (r2 * r2)) *
                        ((alpha + 1.0) * (alpha + 3.0) * S4 - 6.0 * (alpha + 1.0) * (1.0 - S4) +
                         3.0 * (dd - 6.0 + 5.0 * S4));
    w += (h * h / 12.0) * lap + h * h * h * h * (bilap / 288.0 - sum4 / 1440.0);
  }
  return std::pow(h, 2 * d) * w;
}

// ---------------------------------------------------------------------------
// Windowed (straddle) weights.

// d = 2: exact angular integration of the tensor hat over circles, spectral
// GL in the radius between kink radii.
double polar_window_2d(double h, double alpha, const AbsOffset& a, double lo, double hi) {
  const double cx = static_cast<double>(a[0]) * h;
  const double cy = static_cast<double>(a[1]) * h;
  const double knx[3] = {cx - h, cx, cx + h};
  const double kny[3] = {cy - h, cy, cy + h};

  double gapx = std::max(0.0, (std::abs(static_cast<double>(a[0])) - 1.0)) * h;
  double gapy = std::max(0.0, (std::abs(static_cast<double>(a[1])) - 1.0)) * h;
  const double rmin = std::hypot(gapx, gapy);
  const double rmax = std::hypot(cx + h, cy + h);
  double r0 = std::max(lo, rmin);
  double r1 = std::min(hi, rmax);
  if (!(r1 > r0)) return 0.0;

  // Angular profile of the tensor hat at radius rho, integrated exactly arc
  // by arc between piece changes.
  auto angular = [&](double rho) {
    std::vector<double> ev;
    ev.reserve(16);
    ev.push_back(0.0);
    ev.push_back(kTwoPi);
    for (double k : knx) {
      if (std::abs(k) < rho) {
        double t = std::acos(k / rho);
        ev.push_back(t);
        ev.push_back(kTwoPi - t);
      }
    }
    for (double k : kny) {
      if (std::abs(k) < rho) {
        double t = std::asin(k / rho);
        if (t < 0.0) t += kTwoPi;
        ev.push_back(t);
        double u = 3.14159265358979323846 - std::asin(k / rho);
        if (u < 0.0) u += kTwoPi;
        ev.push_back(u);
      }
    }
    std::sort(ev.begin(), ev.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
      double ta = ev[i], tb = ev[i + 1];
      if (!(tb > ta + 1e-15)) continue;
      double tm = 0.5 * (ta + tb);
      double zx = rho * std::cos(tm), zy = rho * std::sin(tm);
      double A1, B1, A2, B2;
      if (zx <= knx[0] || zx >= knx[2])
        continue;
      else if (zx < knx[1]) {
        A1 = h - cx;
        B1 = 1.0;
      } else {
        A1 = h + cx;
        B1 = -1.0;
      }
      if (zy <= kny[0] || zy >= kny[2])
        continue;
      else if (zy < kny[1]) {
        A2 = h - cy;
        B2 = 1.0;
      } else {
        A2 = h + cy;
        B2 = -1.0;
      }
      double dth = tb - ta;
      double dsin = std::sin(tb) - std::sin(ta);
      double dcos = std::cos(ta) - std::cos(tb);
      double dsin2 = 0.5 * (std::sin(tb) * std::sin(tb) - std::sin(ta) * std::sin(ta));
      acc += A1 * A2 * dth + A1 * B2 * rho * dcos + B1 * A2 * rho * dsin + B1 * B2 * rho * rho * dsin2;
    }
    return acc;
  };

  // Radial breakpoints: window edges plus every radius where the circle
  // meets a hat kink line or corner.
  std::vector<double> brk = {r0, r1};
  for (double k : knx) brk.push_back(std::abs(k));
  for (double k : kny) brk.push_back(std::abs(k));
  for (double kx : knx)
    for (double ky : kny) brk.push_back(std::hypot(kx, ky));
  std::sort(brk.begin(), brk.end());
  std::vector<double> panels;
  for (double t : brk) {
    if (t < r0 - 1e-15 * h || t > r1 + 1e-15 * h) continue;
    double c = std::min(std::max(t, r0), r1);
    if (!panels.empty() && c - panels.back() < 1e-14 * h) continue;
    panels.push_back(c);
  }
  if (panels.size() < 2) panels = {r0, r1};

  const GaussLegendre& gl = gauss_legendre(kGlNodes);
  KahanSum total;
  for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
    double pa = panels[p], pb = panels[p + 1];
    // Near-origin panels get dyadic grading so power singularities of the
    // angular profile stay spectrally resolved.
    std::vector<std::pair<double, double>> subs;
    if (pa < 1e-12 * h && pb > 0.0) {
      double t = pb;
      while (t > 1e-14 * h) {
        subs.emplace_back(0.5 * t, t);
        t *= 0.5;
      }
    } else {
      subs.emplace_back(pa, pb);
    }
    for (auto [sa, sb] : subs) {
      double half = 0.5 * (sb - sa);
      if (!(half > 0.0)) continue;
      for (int i = 0; i < kGlNodes; ++i) {
        double rho = 0.5 * (sa + sb) + half * gl.x[static_cast<std::size_t>(i)];
        total.add(half * gl.w[static_cast<std::size_t>(i)] * std::pow(rho, 1.0 - alpha) * angular(rho));
      }
    }
  }
  return total.value();
}

// d = 3 (and fallback): sub-cell midpoint classification.
double subcell_window(int d, double h, double alpha, const AbsOffset& a, double lo, double hi,
                      int s) {
  const double hs = h / static_cast<double>(s);
  const double wcell = std::pow(hs, 2 * d);
  int n[3];
  for (int k = 0; k < 3; ++k) n[k] = k < d ? s : 1;
  KahanSum total;
  const double dd = static_cast<double>(d);
  for (int az = 0; az < n[2]; ++az)
    for (int ay = 0; ay < n[1]; ++ay)
      for (int ax = 0; ax < n[0]; ++ax)
        for (int bz = 0; bz < n[2]; ++bz)
          for (int by = 0; by < n[1]; ++by)
            for (int bx = 0; bx < n[0]; ++bx) {
              int da[3] = {bx - ax, by - ay, bz - az};
              double r2 = 0.0;
              for (int k = 0; k < d; ++k) {
                double t = static_cast<double>(a[static_cast<std::size_t>(k)]) * h +
                           static_cast<double>(da[k]) * hs;
                r2 += t * t;
              }
              double r = std::sqrt(r2);
              // Kept fraction of the sub-cell pair, linearized across the
              // cutoffs so the classification error is second order in hs.
              double frac = (std::min(hi, r + 0.5 * hs) - std::max(lo, r - 0.5 * hs)) / hs;
              frac = std::min(1.0, std::max(0.0, frac));
              if (frac == 0.0) continue;
              if (r2 <= 0.0) throw std::invalid_argument("divergent cell pair integral");
              double K = std::pow(r2, -0.5 * alpha);
              double lap = alpha * (alpha + 2.0 - dd) * K / r2;
              total.add(frac * wcell * (K + hs * hs / 12.0 * lap));
            }
  return total.value();
}

std::int64_t signature(const AbsOffset& a) {
  return a[0] + (a[1] << 20) + (a[2] << 40);
}

}  // namespace

// ---------------------------------------------------------------------------

PairWeights::PairWeights(const PairWeightSpec& spec) : spec_(spec) {
  if (spec_.dim < 1 || spec_.dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
  if (!(spec_.h > 0.0)) throw std::invalid_argument("cell size must be positive");
  if (!(spec_.alpha < static_cast<double>(spec_.dim) + 2.0))
    throw std::invalid_argument("kernel exponent too singular for cell pairs");
  if (!(spec_.keep_min >= 0.0) || !(spec_.keep_max > spec_.keep_min))
    throw std::invalid_argument("bad keep window");
  if (spec_.exact_radius < 1) throw std::invalid_argument("exact_radius must be >= 1");
  if (spec_.subdivision < 2) throw std::invalid_argument("subdivision must be >= 2");
}

bool PairWeights::kept(double center_dist) const {
  return center_dist >= spec_.keep_min && center_dist < spec_.keep_max;
}

double PairWeights::exact_weight(const Cell& c) const {
  AbsOffset a{};
  std::int64_t amax = 0;
  for (int k = 0; k < spec_.dim; ++k) {
    a[static_cast<std::size_t>(k)] = std::llabs(c[static_cast<std::size_t>(k)]);
    amax = std::max(amax, a[static_cast<std::size_t>(k)]);
  }
  std::sort(a.begin(), a.begin() + spec_.dim);
  auto key = signature(a);
  auto it = exact_.find(key);
  if (it != exact_.end()) return it->second;

  double v;
  if (spec_.dim == 1) {
    v = hat_window_1d(spec_.h, spec_.alpha, a[0], 0.0, std::numeric_limits<double>::infinity());
  } else if (amax <= 1) {
    v = singular_weight(spec_.dim, spec_.h, spec_.alpha, a,
                        CornerTable::make(spec_.dim, spec_.alpha));
  } else {
    v = regular_weight(spec_.dim, spec_.h, spec_.alpha, a);
  }
  exact_.emplace(key, v);
  return v;
}

double PairWeights::far_weight(const Cell& c) const {
  AbsOffset a{};
  for (int k = 0; k < spec_.dim; ++k) a[static_cast<std::size_t>(k)] = std::llabs(c[static_cast<std::size_t>(k)]);
  return far_weight_impl(spec_.dim, spec_.h, spec_.alpha, a, spec_.corrected);
}

double PairWeights::straddle_weight(const Cell& c) const {
  AbsOffset a{};
  for (int k = 0; k < spec_.dim; ++k) a[static_cast<std::size_t>(k)] = std::llabs(c[static_cast<std::size_t>(k)]);
  std::sort(a.begin(), a.begin() + spec_.dim);
  auto key = signature(a);
  auto it = straddle_.find(key);
  if (it != straddle_.end()) return it->second;

  double v;
  if (spec_.dim == 1) {
    v = hat_window_1d(spec_.h, spec_.alpha, a[0], spec_.keep_min, spec_.keep_max);
  } else if (spec_.dim == 2) {
    v = polar_window_2d(spec_.h, spec_.alpha, a, spec_.keep_min, spec_.keep_max);
  } else {
    v = subcell_window(3, spec_.h, spec_.alpha, a, spec_.keep_min, spec_.keep_max,
                       2 * spec_.subdivision);
  }
  straddle_.emplace(key, v);
  return v;
}

double PairWeights::operator()(const Cell& c) const {
  if (spec_.skip_zero && c[0] == 0 && c[1] == 0 && c[2] == 0) return 0.0;
  double gap2 = 0.0, far2 = 0.0;
  std::int64_t amax = 0;
  for (int k = 0; k < spec_.dim; ++k) {
    std::int64_t ak = std::llabs(c[static_cast<std::size_t>(k)]);
    amax = std::max(amax, ak);
    double g = std::max<double>(static_cast<double>(ak) - 1.0, 0.0) * spec_.h;
    double f = (static_cast<double>(ak) + 1.0) * spec_.h;
    gap2 += g * g;
    far2 += f * f;
  }
  const double dmin = std::sqrt(gap2);
  const double dmax = std::sqrt(far2);

  if (dmax <= spec_.keep_min || dmin >= spec_.keep_max) return 0.0;
  if (dmin >= spec_.keep_min && dmax <= spec_.keep_max) {
    if (amax <= spec_.exact_radius) return exact_weight(c);
    return far_weight(c);
  }
  return straddle_weight(c);
}

double hat_kernel_integral(int dim, double h, double alpha, const Cell& c) {
  PairWeightSpec spec;
  spec.dim = dim;
  spec.h = h;
  spec.alpha = alpha;
  PairWeights w(spec);
  return w.exact_weight(c);
}

// ---------------------------------------------------------------------------
// Direct sums.

namespace {

Cell cell_minus(const Cell& a, const Cell& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

struct Nonzero {
  Cell cell;
  double value;
};

std::vector<Nonzero> nonzeros(const ScalarField& f) {
  std::vector<Nonzero> out;
  std::size_t total = f.values.size();
  out.reserve(total / 4 + 1);
  for (std::size_t i = 0; i < total; ++i) {
    if (f.values[i] == 0.0) continue;
    out.push_back({f.cell_at(i), f.values[i]});
  }
  return out;
}

}  // namespace

double pair_sum(const PixelSet& cells, const PairWeights& w) {
  const auto& cs = cells.cells;
  KahanSum total;
  double w0 = w(Cell{0, 0, 0});
  if (w0 != 0.0) total.add(static_cast<double>(cs.size()) * w0);
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      double v = w(cell_minus(cs[j], cs[i]));
      if (v != 0.0) total.add(2.0 * v);
    }
  return total.value();
}

double pair_sum(const ScalarField& f, const PairWeights& w) {
  auto nz = nonzeros(f);
  KahanSum total;
  double w0 = w(Cell{0, 0, 0});
  if (w0 != 0.0) {
    KahanSum diag;
    for (const auto& e : nz) diag.add(e.value * e.value);
    total.add(diag.value() * w0);
  }
  for (std::size_t i = 0; i < nz.size(); ++i)
    for (std::size_t j = i + 1; j < nz.size(); ++j) {
      double v = w(cell_minus(nz[j].cell, nz[i].cell));
      if (v != 0.0) total.add(2.0 * v * nz[i].value * nz[j].value);
    }
  return total.value();
}

double cross_sum(const ScalarField& a, const ScalarField& b, const PairWeights& w) {
  if (a.dim != b.dim || a.h != b.h) throw std::invalid_argument("mismatched fields");
  auto na = nonzeros(a);
  auto nb = nonzeros(b);
  KahanSum total;
  for (const auto& ea : na)
    for (const auto& eb : nb) {
      double v = w(cell_minus(eb.cell, ea.cell));
      if (v != 0.0) total.add(v * ea.value * eb.value);
    }
  return total.value();
}

// ---------------------------------------------------------------------------
// FFT path. Plan creation in FFTW is not thread safe; execution is.

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

int next_fast(int n) {
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

struct RealBuf {
  double* p = nullptr;
  explicit RealBuf(std::size_t n) { p = fftw_alloc_real(n); }
  ~RealBuf() { fftw_free(p); }
  RealBuf(const RealBuf&) = delete;
  RealBuf& operator=(const RealBuf&) = delete;
};

struct ComplexBuf {
  fftw_complex* p = nullptr;
  explicit ComplexBuf(std::size_t n) { p = fftw_alloc_complex(n); }
  ~ComplexBuf() { fftw_free(p); }
  ComplexBuf(const ComplexBuf&) = delete;
  ComplexBuf& operator=(const ComplexBuf&) = delete;
};

struct PlanGuard {
  fftw_plan plan = nullptr;
  ~PlanGuard() {
    if (plan) {
      std::lock_guard<std::mutex> lock(fftw_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

// Correlation sum_i a_i b_{i+s} for all representable shifts s, then
// contracted against the pair weights at cell offset (b.origin - a.origin + s).
double corr_weight_sum(const ScalarField& a, const ScalarField& b, const PairWeights& w) {
  if (a.dim != b.dim || a.h != b.h) throw std::invalid_argument("mismatched fields");
  const int d = a.dim;
  int na[3] = {1, 1, 1}, nb[3] = {1, 1, 1}, L[3] = {1, 1, 1};
  for (int k = 0; k < d; ++k) {
    na[k] = static_cast<int>(a.shape[static_cast<std::size_t>(k)]);
    nb[k] = static_cast<int>(b.shape[static_cast<std::size_t>(k)]);
    L[k] = next_fast(na[k] + nb[k] - 1);
  }
  const std::size_t P = static_cast<std::size_t>(L[0]) * static_cast<std::size_t>(L[1]) *
                        static_cast<std::size_t>(L[2]);
  const std::size_t Pc = static_cast<std::size_t>(L[0] / 2 + 1) * static_cast<std::size_t>(L[1]) *
                         static_cast<std::size_t>(L[2]);

  RealBuf ra(P), rb(P);
  ComplexBuf ca(Pc), cb(Pc);
  std::fill(ra.p, ra.p + P, 0.0);
  std::fill(rb.p, rb.p + P, 0.0);

  auto fill = [&](const ScalarField& f, int n[3], double* dst) {
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      if (f.values[i] == 0.0) continue;
      std::size_t rest = i;
      std::size_t ix = rest % static_cast<std::size_t>(n[0]);
      rest /= static_cast<std::size_t>(n[0]);
      std::size_t iy = d > 1 ? rest % static_cast<std::size_t>(n[1]) : 0;
      std::size_t iz = d > 2 ? rest / static_cast<std::size_t>(n[1]) : 0;
      dst[ix + static_cast<std::size_t>(L[0]) * (iy + static_cast<std::size_t>(L[1]) * iz)] =
          f.values[i];
    }
  };
  fill(a, na, ra.p);
  fill(b, nb, rb.p);

  // FFTW is row-major; our layout is x-fastest, so pass dims reversed.
  int dims[3] = {L[2], L[1], L[0]};
  int rank = 3;
  int* dims_used = dims;
  if (d == 1) {
    rank = 1;
    dims_used = dims + 2;
  } else if (d == 2) {
    rank = 2;
    dims_used = dims + 1;
  }

  PlanGuard pa, pb, pi;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    pa.plan = fftw_plan_dft_r2c(rank, dims_used, ra.p, ca.p, FFTW_ESTIMATE);
    pb.plan = fftw_plan_dft_r2c(rank, dims_used, rb.p, cb.p, FFTW_ESTIMATE);
  }
  fftw_execute(pa.plan);
  fftw_execute(pb.plan);

  for (std::size_t t = 0; t < Pc; ++t) {
    double ar = ca.p[t][0], ai = ca.p[t][1];
    double br = cb.p[t][0], bi = cb.p[t][1];
    ca.p[t][0] = ar * br + ai * bi;  // conj(A) * B
    ca.p[t][1] = ar * bi - ai * br;
  }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    pi.plan = fftw_plan_dft_c2r(rank, dims_used, ca.p, ra.p, FFTW_ESTIMATE);
  }
  fftw_execute(pi.plan);
  const double scale = 1.0 / static_cast<double>(P);

  std::int64_t base[3] = {0, 0, 0};
  for (int k = 0; k < d; ++k)
    base[k] = b.origin[static_cast<std::size_t>(k)] - a.origin[static_cast<std::size_t>(k)];

  KahanSum total;
  int slo[3], shi[3];
  for (int k = 0; k < 3; ++k) {
    slo[k] = k < d ? -(na[k] - 1) : 0;
    shi[k] = k < d ? nb[k] - 1 : 0;
  }
  for (int sz = slo[2]; sz <= shi[2]; ++sz)
    for (int sy = slo[1]; sy <= shi[1]; ++sy)
      for (int sx = slo[0]; sx <= shi[0]; ++sx) {
        std::size_t mx = static_cast<std::size_t>(sx >= 0 ? sx : L[0] + sx);
        std::size_t my = static_cast<std::size_t>(sy >= 0 ? sy : L[1] + sy);
        std::size_t mz = static_cast<std::size_t>(sz >= 0 ? sz : L[2] + sz);
        double corr = ra.p[mx + static_cast<std::size_t>(L[0]) * (my + static_cast<std::size_t>(L[1]) * mz)] * scale;
        if (corr == 0.0) continue;
        Cell off{base[0] + sx, base[1] + sy, base[2] + sz};
        double v = w(off);
        if (v != 0.0) total.add(corr * v);
      }
  return total.value();
}

}  // namespace

double pair_sum_fft(const ScalarField& f, const PairWeights& w) { return corr_weight_sum(f, f, w); }

double cross_sum_fft(const ScalarField& a, const ScalarField& b, const PairWeights& w) {
  return corr_weight_sum(a, b, w);
}

double pair_sum_auto(const ScalarField& f, const PairWeights& w) {
  std::size_t nz = 0;
  for (double v : f.values)
    if (v != 0.0) ++nz;
  if (nz <= 2048) return pair_sum(f, w);
  return pair_sum_fft(f, w);
}

ScalarField convolve(const ScalarField& f, const PairWeights& w) {
  const int d = f.dim;
  int n[3] = {1, 1, 1}, G[3] = {1, 1, 1}, L[3] = {1, 1, 1};
  for (int k = 0; k < d; ++k) {
    n[k] = static_cast<int>(f.shape[static_cast<std::size_t>(k)]);
    G[k] = 2 * n[k] - 1;
    L[k] = next_fast(n[k] + G[k] - 1);
  }
  const std::size_t P = static_cast<std::size_t>(L[0]) * static_cast<std::size_t>(L[1]) *
                        static_cast<std::size_t>(L[2]);
  const std::size_t Pc = static_cast<std::size_t>(L[0] / 2 + 1) * static_cast<std::size_t>(L[1]) *
                         static_cast<std::size_t>(L[2]);

  RealBuf rf(P), rw(P);
  ComplexBuf cf(Pc), cw(Pc);
  std::fill(rf.p, rf.p + P, 0.0);
  std::fill(rw.p, rw.p + P, 0.0);

  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.values[i] == 0.0) continue;
    std::size_t rest = i;
    std::size_t ix = rest % static_cast<std::size_t>(n[0]);
    rest /= static_cast<std::size_t>(n[0]);
    std::size_t iy = d > 1 ? rest % static_cast<std::size_t>(n[1]) : 0;
    std::size_t iz = d > 2 ? rest / static_cast<std::size_t>(n[1]) : 0;
    rf.p[ix + static_cast<std::size_t>(L[0]) * (iy + static_cast<std::size_t>(L[1]) * iz)] = f.values[i];
  }
  for (int gz = 0; gz < G[2]; ++gz)
    for (int gy = 0; gy < G[1]; ++gy)
      for (int gx = 0; gx < G[0]; ++gx) {
        Cell off{gx - (n[0] - 1), d > 1 ? gy - (n[1] - 1) : 0, d > 2 ? gz - (n[2] - 1) : 0};
        double v = w(off);
        if (v == 0.0) continue;
        rw.p[static_cast<std::size_t>(gx) +
             static_cast<std::size_t>(L[0]) *
                 (static_cast<std::size_t>(gy) + static_cast<std::size_t>(L[1]) * static_cast<std::size_t>(gz))] = v;
      }

  int dims[3] = {L[2], L[1], L[0]};
  int rank = 3;
  int* dims_used = dims;
  if (d == 1) {
    rank = 1;
    dims_used = dims + 2;
  } else if (d == 2) {
    rank = 2;
    dims_used = dims + 1;
  }
  PlanGuard pf, pw, pi;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    pf.plan = fftw_plan_dft_r2c(rank, dims_used, rf.p, cf.p, FFTW_ESTIMATE);
    pw.plan = fftw_plan_dft_r2c(rank, dims_used, rw.p, cw.p, FFTW_ESTIMATE);
  }
  fftw_execute(pf.plan);
  fftw_execute(pw.plan);
  for (std::size_t t = 0; t < Pc; ++t) {
    double fr = cf.p[t][0], fi = cf.p[t][1];
    double wr = cw.p[t][0], wi = cw.p[t][1];
    cf.p[t][0] = fr * wr - fi * wi;
    cf.p[t][1] = fr * wi + fi * wr;
  }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    pi.plan = fftw_plan_dft_c2r(rank, dims_used, cf.p, rf.p, FFTW_ESTIMATE);
  }
  fftw_execute(pi.plan);
  const double scale = 1.0 / static_cast<double>(P);

  ScalarField out;
  out.dim = f.dim;
  out.h = f.h;
  out.origin = f.origin;
  out.shape = f.shape;
  out.values.assign(f.values.size(), 0.0);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    std::size_t rest = i;
    std::size_t ix = rest % static_cast<std::size_t>(n[0]);
    rest /= static_cast<std::size_t>(n[0]);
    std::size_t iy = d > 1 ? rest % static_cast<std::size_t>(n[1]) : 0;
    std::size_t iz = d > 2 ? rest / static_cast<std::size_t>(n[1]) : 0;
    std::size_t sx = ix + static_cast<std::size_t>(n[0] - 1);
    std::size_t sy = d > 1 ? iy + static_cast<std::size_t>(n[1] - 1) : 0;
    std::size_t sz = d > 2 ? iz + static_cast<std::size_t>(n[2] - 1) : 0;
    out.values[i] = rf.p[sx + static_cast<std::size_t>(L[0]) * (sy + static_cast<std::size_t>(L[1]) * sz)] * scale;
  }
  return out;
}

}  // namespace riesz
