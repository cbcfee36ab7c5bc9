#include "rieszlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rieszlab/bridge.hpp"
#include "rieszlab/config.hpp"
#include "rieszlab/constants.hpp"
#include "rieszlab/continuum_energy.hpp"
#include "rieszlab/discrete_energy.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/io.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/lattice.hpp"
#include "rieszlab/optimizer.hpp"
#include "rieszlab/parallel.hpp"

namespace riesz {
namespace {

std::string fmt(double x) { return format_double(x); }

// Built-in defaults overlaid with the caller's overrides. Overriding a key
// the experiment does not define is rejected instead of silently ignored.
Manifest resolved_manifest(const ExperimentContext& ctx,
                           std::initializer_list<std::pair<const char*, const char*>> defaults) {
  Manifest m;
  m.set_int("run.seed", static_cast<std::int64_t>(ctx.seed));
  m.set_int("run.threads", ctx.threads);
  for (const auto& [key, value] : defaults) m.set(key, value);
  for (const auto& [key, value] : ctx.overrides) {
    if (!m.has(key)) throw std::invalid_argument("unknown manifest key: " + key);
    m.set(key, value);
  }
  return m;
}

std::filesystem::path prepare_dir(const ExperimentContext& ctx, const std::string& name,
                                  const Manifest& manifest) {
  const auto dir = ctx.out_dir / name;
  std::filesystem::create_directories(dir);
  // The worker count steers execution only, never results, so the recorded
  // manifest leaves it out and reruns at different parallelism write
  // identical trees.
  Manifest recorded;
  for (const auto& [key, value] : manifest.entries())
    if (key != "run.threads") recorded.set(key, value);
  recorded.save(dir / "manifest.txt");
  return dir;
}

Assertion check(std::string name, bool pass, std::string details) {
  return {std::move(name), pass, std::move(details)};
}

double adaptive_simpson_step(const std::function<double(double)>& f, double a, double b,
                             double fa, double fm, double fb, double whole, double tol,
                             int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m));
  const double frm = f(0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double refined = left + right;
  if (depth <= 0 || std::abs(refined - whole) <= 15.0 * tol)
    return refined + (refined - whole) / 15.0;
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

PixelSet rasterize_shape(const std::function<bool(const Vec&)>& inside, int d, double extent,
                         double h) {
  Box bounds;
  for (int k = 0; k < d; ++k) {
    bounds.lo[k] = -extent;
    bounds.hi[k] = extent;
  }
  return rasterize(inside, bounds, d, h);
}

PixelSet ball_pixels(int d, double radius, double h) {
  return rasterize_shape([radius](const Vec& p) { return norm(p) <= radius; }, d,
                         radius + 2.0 * h, h);
}

bool strictly_decreasing(const std::vector<double>& v) {
  if (v.size() < 2) return false;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string join_fmt(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

// --- gamma-constants ---------------------------------------------------
//
// The closed forms of the renormalization constants against adaptive radial
// quadrature of their defining integrals over B_1 \ B_r and B_R \ B_1.

ExperimentResult run_gamma_constants(const ExperimentContext& ctx) {
  const Manifest m = resolved_manifest(ctx, {
      {"gamma.sigmas", "0,0.25,0.5,0.75"},
      {"gamma.radii", "0.5,0.1,0.01"},
      {"gamma.big_radii", "2,5,10"},
      {"gamma.rel_tol", "1e-08"},
  });
  const auto sigmas = parse_number_list(m.get("gamma.sigmas"));
  const auto radii = parse_number_list(m.get("gamma.radii"));
  const auto big_radii = parse_number_list(m.get("gamma.big_radii"));
  const double rel_tol = m.get_double("gamma.rel_tol");
  const int threads = static_cast<int>(m.get_int("run.threads"));
  const auto dir = prepare_dir(ctx, "gamma-constants", m);

  struct Case {
    int d;
    double sigma, r;
  };
  std::vector<Case> cases;
  for (int d = 1; d <= 3; ++d)
    for (double sigma : sigmas)
      for (double r : radii) cases.push_back({d, sigma, r});

  const auto pairs = parallel_map_ordered(cases.size(), threads, [&](std::size_t i) {
    const Case& c = cases[i];
    const double closed = gamma_r_sigma(c.d, c.sigma, c.r);
    const double surface = c.d * unit_ball_volume(c.d);
    const double quad = -adaptive_simpson(
        [&](double s) { return surface * std::pow(s, -1.0 - c.sigma); }, c.r, 1.0,
        1e-13 * std::max(1.0, std::abs(closed)));
    return std::array<double, 2>{closed, quad};
  });

  double worst_small = 0.0;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto [closed, quad] = pairs[i];
    const double rel = std::abs(closed - quad) / std::abs(quad);
    worst_small = std::max(worst_small, rel);
    rows.push_back({std::to_string(cases[i].d), fmt(cases[i].sigma), fmt(cases[i].r),
                    fmt(closed), fmt(quad), fmt(rel)});
  }
  write_csv(dir / "gamma_r.csv", {"d", "sigma", "r", "closed_form", "quadrature", "rel_error"},
            rows);

  double worst_big = 0.0;
  rows.clear();
  for (int d = 1; d <= 3; ++d) {
    for (double R : big_radii) {
      const double closed = gamma_R_zero(d, R);
      const double surface = d * unit_ball_volume(d);
      const double quad = adaptive_simpson([&](double s) { return surface / s; }, 1.0, R,
                                           1e-13 * std::max(1.0, std::abs(closed)));
      const double rel = std::abs(closed - quad) / std::abs(quad);
      worst_big = std::max(worst_big, rel);
      rows.push_back({std::to_string(d), fmt(R), fmt(closed), fmt(quad), fmt(rel)});
    }
  }
  write_csv(dir / "gamma_R.csv", {"d", "R", "closed_form", "quadrature", "rel_error"}, rows);

  ExperimentResult result;
  result.assertions.push_back(check(
      "gamma-r-matches-quadrature", worst_small <= rel_tol,
      "max rel error " + fmt(worst_small) + " over " + std::to_string(cases.size()) +
          " cases (tol " + fmt(rel_tol) + ")"));
  result.assertions.push_back(check(
      "gamma-R-matches-quadrature", worst_big <= rel_tol,
      "max rel error " + fmt(worst_big) + " over " +
          std::to_string(3 * big_radii.size()) + " cases (tol " + fmt(rel_tol) + ")"));
  return result;
}

// --- packing-rate -------------------------------------------------------
//
// Finite-box packing density against the infinite optimum: the excess decays
// like 1/side, so excess * side should be flat across a side sweep.

ExperimentResult run_packing_rate(const ExperimentContext& ctx) {
  const Manifest m = resolved_manifest(ctx, {
      {"packing.d", "2"},
      {"packing.sides", "10,20,40"},
      {"packing.budget", "20000"},
      {"packing.ratio_cap", "4"},
      {"packing.density_slack", "1e-12"},
  });
  const int d = static_cast<int>(m.get_int("packing.d"));
  const auto sides = parse_number_list(m.get("packing.sides"));
  const auto budget = m.get_int("packing.budget");
  const double ratio_cap = m.get_double("packing.ratio_cap");
  const double slack = m.get_double("packing.density_slack");
  const auto seed = static_cast<std::uint64_t>(m.get_int("run.seed"));
  const int threads = static_cast<int>(m.get_int("run.threads"));
  const auto dir = prepare_dir(ctx, "packing-rate", m);

  const auto results = parallel_map_ordered(sides.size(), threads, [&](std::size_t i) {
    return estimate_box_density(d, sides[i], budget, seed + i);
  });

  const double optimal = packing_density(d);
  std::vector<double> products;
  std::vector<std::vector<std::string>> rows;
  bool none_below = true;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    const double excess = results[i].density - optimal;
    products.push_back(excess * sides[i]);
    none_below = none_below && results[i].density >= optimal - slack;
    rows.push_back({fmt(sides[i]), std::to_string(results[i].count), fmt(results[i].density),
                    fmt(excess), fmt(excess * sides[i])});
    save_configuration(dir / ("points_" + fmt(sides[i]) + ".txt"), results[i].config);
  }
  write_csv(dir / "packing.csv",
            {"side", "count", "density", "excess", "excess_times_side"}, rows);

  const double low = *std::min_element(products.begin(), products.end());
  const double high = *std::max_element(products.begin(), products.end());

  ExperimentResult result;
  result.assertions.push_back(check("density-at-least-optimal", none_below,
                                    "min density " +
                                        fmt(std::min_element(results.begin(), results.end(),
                                                             [](const auto& a, const auto& b) {
                                                               return a.density < b.density;
                                                             })
                                                ->density) +
                                        " vs optimal " + fmt(optimal)));
  result.assertions.push_back(
      check("excess-rate-bounded", low > 0.0 && high / low < ratio_cap,
            "excess*side: " + join_fmt(products) + "; spread " +
                fmt(low > 0.0 ? high / low : std::numeric_limits<double>::infinity()) +
                " (cap " + fmt(ratio_cap) + "), fitted envelope " + fmt(high)));
  return result;
}

// --- gamma-convergence-integrable ----------------------------------------
//
// For a fixed disk density, the pair energy of the lattice recovery
// configuration approaches the continuum Riesz energy as eps shrinks.

ExperimentResult run_gamma_convergence_integrable(const ExperimentContext& ctx) {
  const Manifest m = resolved_manifest(ctx, {
      {"integrable.d", "2"},
      {"integrable.sigma", "-1"},
      {"integrable.disk_radius", "0.5"},
      {"integrable.grid_h", "0.0078125"},
      {"integrable.eps_list", "0.04,0.02,0.01"},
      {"integrable.final_rel_tol", "0.05"},
  });
  const int d = static_cast<int>(m.get_int("integrable.d"));
  const double sigma = m.get_double("integrable.sigma");
  const double radius = m.get_double("integrable.disk_radius");
  const double grid_h = m.get_double("integrable.grid_h");
  const auto eps_list = parse_number_list(m.get("integrable.eps_list"));
  const double final_rel_tol = m.get_double("integrable.final_rel_tol");
  const int threads = static_cast<int>(m.get_int("run.threads"));
  const auto dir = prepare_dir(ctx, "gamma-convergence-integrable", m);

  const DensityField rho = indicator_field(ball_pixels(d, radius, grid_h));
  const double continuum = riesz_energy(d, sigma, rho);

  struct Step {
    std::size_t count;
    double discrete;
  };
  const auto steps = parallel_map_ordered(eps_list.size(), threads, [&](std::size_t i) {
    const Configuration config = recovery_configuration(rho, eps_list[i]);
    const EnergyBreakdown e = energy(Params(d, sigma, eps_list[i]), config);
    return Step{config.size(), e.pair};
  });

  std::vector<double> gaps;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double gap = std::abs(steps[i].discrete - continuum);
    gaps.push_back(gap);
    rows.push_back({fmt(eps_list[i]), std::to_string(steps[i].count), fmt(steps[i].discrete),
                    fmt(continuum), fmt(gap), fmt(gap / std::abs(continuum))});
  }
  write_csv(dir / "limit.csv",
            {"eps", "count", "discrete", "continuum", "gap", "rel_gap"}, rows);

  const double final_rel = gaps.back() / std::abs(continuum);
  ExperimentResult result;
  result.assertions.push_back(check("gap-strictly-decreasing", strictly_decreasing(gaps),
                                    "gaps: " + join_fmt(gaps)));
  result.assertions.push_back(check("final-gap-small", final_rel <= final_rel_tol,
                                    "final rel gap " + fmt(final_rel) + " (tol " +
                                        fmt(final_rel_tol) + ")"));
  return result;
}

// --- confined-minimizer-shape --------------------------------------------
//
// Projected gradient descent on the confined attractive energy lands on a
// bang-bang, ball-shaped density with a stationary residual.

ExperimentResult run_confined_minimizer_shape(const ExperimentContext& ctx) {
  const Manifest m = resolved_manifest(ctx, {
      {"descent.d", "2"},
      {"descent.sigma", "-1"},
      {"descent.c1", "-1.8"},
      {"descent.c2", "12"},
      {"descent.h", "0.015625"},
      {"descent.box_half", "0.7"},
      {"descent.max_steps", "400"},
      {"descent.tol_factor", "10"},
      {"descent.bang_bang_cap", "0.1"},
      {"descent.deficit_cap", "0.05"},
  });
  const int d = static_cast<int>(m.get_int("descent.d"));
  const double sigma = m.get_double("descent.sigma");
  const double c1 = m.get_double("descent.c1");
  const double c2 = m.get_double("descent.c2");
  const double h = m.get_double("descent.h");
  const double box_half = m.get_double("descent.box_half");
  const auto dir = prepare_dir(ctx, "confined-minimizer-shape", m);

  const ConfinementSpec g = ConfinementSpec::for_sigma(sigma, c1, c2);
  DescentOptions opts;
  for (int k = 0; k < d; ++k) {
    opts.domain.lo[k] = -box_half;
    opts.domain.hi[k] = box_half;
  }
  opts.h = h;
  opts.max_steps = static_cast<int>(m.get_int("descent.max_steps"));
  opts.tol_factor = m.get_double("descent.tol_factor");

  const DescentResult descent = minimize_density(d, sigma, g, opts);
  const ShapeDiagnostics diag = shape_diagnostics(descent.rho);
  save_field(dir / "density.txt", descent.rho);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < descent.trace.size(); ++i)
    rows.push_back({std::to_string(i), fmt(descent.trace[i])});
  write_csv(dir / "descent.csv", {"step", "objective"}, rows);

  const double tol = opts.tol_factor * h;
  ExperimentResult result;
  result.assertions.push_back(check("stationarity-reached", descent.kkt <= tol,
                                    "kkt " + fmt(descent.kkt) + " vs tol " + fmt(tol) +
                                        " after " + std::to_string(descent.steps) + " steps"));
  result.assertions.push_back(
      check("mass-sits-on-the-bounds",
            diag.bang_bang_index < m.get_double("descent.bang_bang_cap"),
            "bang-bang index " + fmt(diag.bang_bang_index) + " (cap " +
                m.get("descent.bang_bang_cap") + ")"));
  result.assertions.push_back(
      check("support-is-a-ball", diag.ball_deficit < m.get_double("descent.deficit_cap"),
            "ball deficit " + fmt(diag.ball_deficit) + " (cap " +
                m.get("descent.deficit_cap") + "), mass " + fmt(diag.mass)));
  return result;
}

// --- first-variation ------------------------------------------------------
//
// The residual field of the analytically known critical ball: its center
// value has a closed form, and the sign conditions hold on the whole grid.

ExperimentResult run_first_variation(const ExperimentContext& ctx) {
  const Manifest m = resolved_manifest(ctx, {
      {"variation.d", "2"},
      {"variation.sigma", "-1"},
      {"variation.c1", "-1.8"},
      {"variation.c2", "12"},
      {"variation.radius", "0.45"},
      {"variation.h", "0.015625"},
      {"variation.window_half", "0.7"},
      {"variation.center_rel_tol", "0.02"},
      {"variation.kkt_factor", "10"},
  });
  const int d = static_cast<int>(m.get_int("variation.d"));
  const double sigma = m.get_double("variation.sigma");
  const double c1 = m.get_double("variation.c1");
  const double c2 = m.get_double("variation.c2");
  const double radius = m.get_double("variation.radius");
  const double h = m.get_double("variation.h");
  const double window_half = m.get_double("variation.window_half");
  const auto dir = prepare_dir(ctx, "first-variation", m);

  const ConfinementSpec g = ConfinementSpec::for_sigma(sigma, c1, c2);
  DensityField rho;
  rho.dim = d;
  rho.h = h;
  for (int k = 0; k < d; ++k) {
    const auto first = static_cast<std::int64_t>(std::floor(-window_half / h));
    const auto last = static_cast<std::int64_t>(std::ceil(window_half / h)) - 1;
    rho.origin[static_cast<std::size_t>(k)] = first;
    rho.shape[static_cast<std::size_t>(k)] = last - first + 1;
  }
  rho.values.assign(rho.size(), 0.0);
  for (std::size_t flat = 0; flat < rho.size(); ++flat)
    if (norm(cell_center(rho.cell_at(flat), h, d)) <= radius) rho.values[flat] = 1.0;

  const ScalarField res = first_variation_residual(d, sigma, rho, g);
  const double kkt = kkt_violation(rho, res);

  // Average the residual over the 2^d cells around the origin; their shared
  // center radius enters the prediction through the confinement term, while
  // the interaction term is the ball potential at the center,
  // 2 * d * omega_d * R^-sigma / -sigma.
  double measured = 0.0;
  Cell c{0, 0, 0};
  int used = 0;
  for (int mask = 0; mask < (1 << d); ++mask) {
    for (int k = 0; k < d; ++k) c[k] = (mask >> k) & 1 ? -1 : 0;
    measured += res.at(c);
    ++used;
  }
  measured /= static_cast<double>(used);
  const Vec probe = cell_center(Cell{0, 0, 0}, h, d);
  const double predicted =
      g(probe) - 2.0 * d * unit_ball_volume(d) * std::pow(radius, -sigma) / (-sigma);
  const double center_rel = std::abs(measured - predicted) / std::abs(predicted);

  // Radial profile of the residual, h-wide shells.
  std::vector<double> sums;
  std::vector<std::int64_t> counts;
  for (std::size_t flat = 0; flat < res.values.size(); ++flat) {
    const auto bin =
        static_cast<std::size_t>(std::floor(norm(cell_center(res.cell_at(flat), h, d)) / h));
    if (bin >= sums.size()) {
      sums.resize(bin + 1, 0.0);
      counts.resize(bin + 1, 0);
    }
    sums[bin] += res.values[flat];
    ++counts[bin];
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t bin = 0; bin < sums.size(); ++bin) {
    if (counts[bin] == 0) continue;
    rows.push_back({fmt((static_cast<double>(bin) + 0.5) * h),
                    fmt(sums[bin] / static_cast<double>(counts[bin])),
                    std::to_string(counts[bin])});
  }
  write_csv(dir / "radial.csv", {"radius", "mean_residual", "cells"}, rows);

  ExperimentResult result;
  result.assertions.push_back(
      check("center-residual-matches-prediction",
            center_rel <= m.get_double("variation.center_rel_tol"),
            "measured " + fmt(measured) + " vs predicted " + fmt(predicted) + ", rel err " +
                fmt(center_rel)));
  const double tol = m.get_double("variation.kkt_factor") * h;
  result.assertions.push_back(check("ball-is-stationary", kkt <= tol,
                                    "kkt " + fmt(kkt) + " vs tol " + fmt(tol)));
  return result;
}

// --- bridge-sweep ----------------------------------------------------------
//
// The measure-to-set bridge along the default mesoscale schedule: mass and
// energy gaps follow their sqrt(eps / r_eps) envelopes at a stable rate, and
// the renormalized gap shrinks.

ExperimentResult run_bridge_sweep(const ExperimentContext& ctx) {
  const Manifest m = resolved_manifest(ctx, {
      {"bridge.d", "2"},
      {"bridge.sigma", "0.5"},
      {"bridge.disk_radius", "0.45"},
      {"bridge.support_h", "0.0078125"},
      {"bridge.eps_list", "0.02,0.01,0.005"},
      {"bridge.schedule_exponent", "0.25"},
      {"bridge.ratio_band", "3"},
  });
  const int d = static_cast<int>(m.get_int("bridge.d"));
  const double sigma = m.get_double("bridge.sigma");
  const double radius = m.get_double("bridge.disk_radius");
  const double support_h = m.get_double("bridge.support_h");
  const auto eps_list = parse_number_list(m.get("bridge.eps_list"));
  const double exponent = m.get_double("bridge.schedule_exponent");
  const double band = m.get_double("bridge.ratio_band");
  const int threads = static_cast<int>(m.get_int("run.threads"));
  const auto dir = prepare_dir(ctx, "bridge-sweep", m);

  const DensityField rho = indicator_field(ball_pixels(d, radius, support_h));
  const MesoscaleSchedule schedule = mesoscale_schedule(sigma, exponent);

  struct Item {
    BridgeReport rep;
    std::size_t count;
  };
  const auto items = parallel_map_ordered(eps_list.size(), threads, [&](std::size_t i) {
    const double eps = eps_list[i];
    const Params params(d, sigma, eps, schedule(eps));
    const Configuration config = recovery_configuration(rho, eps);
    return Item{energy_bridge_report(params, config), config.size()};
  });

  std::vector<double> mass_rates, energy_rates, renorm_gaps;
  std::vector<std::vector<std::string>> rows;
  bool enveloped = true;
  for (const Item& item : items) {
    const BridgeReport& rep = item.rep;
    const double root = std::sqrt(rep.epsilon / rep.r_eps);
    const double gamma = gamma_r_sigma(d, sigma, rep.r_eps);
    mass_rates.push_back(rep.mass_gap / root);
    energy_rates.push_back(rep.energy_gap / (std::abs(gamma) * root));
    renorm_gaps.push_back(rep.renormalized_gap);
    enveloped = enveloped && rep.mass_gap <= rep.bound_mass &&
                rep.energy_gap <= rep.bound_energy;
    rows.push_back({fmt(rep.epsilon), fmt(rep.r_eps), std::to_string(item.count),
                    fmt(rep.mass_measure), fmt(rep.mass_set), fmt(rep.mass_gap),
                    fmt(rep.energy_measure), fmt(rep.energy_set), fmt(rep.energy_gap),
                    fmt(rep.renormalized_measure), fmt(rep.renormalized_set),
                    fmt(rep.renormalized_gap), fmt(rep.bound_mass), fmt(rep.bound_energy)});
  }
  write_csv(dir / "bridge.csv",
            {"eps", "r_eps", "count", "mass_measure", "mass_set", "mass_gap",
             "energy_measure", "energy_set", "energy_gap", "renormalized_measure",
             "renormalized_set", "renormalized_gap", "bound_mass", "bound_energy"},
            rows);

  const auto rate_stable = [&](const std::vector<double>& rates) {
    if (rates.empty() || !(rates.front() > 0.0)) return false;
    for (double rate : rates)
      if (rate < rates.front() / band || rate > rates.front() * band) return false;
    return true;
  };

  ExperimentResult result;
  result.assertions.push_back(check("mass-rate-stable", rate_stable(mass_rates),
                                    "mass_gap / sqrt(eps/r_eps): " + join_fmt(mass_rates) +
                                        " (band " + fmt(band) + "x around the first)"));
  result.assertions.push_back(
      check("energy-rate-stable", rate_stable(energy_rates),
            "energy_gap / (|gamma| sqrt(eps/r_eps)): " + join_fmt(energy_rates) + " (band " +
                fmt(band) + "x around the first)"));
  result.assertions.push_back(check("renormalized-gap-shrinks",
                                    strictly_decreasing(renorm_gaps),
                                    "renormalized gaps: " + join_fmt(renorm_gaps)));
  result.assertions.push_back(check("gaps-inside-envelopes", enveloped,
                                    "every mass_gap <= bound_mass and energy_gap <= "
                                    "bound_energy row-wise"));
  return result;
}

// --- gamma-convergence-regularized -----------------------------------------
//
// The renormalized discrete energy of recovery configurations of a disk
// approaches the renormalized perimeter limit P^sigma(E) - gamma^sigma |E|.

ExperimentResult run_gamma_convergence_regularized(const ExperimentContext& ctx) {
  const Manifest m = resolved_manifest(ctx, {
      {"regularized.d", "2"},
      {"regularized.sigma", "0.5"},
      {"regularized.disk_radius", "0.3"},
      {"regularized.grid_h", "0.0078125"},
      {"regularized.eps_list", "0.02,0.01,0.005"},
      {"regularized.schedule_exponent", "0.25"},
      {"regularized.final_rel_tol", "0.1"},
  });
  const int d = static_cast<int>(m.get_int("regularized.d"));
  const double sigma = m.get_double("regularized.sigma");
  const double radius = m.get_double("regularized.disk_radius");
  const double grid_h = m.get_double("regularized.grid_h");
  const auto eps_list = parse_number_list(m.get("regularized.eps_list"));
  const double exponent = m.get_double("regularized.schedule_exponent");
  const double final_rel_tol = m.get_double("regularized.final_rel_tol");
  const int threads = static_cast<int>(m.get_int("run.threads"));
  const auto dir = prepare_dir(ctx, "gamma-convergence-regularized", m);

  const PixelSet disk = ball_pixels(d, radius, grid_h);
  const double target =
      fractional_perimeter(d, sigma, disk) - gamma_sigma_tail(d, sigma) * disk.measure();
  const MesoscaleSchedule schedule = mesoscale_schedule(sigma, exponent);

  struct Step {
    std::size_t count;
    double renormalized;
  };
  const auto steps = parallel_map_ordered(eps_list.size(), threads, [&](std::size_t i) {
    const double eps = eps_list[i];
    const Params params(d, sigma, eps, schedule(eps));
    const Configuration config = set_to_measure(disk, eps).config;
    return Step{config.size(), energy_renormalized(params, config).total};
  });

  std::vector<double> gaps;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double gap = std::abs(steps[i].renormalized - target);
    gaps.push_back(gap);
    rows.push_back({fmt(eps_list[i]), fmt(schedule(eps_list[i])),
                    std::to_string(steps[i].count), fmt(steps[i].renormalized), fmt(target),
                    fmt(gap), fmt(gap / std::abs(target))});
  }
  write_csv(dir / "limit.csv",
            {"eps", "r_eps", "count", "renormalized_energy", "target", "gap", "rel_gap"},
            rows);

  ExperimentResult result;
  result.assertions.push_back(check("gap-magnitude-shrinks", strictly_decreasing(gaps),
                                    "gaps: " + join_fmt(gaps)));
  result.assertions.push_back(check(
      "final-gap-within-tolerance", gaps.back() <= final_rel_tol * std::abs(target),
      "final rel gap " + fmt(gaps.back() / std::abs(target)) + " (tol " + fmt(final_rel_tol) +
          "), target " + fmt(target)));
  return result;
}

// --- isoperimetry -----------------------------------------------------------
//
// The equal-measure ball against square, 2:1 rectangle, L-shape and annulus
// under the attractive Riesz energy and the perimeter functionals; the ball
// must win every comparison by more than the quadrature error estimates.

ExperimentResult run_isoperimetry(const ExperimentContext& ctx) {
  const Manifest m = resolved_manifest(ctx, {
      {"shapes.h", "0.0078125"},
      {"shapes.area", "0.3"},
      {"shapes.riesz_sigma", "-1"},
      {"shapes.perimeter_sigmas", "0.25,0.5,0.75"},
      {"shapes.p0_radii", "1,1.25"},
      {"shapes.rotation_degrees", "15"},
  });
  const double h = m.get_double("shapes.h");
  const double area = m.get_double("shapes.area");
  const double riesz_sigma = m.get_double("shapes.riesz_sigma");
  const auto perimeter_sigmas = parse_number_list(m.get("shapes.perimeter_sigmas"));
  const auto p0_radii = parse_number_list(m.get("shapes.p0_radii"));
  const int threads = static_cast<int>(m.get_int("run.threads"));
  const auto dir = prepare_dir(ctx, "isoperimetry", m);

  // The polygonal competitors sit at a generic orientation. Axis-aligned
  // edges fall along pixel rows and rasterize with anomalously small
  // boundary error, while the ball always pays the full staircase cost, so
  // the aligned pose biases the comparison toward the polygons at fixed h.
  // A modest tilt restores the error term every shape carries; at 15 degrees
  // an edge picks up less of it per unit length than the circle does on
  // angular average, so the ball wins on geometry, not on the artifact.
  const double tilt = m.get_double("shapes.rotation_degrees") * kPi / 180.0;
  const double tc = std::cos(tilt);
  const double ts = std::sin(tilt);
  const auto turned = [tc, ts](const Vec& p) {
    return Vec{tc * p[0] + ts * p[1], -ts * p[0] + tc * p[1], 0.0};
  };

  const double ball_r = std::sqrt(area / kPi);
  const double square_half = 0.5 * std::sqrt(area);
  const double rect_half = 0.5 * std::sqrt(area / 2.0);  // 2:1 aspect, half the short side
  const double l_half = 0.5 * std::sqrt(4.0 * area / 3.0);
  const double annulus_outer = std::sqrt(4.0 * area / (3.0 * kPi));
  const double annulus_inner = 0.5 * annulus_outer;

  struct ShapeDef {
    std::string name;
    std::function<bool(const Vec&)> inside;
    double extent;
  };
  const std::vector<ShapeDef> shapes = {
      {"ball", [=](const Vec& p) { return norm(p) <= ball_r; }, ball_r + 2.0 * h},
      {"square",
       [=](const Vec& p) {
         const Vec q = turned(p);
         return std::abs(q[0]) <= square_half && std::abs(q[1]) <= square_half;
       },
       square_half * std::sqrt(2.0) + 2.0 * h},
      {"rectangle",
       [=](const Vec& p) {
         const Vec q = turned(p);
         return std::abs(q[0]) <= rect_half && std::abs(q[1]) <= 2.0 * rect_half;
       },
       rect_half * std::sqrt(5.0) + 2.0 * h},
      {"l-shape",
       [=](const Vec& p) {
         const Vec q = turned(p);
         return std::abs(q[0]) <= l_half && std::abs(q[1]) <= l_half &&
                !(q[0] > 0.0 && q[1] > 0.0);
       },
       l_half * std::sqrt(2.0) + 2.0 * h},
      {"annulus",
       [=](const Vec& p) {
         const double r = norm(p);
         return r >= annulus_inner && r <= annulus_outer;
       },
       annulus_outer + 2.0 * h},
  };

  struct Row {
    double measure = 0.0;
    QuadValue riesz;
    std::vector<QuadValue> perims;
    QuadValue p0;
  };
  const auto evaluated = parallel_map_ordered(shapes.size(), threads, [&](std::size_t i) {
    const PixelSet set = rasterize_shape(shapes[i].inside, 2, shapes[i].extent, h);
    const DensityField ind = indicator_field(set);
    Row row;
    row.measure = set.measure();
    row.riesz.value = riesz_energy(2, riesz_sigma, ind);
    row.riesz.error =
        std::abs(row.riesz.value - riesz_energy(2, riesz_sigma, ind, QuadratureSpec{4, 4.0})) +
        1e-12 * std::abs(row.riesz.value);
    for (double sigma : perimeter_sigmas)
      row.perims.push_back(fractional_perimeter_report(2, sigma, set));
    row.p0 = p0_perimeter_report(2, set, p0_radii);
    return row;
  });

  std::vector<std::string> header = {"shape", "measure", "riesz", "riesz_err"};
  for (double sigma : perimeter_sigmas) {
    header.push_back("p_" + fmt(sigma));
    header.push_back("p_" + fmt(sigma) + "_err");
  }
  header.push_back("p0");
  header.push_back("p0_err");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    std::vector<std::string> row = {shapes[i].name, fmt(evaluated[i].measure),
                                    fmt(evaluated[i].riesz.value), fmt(evaluated[i].riesz.error)};
    for (const QuadValue& q : evaluated[i].perims) {
      row.push_back(fmt(q.value));
      row.push_back(fmt(q.error));
    }
    row.push_back(fmt(evaluated[i].p0.value));
    row.push_back(fmt(evaluated[i].p0.error));
    rows.push_back(std::move(row));
  }
  write_csv(dir / "shapes.csv", header, rows);

  // Smallest winning margin of the ball over the competitors, both values
  // pushed toward each other by their error estimates.
  const auto ball_margin = [&](const std::function<QuadValue(const Row&)>& pick) {
    const QuadValue mine = pick(evaluated.front());
    double margin = std::numeric_limits<double>::infinity();
    std::size_t runner_up = 1;
    for (std::size_t i = 1; i < evaluated.size(); ++i) {
      const QuadValue other = pick(evaluated[i]);
      const double gap = (other.value - other.error) - (mine.value + mine.error);
      if (gap < margin) {
        margin = gap;
        runner_up = i;
      }
    }
    return std::pair<double, std::string>(margin, shapes[runner_up].name);
  };

  ExperimentResult result;
  {
    const auto [margin, name] = ball_margin([](const Row& r) { return r.riesz; });
    result.assertions.push_back(check("riesz-energy-ball-strictly-lowest", margin > 0.0,
                                      "worst margin " + fmt(margin) + " vs " + name));
  }
  for (std::size_t s = 0; s < perimeter_sigmas.size(); ++s) {
    const auto [margin, name] = ball_margin([s](const Row& r) { return r.perims[s]; });
    result.assertions.push_back(
        check("fractional-perimeter-" + fmt(perimeter_sigmas[s]) + "-ball-strictly-lowest",
              margin > 0.0, "worst margin " + fmt(margin) + " vs " + name));
  }
  {
    const auto [margin, name] = ball_margin([](const Row& r) { return r.p0; });
    result.assertions.push_back(check("p0-perimeter-ball-strictly-lowest", margin > 0.0,
                                      "worst margin " + fmt(margin) + " vs " + name));
  }
  return result;
}

struct Study {
  const char* name;
  ExperimentResult (*run)(const ExperimentContext&);
};

constexpr std::array<Study, 8> kStudies{{
    {"gamma-constants", run_gamma_constants},
    {"packing-rate", run_packing_rate},
    {"gamma-convergence-integrable", run_gamma_convergence_integrable},
    {"confined-minimizer-shape", run_confined_minimizer_shape},
    {"first-variation", run_first_variation},
    {"bridge-sweep", run_bridge_sweep},
    {"gamma-convergence-regularized", run_gamma_convergence_regularized},
    {"isoperimetry", run_isoperimetry},
}};

}  // namespace

bool ExperimentResult::passed() const {
  if (assertions.empty()) return false;
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.pass; });
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Study& s : kStudies) out.emplace_back(s.name);
    return out;
  }();
  return names;
}

ExperimentResult run_experiment(const std::string& name, const ExperimentContext& ctx) {
  for (const Study& s : kStudies) {
    if (name == s.name) {
      ExperimentResult result = s.run(ctx);
      result.name = name;
      return result;
    }
  }
  std::string known;
  for (const Study& s : kStudies) {
    if (!known.empty()) known += ", ";
    known += s.name;
  }
  throw std::invalid_argument("unknown experiment '" + name + "' (known: " + known + ")");
}

}  // namespace riesz
