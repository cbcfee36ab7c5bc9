#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rieszlab/bridge.hpp"
#include "rieszlab/config.hpp"
#include "rieszlab/continuum_energy.hpp"
#include "rieszlab/discrete_energy.hpp"
#include "rieszlab/experiments.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/io.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/optimizer.hpp"

namespace {

using namespace riesz;

struct GlobalOpts {
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  int threads = 1;
};

ConfinementSpec parse_confinement(const std::string& text, double sigma) {
  const auto nums = parse_number_list(text);
  if (nums.size() == 2) return ConfinementSpec::for_sigma(sigma, nums[0], nums[1]);
  if (nums.size() == 3) return ConfinementSpec{nums[0], nums[1], nums[2]};
  throw std::runtime_error("--confine wants c1,c2[,power]");
}

Box parse_box(const std::string& lo_text, const std::string& hi_text, int d) {
  const auto lo = parse_number_list(lo_text);
  const auto hi = parse_number_list(hi_text);
  if (lo.size() != static_cast<std::size_t>(d) || hi.size() != static_cast<std::size_t>(d))
    throw std::runtime_error("--box-lo/--box-hi want " + std::to_string(d) + " coordinates");
  Box box;
  for (int k = 0; k < d; ++k) {
    box.lo[static_cast<std::size_t>(k)] = lo[static_cast<std::size_t>(k)];
    box.hi[static_cast<std::size_t>(k)] = hi[static_cast<std::size_t>(k)];
    if (!(box.hi[static_cast<std::size_t>(k)] > box.lo[static_cast<std::size_t>(k)]))
      throw std::runtime_error("box must have positive extent on every axis");
  }
  return box;
}

void emit_summary(const GlobalOpts& gopts, const Manifest& summary) {
  std::filesystem::create_directories(gopts.out);
  summary.save(gopts.out / "summary.txt");
  std::cout << summary.dump();
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<AnnealTraceRow>& trace) {
  std::vector<std::vector<std::string>> rows;
  for (const AnnealTraceRow& row : trace)
    rows.push_back({std::to_string(row.epoch), format_double(row.temperature),
                    format_double(row.energy), format_double(row.best_energy),
                    format_double(row.accept_rate)});
  write_csv(path, {"epoch", "temperature", "energy", "best_energy", "accept_rate"}, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-sphere configurations under attractive Riesz potentials: energies, "
               "perimeters, the measure/set bridge, optimizers and batch studies"};
  app.require_subcommand(1);

  GlobalOpts gopts;
  int exit_code = 0;
  app.add_option("--out", gopts.out, "Output directory")->capture_default_str();
  app.add_option("--seed", gopts.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", gopts.threads, "Worker threads")->capture_default_str();

  // energy ------------------------------------------------------------
  auto* energy_cmd = app.add_subcommand(
      "energy", "Discrete energy of a saved configuration (pair, renormalized or confined)");
  energy_cmd->fallthrough();
  std::string energy_points;
  double energy_sigma = 0.0;
  double energy_r_eps = 0.0;
  std::string energy_confine;
  bool energy_renorm = false;
  energy_cmd->add_option("--points", energy_points, "Configuration file")->required();
  energy_cmd->add_option("--sigma", energy_sigma, "Kernel exponent offset")->required();
  auto* energy_r_opt = energy_cmd->add_option("--r-eps", energy_r_eps,
                                              "Mesoscale radius (regularized regime)");
  energy_cmd->add_option("--confine", energy_confine,
                         "Confinement c1,c2[,power]; default power is -sigma");
  energy_cmd->add_flag("--renormalized", energy_renorm,
                       "Report the renormalized energy (needs --r-eps)");
  energy_cmd->callback([&] {
    const Configuration config = load_configuration(energy_points);
    std::optional<double> r;
    if (energy_r_opt->count() > 0) r = energy_r_eps;
    const Params params(config.d, energy_sigma, config.epsilon, r);
    EnergyBreakdown breakdown;
    std::string objective = "pair";
    if (!energy_confine.empty()) {
      breakdown = energy_confined(params, config, parse_confinement(energy_confine, energy_sigma));
      objective = "confined";
    } else if (energy_renorm) {
      breakdown = energy_renormalized(params, config);
      objective = "renormalized";
    } else {
      breakdown = energy(params, config);
    }
    Manifest s;
    s.set("input.points", energy_points);
    s.set_int("input.d", config.d);
    s.set_double("input.epsilon", config.epsilon);
    s.set_int("input.count", static_cast<std::int64_t>(config.size()));
    s.set_double("input.sigma", energy_sigma);
    if (r) s.set_double("input.r_eps", *r);
    s.set("input.objective", objective);
    s.set("energy.forbidden", breakdown.forbidden ? "true" : "false");
    s.set_double("energy.pair", breakdown.pair);
    s.set_double("energy.renormalization", breakdown.renormalization);
    s.set_double("energy.confinement", breakdown.confinement);
    s.set_double("energy.total", breakdown.total);
    emit_summary(gopts, s);
  });

  // perimeter ----------------------------------------------------------
  auto* perim_cmd = app.add_subcommand(
      "perimeter", "Fractional perimeter (sigma > 0) or the sigma = 0 perimeter of a pixel set");
  perim_cmd->fallthrough();
  std::string perim_pixels;
  double perim_sigma = 0.5;
  std::string perim_radii;
  perim_cmd->add_option("--pixels", perim_pixels, "Pixel set file")->required();
  perim_cmd->add_option("--sigma", perim_sigma, "Perimeter exponent in [0, 1)")->required();
  perim_cmd->add_option("--radii", perim_radii,
                        "Window radii for sigma = 0, ascending past diam(E)");
  perim_cmd->callback([&] {
    const PixelSet set = load_pixel_set(perim_pixels);
    QuadValue value;
    std::string kind;
    if (perim_sigma > 0.0) {
      value = fractional_perimeter_report(set.dim, perim_sigma, set);
      kind = "fractional";
    } else if (perim_sigma == 0.0) {
      if (perim_radii.empty())
        throw std::runtime_error("sigma = 0 needs --radii reaching past diam(E)");
      value = p0_perimeter_report(set.dim, set, parse_number_list(perim_radii));
      kind = "p0";
    } else {
      throw std::runtime_error("perimeter wants sigma in [0, 1)");
    }
    Manifest s;
    s.set("input.pixels", perim_pixels);
    s.set_int("input.d", set.dim);
    s.set_double("input.h", set.h);
    s.set_int("input.cells", static_cast<std::int64_t>(set.cells.size()));
    s.set_double("input.measure", set.measure());
    s.set_double("input.sigma", perim_sigma);
    if (!perim_radii.empty()) s.set("input.radii", perim_radii);
    s.set("perimeter.kind", kind);
    s.set_double("perimeter.value", value.value);
    s.set_double("perimeter.error", value.error);
    emit_summary(gopts, s);
  });

  // bridge ---------------------------------------------------------------
  auto* bridge_cmd = app.add_subcommand(
      "bridge", "Companion set of a configuration and the mass/energy gap report");
  bridge_cmd->fallthrough();
  std::string bridge_points;
  double bridge_sigma = 0.5;
  double bridge_r_eps = 0.0;
  bridge_cmd->add_option("--points", bridge_points, "Configuration file")->required();
  bridge_cmd->add_option("--sigma", bridge_sigma, "Kernel exponent offset in [0, 1)")->required();
  bridge_cmd->add_option("--r-eps", bridge_r_eps, "Mesoscale radius")->required();
  bridge_cmd->callback([&] {
    const Configuration config = load_configuration(bridge_points);
    const Params params(config.d, bridge_sigma, config.epsilon, bridge_r_eps);
    const BridgeReport rep = energy_bridge_report(params, config);
    std::filesystem::create_directories(gopts.out);
    save_pixel_set(gopts.out / "companion_set.txt",
                   measure_to_set(ScaledEmpiricalMeasure{config}, bridge_r_eps));
    Manifest s;
    s.set("input.points", bridge_points);
    s.set_int("input.d", config.d);
    s.set_double("input.epsilon", config.epsilon);
    s.set_int("input.count", static_cast<std::int64_t>(config.size()));
    s.set_double("input.sigma", bridge_sigma);
    s.set_double("input.r_eps", rep.r_eps);
    s.set_double("bridge.mass_measure", rep.mass_measure);
    s.set_double("bridge.mass_set", rep.mass_set);
    s.set_double("bridge.mass_gap", rep.mass_gap);
    s.set_double("bridge.energy_measure", rep.energy_measure);
    s.set_double("bridge.energy_set", rep.energy_set);
    s.set_double("bridge.energy_gap", rep.energy_gap);
    s.set_double("bridge.renormalized_measure", rep.renormalized_measure);
    s.set_double("bridge.renormalized_set", rep.renormalized_set);
    s.set_double("bridge.renormalized_gap", rep.renormalized_gap);
    s.set_double("bridge.bound_mass", rep.bound_mass);
    s.set_double("bridge.bound_energy", rep.bound_energy);
    emit_summary(gopts, s);
  });

  // anneal ---------------------------------------------------------------
  auto* anneal_cmd = app.add_subcommand(
      "anneal", "Metropolis annealing of a configuration inside a box domain");
  anneal_cmd->fallthrough();
  std::string anneal_points, anneal_objective = "pair", anneal_confine;
  std::string anneal_lo, anneal_hi;
  double anneal_sigma = 0.0;
  double anneal_r_eps = 0.0;
  AnnealSchedule schedule;
  anneal_cmd->add_option("--points", anneal_points, "Initial configuration file")->required();
  anneal_cmd->add_option("--sigma", anneal_sigma, "Kernel exponent offset")->required();
  auto* anneal_r_opt = anneal_cmd->add_option("--r-eps", anneal_r_eps,
                                              "Mesoscale radius (regularized regime)");
  anneal_cmd
      ->add_option("--objective", anneal_objective, "pair | renormalized | confined")
      ->capture_default_str();
  anneal_cmd->add_option("--confine", anneal_confine, "Confinement c1,c2[,power]");
  anneal_cmd->add_option("--box-lo", anneal_lo, "Domain lower corner, comma list")->required();
  anneal_cmd->add_option("--box-hi", anneal_hi, "Domain upper corner, comma list")->required();
  anneal_cmd->add_option("--epochs", schedule.epochs, "Cooling epochs")->capture_default_str();
  anneal_cmd->add_option("--cooling", schedule.cooling, "Temperature factor per epoch")
      ->capture_default_str();
  anneal_cmd->add_option("--t0", schedule.t0, "Initial temperature (0 = automatic)");
  anneal_cmd->add_option("--moves", schedule.moves_per_epoch, "Moves per epoch (0 = 50 N)");
  anneal_cmd->add_option("--step", schedule.step, "Proposal step (0 = eps / 2)");
  anneal_cmd->add_option("--teleport", schedule.teleport_fraction, "Teleport fraction")
      ->capture_default_str();
  anneal_cmd->callback([&] {
    const Configuration init = load_configuration(anneal_points);
    std::optional<double> r;
    if (anneal_r_opt->count() > 0) r = anneal_r_eps;
    const Params params(init.d, anneal_sigma, init.epsilon, r);
    Objective objective = Objective::pair;
    if (anneal_objective == "renormalized") objective = Objective::renormalized;
    else if (anneal_objective == "confined") objective = Objective::confined;
    else if (anneal_objective != "pair")
      throw std::runtime_error("--objective wants pair, renormalized or confined");
    std::optional<ConfinementSpec> confine;
    if (!anneal_confine.empty()) confine = parse_confinement(anneal_confine, anneal_sigma);
    const Box domain = parse_box(anneal_lo, anneal_hi, init.d);
    const AnnealResult res = anneal_discrete(params, objective, confine ? &*confine : nullptr,
                                             init, domain, schedule, gopts.seed);
    std::filesystem::create_directories(gopts.out);
    save_configuration(gopts.out / "points.txt", res.config);
    write_trace_csv(gopts.out / "trace.csv", res.trace);
    Manifest s;
    s.set("input.points", anneal_points);
    s.set_int("input.d", init.d);
    s.set_double("input.epsilon", init.epsilon);
    s.set_int("input.count", static_cast<std::int64_t>(init.size()));
    s.set_double("input.sigma", anneal_sigma);
    if (r) s.set_double("input.r_eps", *r);
    s.set("input.objective", anneal_objective);
    s.set_int("anneal.epochs", schedule.epochs);
    s.set_double("anneal.energy", res.energy);
    if (!res.trace.empty())
      s.set_double("anneal.final_accept_rate", res.trace.back().accept_rate);
    emit_summary(gopts, s);
  });

  // minimize-density ------------------------------------------------------
  auto* descent_cmd = app.add_subcommand(
      "minimize-density", "Projected gradient descent on the confined continuum energy");
  descent_cmd->fallthrough();
  int descent_d = 2;
  double descent_sigma = -1.0;
  double descent_h = 0.015625;
  std::string descent_confine, descent_lo, descent_hi;
  int descent_max_steps = 400;
  double descent_tol_factor = 10.0;
  descent_cmd->add_option("--d", descent_d, "Dimension")->capture_default_str();
  descent_cmd->add_option("--sigma", descent_sigma, "Kernel exponent offset, negative")
      ->capture_default_str();
  descent_cmd->add_option("--confine", descent_confine, "Confinement c1,c2[,power]")->required();
  descent_cmd->add_option("--pitch", descent_h, "Grid pitch")->capture_default_str();
  descent_cmd->add_option("--box-lo", descent_lo, "Window lower corner, comma list")->required();
  descent_cmd->add_option("--box-hi", descent_hi, "Window upper corner, comma list")->required();
  descent_cmd->add_option("--max-steps", descent_max_steps, "Step cap")->capture_default_str();
  descent_cmd->add_option("--tol-factor", descent_tol_factor, "Stationarity target, units of h")
      ->capture_default_str();
  descent_cmd->callback([&] {
    DescentOptions opts;
    opts.domain = parse_box(descent_lo, descent_hi, descent_d);
    opts.h = descent_h;
    opts.max_steps = descent_max_steps;
    opts.tol_factor = descent_tol_factor;
    const ConfinementSpec g = parse_confinement(descent_confine, descent_sigma);
    const DescentResult res = minimize_density(descent_d, descent_sigma, g, opts);
    std::filesystem::create_directories(gopts.out);
    save_field(gopts.out / "density.txt", res.rho);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < res.trace.size(); ++i)
      rows.push_back({std::to_string(i), format_double(res.trace[i])});
    write_csv(gopts.out / "trace.csv", {"step", "objective"}, rows);
    Manifest s;
    s.set_int("input.d", descent_d);
    s.set_double("input.sigma", descent_sigma);
    s.set_double("input.h", descent_h);
    s.set_double("descent.objective", res.objective);
    s.set_double("descent.kkt", res.kkt);
    s.set_int("descent.steps", res.steps);
    try {
      const ShapeDiagnostics diag = shape_diagnostics(res.rho);
      s.set_double("shape.mass", diag.mass);
      s.set_double("shape.support_measure", diag.support_measure);
      s.set_double("shape.ball_deficit", diag.ball_deficit);
      s.set_double("shape.bang_bang_index", diag.bang_bang_index);
    } catch (const std::exception& e) {
      s.set("shape.error", e.what());
    }
    emit_summary(gopts, s);
  });

  // experiment --------------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "Batch studies with manifests");
  exp_cmd->require_subcommand(1);
  exp_cmd->fallthrough();
  auto* list_cmd = exp_cmd->add_subcommand("list", "Print the built-in study names");
  list_cmd->callback([] {
    for (const std::string& name : experiment_names()) std::cout << name << '\n';
  });
  auto* run_cmd = exp_cmd->add_subcommand(
      "run", "Run a study from a manifest file (or a bare built-in name for the defaults)");
  run_cmd->fallthrough();
  std::string run_arg;
  run_cmd->add_option("manifest", run_arg, "Manifest file or built-in name")->required();
  run_cmd->callback([&] {
    ExperimentContext ctx;
    ctx.out_dir = gopts.out;
    ctx.seed = gopts.seed;
    ctx.threads = gopts.threads;
    std::string name;
    if (std::filesystem::exists(run_arg)) {
      const Manifest file = Manifest::load(run_arg);
      name = file.get("experiment.name");
      for (const auto& [key, value] : file.entries())
        if (key != "experiment.name") ctx.overrides[key] = value;
    } else {
      name = run_arg;
    }
    const ExperimentResult result = run_experiment(name, ctx);
    Manifest s;
    s.set("result.name", name);
    s.set("result.passed", result.passed() ? "true" : "false");
    for (const Assertion& a : result.assertions) {
      s.set("assertions." + a.name, std::string(a.pass ? "PASS" : "FAIL") + ": " + a.details);
      std::cout << (a.pass ? "PASS " : "FAIL ") << a.name << ": " << a.details << '\n';
    }
    s.save(ctx.out_dir / name / "results.txt");
    std::cout << name << (result.passed() ? " passed" : " FAILED") << '\n';
    if (!result.passed()) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}
