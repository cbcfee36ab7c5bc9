#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rieszlab/bridge.hpp"
#include "rieszlab/config.hpp"
#include "rieszlab/constants.hpp"
#include "rieszlab/continuum_energy.hpp"
#include "rieszlab/discrete_energy.hpp"
#include "rieszlab/experiments.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/io.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/lattice.hpp"
#include "rieszlab/optimizer.hpp"

namespace py = pybind11;
using namespace riesz;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hard-sphere configurations under attractive Riesz potentials";

  // Constants and kernel scalars.
  m.def("unit_ball_volume", &unit_ball_volume, py::arg("d"));
  m.def("packing_density", &packing_density, py::arg("d"));
  m.def("sphere_mass_weight", &sphere_mass_weight, py::arg("d"), py::arg("epsilon"));
  m.def("gamma_r_sigma", &gamma_r_sigma, py::arg("d"), py::arg("sigma"), py::arg("r"));
  m.def("gamma_R_zero", &gamma_R_zero, py::arg("d"), py::arg("R"));
  m.def("gamma_sigma_tail", &gamma_sigma_tail, py::arg("d"), py::arg("sigma"));
  m.def("admissibility_ratio", &admissibility_ratio, py::arg("sigma"), py::arg("eps"),
        py::arg("r_eps"));

  py::class_<MesoscaleSchedule>(m, "MesoscaleSchedule")
      .def_readonly("sigma", &MesoscaleSchedule::sigma)
      .def_readonly("exponent", &MesoscaleSchedule::exponent)
      .def("__call__", &MesoscaleSchedule::operator(), py::arg("eps"))
      .def("describe", &MesoscaleSchedule::describe);
  m.def("mesoscale_schedule", &mesoscale_schedule, py::arg("sigma"),
        py::arg("exponent") = std::nullopt);

  py::class_<Params>(m, "Params")
      .def(py::init<int, double, double, std::optional<double>>(), py::arg("d"),
           py::arg("sigma"), py::arg("epsilon"), py::arg("r_eps") = std::nullopt)
      .def_readonly("d", &Params::d)
      .def_readonly("sigma", &Params::sigma)
      .def_readonly("epsilon", &Params::epsilon)
      .def_readonly("r_eps", &Params::r_eps)
      .def("mass_weight", &Params::mass_weight);

  py::class_<ConfinementSpec>(m, "ConfinementSpec")
      .def(py::init([](double c1, double c2, double power) {
             return ConfinementSpec{c1, c2, power};
           }),
           py::arg("c1"), py::arg("c2"), py::arg("power"))
      .def_static("for_sigma", &ConfinementSpec::for_sigma, py::arg("sigma"), py::arg("c1"),
                  py::arg("c2"))
      .def_readonly("c1", &ConfinementSpec::c1)
      .def_readonly("c2", &ConfinementSpec::c2)
      .def_readonly("power", &ConfinementSpec::power)
      .def("__call__", &ConfinementSpec::operator(), py::arg("x"));

  py::class_<KernelSpec>(m, "KernelSpec")
      .def(py::init<Params>(), py::arg("params"))
      .def("potential", &KernelSpec::potential, py::arg("r"))
      .def("tail", &KernelSpec::tail, py::arg("r"));

  py::class_<Box>(m, "Box")
      .def(py::init([](const Vec& lo, const Vec& hi) { return Box{lo, hi}; }), py::arg("lo"),
           py::arg("hi"))
      .def_readonly("lo", &Box::lo)
      .def_readonly("hi", &Box::hi);

  // Configurations.
  py::class_<Configuration>(m, "Configuration")
      .def_readonly("d", &Configuration::d)
      .def_readonly("epsilon", &Configuration::epsilon)
      .def_readonly("points", &Configuration::points)
      .def("__len__", &Configuration::size);
  m.def("validate_configuration", &validate_configuration, py::arg("points"), py::arg("d"),
        py::arg("epsilon"));
  m.def("total_mass", &total_mass, py::arg("config"));

  // Grids, sets and fields.
  py::class_<PixelSet>(m, "PixelSet")
      .def_readonly("dim", &PixelSet::dim)
      .def_readonly("h", &PixelSet::h)
      .def_readonly("cells", &PixelSet::cells)
      .def("measure", &PixelSet::measure)
      .def("contains_point", &PixelSet::contains_point, py::arg("p"))
      .def("__len__", [](const PixelSet& s) { return s.cells.size(); });
  m.def("make_pixel_set", &make_pixel_set, py::arg("cells"), py::arg("dim"), py::arg("h"));
  m.def("rasterize", &rasterize, py::arg("inside"), py::arg("bounds"), py::arg("dim"),
        py::arg("h"));

  py::class_<ScalarField>(m, "ScalarField")
      .def_readonly("dim", &ScalarField::dim)
      .def_readonly("h", &ScalarField::h)
      .def_readonly("origin", &ScalarField::origin)
      .def_readonly("shape", &ScalarField::shape)
      .def_readonly("values", &ScalarField::values)
      .def("integral", &ScalarField::integral);
  py::class_<DensityField, ScalarField>(m, "DensityField");
  m.def(
      "make_density_field",
      [](int dim, double h, const Cell& origin, const std::array<std::int64_t, 3>& shape,
         std::vector<double> values) {
        ScalarField f;
        f.dim = dim;
        f.h = h;
        f.origin = origin;
        f.shape = shape;
        f.values = std::move(values);
        return validate_density_field(std::move(f));
      },
      py::arg("dim"), py::arg("h"), py::arg("origin"), py::arg("shape"), py::arg("values"));
  m.def("indicator_field", &indicator_field, py::arg("set"));
  m.def("support_of", &support_of, py::arg("field"), py::arg("threshold") = 1e-12);
  m.def("symmetric_difference_measure", &symmetric_difference_measure, py::arg("a"),
        py::arg("b"));

  // Discrete energies.
  py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
      .def_readonly("forbidden", &EnergyBreakdown::forbidden)
      .def_readonly("pair", &EnergyBreakdown::pair)
      .def_readonly("renormalization", &EnergyBreakdown::renormalization)
      .def_readonly("confinement", &EnergyBreakdown::confinement)
      .def_readonly("total", &EnergyBreakdown::total);
  m.def("pair_energy", &pair_energy, py::arg("params"), py::arg("config"));
  m.def("energy", &energy, py::arg("params"), py::arg("config"));
  m.def("energy_renormalized", &energy_renormalized, py::arg("params"), py::arg("config"));
  m.def("energy_confined", &energy_confined, py::arg("params"), py::arg("config"),
        py::arg("confinement"));

  // Continuum energies and perimeters.
  py::class_<QuadratureSpec>(m, "QuadratureSpec")
      .def(py::init([](int subdivision, double diagonal_radius) {
             return QuadratureSpec{subdivision, diagonal_radius};
           }),
           py::arg("subdivision") = 4, py::arg("diagonal_radius") = 6.0)
      .def_readonly("subdivision", &QuadratureSpec::subdivision)
      .def_readonly("diagonal_radius", &QuadratureSpec::diagonal_radius);
  py::class_<QuadValue>(m, "QuadValue")
      .def_readonly("value", &QuadValue::value)
      .def_readonly("error", &QuadValue::error);
  m.def("riesz_energy", &riesz_energy, py::arg("d"), py::arg("sigma"), py::arg("rho"),
        py::arg("quad") = QuadratureSpec{});
  m.def("riesz_energy_confined", &riesz_energy_confined, py::arg("d"), py::arg("sigma"),
        py::arg("rho"), py::arg("confinement"), py::arg("quad") = QuadratureSpec{});
  m.def("j_truncated", &j_truncated, py::arg("d"), py::arg("sigma"), py::arg("set"),
        py::arg("r"), py::arg("quad") = QuadratureSpec{});
  m.def("j_renormalized", &j_renormalized, py::arg("d"), py::arg("sigma"), py::arg("set"),
        py::arg("r"), py::arg("quad") = QuadratureSpec{});
  m.def("fractional_perimeter", &fractional_perimeter, py::arg("d"), py::arg("sigma"),
        py::arg("set"), py::arg("quad") = QuadratureSpec{});
  m.def("fractional_perimeter_report", &fractional_perimeter_report, py::arg("d"),
        py::arg("sigma"), py::arg("set"), py::arg("quad") = QuadratureSpec{});
  m.def("p0_perimeter", &p0_perimeter, py::arg("d"), py::arg("set"), py::arg("radii"),
        py::arg("quad") = QuadratureSpec{});
  m.def("p0_perimeter_report", &p0_perimeter_report, py::arg("d"), py::arg("set"),
        py::arg("radii"), py::arg("quad") = QuadratureSpec{});
  m.def("p0_profile", &p0_profile, py::arg("d"), py::arg("set"), py::arg("radii"),
        py::arg("quad") = QuadratureSpec{});
  m.def("first_variation_residual", &first_variation_residual, py::arg("d"), py::arg("sigma"),
        py::arg("rho"), py::arg("confinement"), py::arg("quad") = QuadratureSpec{});
  m.def("kkt_violation", &kkt_violation, py::arg("rho"), py::arg("residual"),
        py::arg("active_tol") = 1e-9);

  // Measure/set bridge.
  py::class_<BridgeReport>(m, "BridgeReport")
      .def_readonly("epsilon", &BridgeReport::epsilon)
      .def_readonly("r_eps", &BridgeReport::r_eps)
      .def_readonly("mass_measure", &BridgeReport::mass_measure)
      .def_readonly("mass_set", &BridgeReport::mass_set)
      .def_readonly("mass_gap", &BridgeReport::mass_gap)
      .def_readonly("energy_measure", &BridgeReport::energy_measure)
      .def_readonly("energy_set", &BridgeReport::energy_set)
      .def_readonly("energy_gap", &BridgeReport::energy_gap)
      .def_readonly("renormalized_measure", &BridgeReport::renormalized_measure)
      .def_readonly("renormalized_set", &BridgeReport::renormalized_set)
      .def_readonly("renormalized_gap", &BridgeReport::renormalized_gap)
      .def_readonly("bound_mass", &BridgeReport::bound_mass)
      .def_readonly("bound_energy", &BridgeReport::bound_energy);
  m.def("mesoscale_cell", &mesoscale_cell, py::arg("epsilon"), py::arg("r_eps"));
  m.def(
      "measure_to_set",
      [](const Configuration& config, double r_eps) {
        return measure_to_set(ScaledEmpiricalMeasure{config}, r_eps);
      },
      py::arg("config"), py::arg("r_eps"));
  m.def(
      "set_to_measure",
      [](const PixelSet& set, double epsilon) { return set_to_measure(set, epsilon).config; },
      py::arg("set"), py::arg("epsilon"));
  m.def("energy_bridge_report", &energy_bridge_report, py::arg("params"), py::arg("config"));
  m.def("smoothed_measure", &smoothed_measure, py::arg("config"));

  // Optimizers and diagnostics.
  py::enum_<Objective>(m, "Objective")
      .value("pair", Objective::pair)
      .value("renormalized", Objective::renormalized)
      .value("confined", Objective::confined);
  py::class_<AnnealSchedule>(m, "AnnealSchedule")
      .def(py::init([](double t0, double cooling, int epochs, std::int64_t moves_per_epoch,
                       double step, double teleport_fraction) {
             return AnnealSchedule{t0, cooling, epochs, moves_per_epoch, step,
                                   teleport_fraction};
           }),
           py::arg("t0") = 0.0, py::arg("cooling") = 0.95, py::arg("epochs") = 200,
           py::arg("moves_per_epoch") = 0, py::arg("step") = 0.0,
           py::arg("teleport_fraction") = 0.05)
      .def_readonly("t0", &AnnealSchedule::t0)
      .def_readonly("cooling", &AnnealSchedule::cooling)
      .def_readonly("epochs", &AnnealSchedule::epochs)
      .def_readonly("moves_per_epoch", &AnnealSchedule::moves_per_epoch)
      .def_readonly("step", &AnnealSchedule::step)
      .def_readonly("teleport_fraction", &AnnealSchedule::teleport_fraction);
  py::class_<AnnealTraceRow>(m, "AnnealTraceRow")
      .def_readonly("epoch", &AnnealTraceRow::epoch)
      .def_readonly("temperature", &AnnealTraceRow::temperature)
      .def_readonly("energy", &AnnealTraceRow::energy)
      .def_readonly("best_energy", &AnnealTraceRow::best_energy)
      .def_readonly("accept_rate", &AnnealTraceRow::accept_rate);
  py::class_<AnnealResult>(m, "AnnealResult")
      .def_readonly("config", &AnnealResult::config)
      .def_readonly("energy", &AnnealResult::energy)
      .def_readonly("trace", &AnnealResult::trace);
  m.def(
      "anneal_discrete",
      [](const Params& params, Objective objective,
         const std::optional<ConfinementSpec>& confinement, const Configuration& init,
         const Box& domain, const AnnealSchedule& schedule, std::uint64_t seed) {
        return anneal_discrete(params, objective, confinement ? &*confinement : nullptr, init,
                               domain, schedule, seed);
      },
      py::arg("params"), py::arg("objective"), py::arg("confinement"), py::arg("init"),
      py::arg("domain"), py::arg("schedule") = AnnealSchedule{}, py::arg("seed") = 1);

  py::class_<DescentOptions>(m, "DescentOptions")
      .def(py::init([](const Box& domain, double h, int max_steps, double tol_factor,
                       const QuadratureSpec& quad) {
             return DescentOptions{domain, h, max_steps, tol_factor, quad};
           }),
           py::arg("domain"), py::arg("h"), py::arg("max_steps") = 400,
           py::arg("tol_factor") = 10.0, py::arg("quad") = QuadratureSpec{})
      .def_readonly("h", &DescentOptions::h)
      .def_readonly("max_steps", &DescentOptions::max_steps)
      .def_readonly("tol_factor", &DescentOptions::tol_factor);
  py::class_<DescentResult>(m, "DescentResult")
      .def_readonly("rho", &DescentResult::rho)
      .def_readonly("objective", &DescentResult::objective)
      .def_readonly("kkt", &DescentResult::kkt)
      .def_readonly("steps", &DescentResult::steps)
      .def_readonly("trace", &DescentResult::trace);
  m.def("minimize_density", &minimize_density, py::arg("d"), py::arg("sigma"),
        py::arg("confinement"), py::arg("options"));

  py::class_<ShapeDiagnostics>(m, "ShapeDiagnostics")
      .def_readonly("ball_deficit", &ShapeDiagnostics::ball_deficit)
      .def_readonly("bang_bang_index", &ShapeDiagnostics::bang_bang_index)
      .def_readonly("mass", &ShapeDiagnostics::mass)
      .def_readonly("support_measure", &ShapeDiagnostics::support_measure);
  m.def("shape_diagnostics",
        py::overload_cast<const DensityField&>(&shape_diagnostics), py::arg("rho"));
  m.def("shape_diagnostics",
        py::overload_cast<const Configuration&>(&shape_diagnostics), py::arg("config"));

  // Packing rates and recovery lattices.
  py::class_<BoxDensityResult>(m, "BoxDensityResult")
      .def_readonly("config", &BoxDensityResult::config)
      .def_readonly("count", &BoxDensityResult::count)
      .def_readonly("density", &BoxDensityResult::density);
  m.def("estimate_box_density", &estimate_box_density, py::arg("d"), py::arg("r"),
        py::arg("anneal_budget"), py::arg("seed") = 1);
  m.def("recovery_configuration", &recovery_configuration, py::arg("rho"), py::arg("epsilon"));

  // Packaged studies.
  py::class_<Assertion>(m, "Assertion")
      .def_readonly("name", &Assertion::name)
      .def_readonly("pass_", &Assertion::pass)
      .def_readonly("details", &Assertion::details);
  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("name", &ExperimentResult::name)
      .def_readonly("assertions", &ExperimentResult::assertions)
      .def("passed", &ExperimentResult::passed);
  m.def("experiment_names", &experiment_names);
  m.def(
      "run_experiment",
      [](const std::string& name, const std::filesystem::path& out_dir, std::uint64_t seed,
         int threads, const std::map<std::string, std::string>& overrides) {
        ExperimentContext ctx;
        ctx.out_dir = out_dir;
        ctx.seed = seed;
        ctx.threads = threads;
        ctx.overrides = overrides;
        return run_experiment(name, ctx);
      },
      py::arg("name"), py::arg("out_dir"), py::arg("seed") = 1, py::arg("threads") = 1,
      py::arg("overrides") = std::map<std::string, std::string>{});

  // File round trips.
  m.def("save_configuration", &save_configuration, py::arg("path"), py::arg("config"));
  m.def("load_configuration", &load_configuration, py::arg("path"));
  m.def("save_pixel_set", &save_pixel_set, py::arg("path"), py::arg("set"));
  m.def("load_pixel_set", &load_pixel_set, py::arg("path"));
  m.def("save_field", &save_field, py::arg("path"), py::arg("field"));
  m.def("load_field", &load_field, py::arg("path"));
  m.def("load_density_field", &load_density_field, py::arg("path"));
}
