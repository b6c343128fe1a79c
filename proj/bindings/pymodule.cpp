#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rkdmd/config.hpp"
#include "rkdmd/csv.hpp"
#include "rkdmd/gme.hpp"
#include "rkdmd/runner.hpp"

namespace py = pybind11;
using namespace rkdmd;

namespace {

PopulationTrajectory solve_population_series(const KernelSeries& series,
                                             double p0, const TimeGrid& grid,
                                             bool zero_pad) {
  return solve_population(population_table(series, grid, zero_pad), p0, grid);
}

PopulationTrajectory solve_population_model(const DmdModel& model, double p0,
                                            const TimeGrid& grid) {
  return solve_population(population_table(model, grid), p0, grid);
}

py::dict propagate_populations(const HierarchySpace& space,
                               const EtHamiltonian& h, const TimeGrid& grid,
                               int substeps, double p0) {
  AdoState init = thermal_donor_initial(space);
  init.values(0) = Complex(p0, 0.0);
  init.values(3) = Complex(1.0 - p0, 0.0);
  std::vector<double> pd;
  pd.reserve(static_cast<std::size_t>(grid.n));
  PropagationMetrics metrics;
  propagate_observe(space, h, init, grid, substeps,
                    [&pd](int, const AdoState& s) {
                      pd.push_back(s.values(0).real());
                    },
                    &metrics);
  py::dict out;
  out["t"] = grid.times();
  out["p_d"] = pd;
  out["max_trace_dev"] = metrics.max_trace_dev;
  out["max_herm_dev"] = metrics.max_herm_dev;
  out["substeps"] = metrics.substeps;
  return out;
}

std::string run_config(const std::string& path) {
  return run_experiment(parse_config_file(path)).dump(2);
}

std::string compare_files(const std::string& a, const std::string& b) {
  return compare_tables(a, b).dump(2);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Memory kernels of a dissipative two-level system, DMD extrapolation "
      "and generalized rate-equation solvers";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError",
                                        PyExc_MemoryError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init([](double t0, double dt, int n) {
             TimeGrid g;
             g.t0 = t0;
             g.dt = dt;
             g.n = n;
             g.validate();
             return g;
           }),
           py::arg("t0"), py::arg("dt"), py::arg("n"))
      .def_readonly("t0", &TimeGrid::t0)
      .def_readonly("dt", &TimeGrid::dt)
      .def_readonly("n", &TimeGrid::n)
      .def("times", &TimeGrid::times);

  py::enum_<SpectralDensity::Kind>(m, "SpectralKind")
      .value("DRUDE", SpectralDensity::Kind::kDrude)
      .value("BROWNIAN", SpectralDensity::Kind::kBrownian);

  py::class_<SpectralDensity>(m, "SpectralDensity")
      .def_static("drude", &SpectralDensity::drude, py::arg("lambda_"),
                  py::arg("gamma"))
      .def_static("brownian", &SpectralDensity::brownian, py::arg("lambda_"),
                  py::arg("omega0"), py::arg("zeta"))
      .def_readonly("kind", &SpectralDensity::kind);

  m.def("eval_j", &eval_j, py::arg("density"), py::arg("omega"));
  m.def("markovian_weight_exact", &markovian_weight_exact, py::arg("density"),
        py::arg("beta"));

  py::enum_<CouplingLabel>(m, "CouplingLabel")
      .value("DONOR_GAP", CouplingLabel::kDonorGap)
      .value("BRIDGE", CouplingLabel::kBridge);

  py::class_<BathTerm>(m, "BathTerm")
      .def_readonly("eta", &BathTerm::eta)
      .def_readonly("eta_bar", &BathTerm::eta_bar)
      .def_readonly("gamma", &BathTerm::gamma);

  py::class_<BathExpansion>(m, "BathExpansion")
      .def_readonly("terms", &BathExpansion::terms)
      .def_readonly("beta", &BathExpansion::beta)
      .def_readonly("n_matsubara", &BathExpansion::n_matsubara)
      .def_readonly("c0_residual", &BathExpansion::c0_residual)
      .def("c_at", &BathExpansion::c_at, py::arg("t"))
      .def("c0_sum", &BathExpansion::c0_sum);

  m.def("correlation_expansion", &correlation_expansion, py::arg("density"),
        py::arg("beta"), py::arg("n_matsubara"), py::arg("coupling"));

  py::class_<EtHamiltonian>(m, "EtHamiltonian")
      .def_static("fixed", &EtHamiltonian::fixed, py::arg("h"))
      .def_static("et_params", &EtHamiltonian::et_params, py::arg("e0"),
                  py::arg("lambda_"), py::arg("vbar"), py::arg("eps"),
                  py::arg("omega"))
      .def("at", &EtHamiltonian::at, py::arg("t"))
      .def("driven", &EtHamiltonian::driven)
      .def("period", &EtHamiltonian::period);

  py::class_<HierarchySpace>(m, "HierarchySpace")
      .def(py::init<const std::vector<BathExpansion>&, int, std::size_t>(),
           py::arg("baths"), py::arg("depth"),
           py::arg("memory_cap_bytes") = HierarchySpace::kDefaultMemoryCap)
      .def_property_readonly("n_ado", &HierarchySpace::n_ado)
      .def_property_readonly("n_terms", &HierarchySpace::n_terms)
      .def_property_readonly("depth", &HierarchySpace::depth)
      .def_property_readonly("max_tier_damping",
                             &HierarchySpace::max_tier_damping);

  m.def("propagate_populations", &propagate_populations, py::arg("space"),
        py::arg("h"), py::arg("grid"), py::arg("substeps") = 0,
        py::arg("p0") = 1.0);

  py::enum_<ProjectorKind>(m, "ProjectorKind")
      .value("POPULATION", ProjectorKind::kPopulation)
      .value("SYSTEM", ProjectorKind::kSystem);

  py::class_<KernelSeries>(m, "KernelSeries")
      .def_readonly("grid", &KernelSeries::grid)
      .def("labels", &KernelSeries::labels)
      .def("component",
           [](const KernelSeries& s, const std::string& label) {
             auto it = s.comp.find(label);
             if (it == s.comp.end())
               throw ConfigError("no component '" + label + "'");
             return it->second;
           },
           py::arg("label"));

  m.def("extract_kernel",
        [](const HierarchySpace& space, const EtHamiltonian& h,
           ProjectorKind kind, const TimeGrid& grid, double t_origin,
           int substeps) {
          return extract_kernel(space, h, kind, grid, t_origin, substeps);
        },
        py::arg("space"), py::arg("h"), py::arg("kind"), py::arg("grid"),
        py::arg("t_origin") = 0.0, py::arg("substeps") = 0);

  py::class_<SpectrumSeries>(m, "SpectrumSeries")
      .def_readonly("omega", &SpectrumSeries::omega)
      .def("component",
           [](const SpectrumSeries& s, const std::string& label) {
             auto it = s.comp.find(label);
             if (it == s.comp.end())
               throw ConfigError("no component '" + label + "'");
             return it->second;
           },
           py::arg("label"));

  m.def("kernel_fft", &kernel_fft, py::arg("series"));

  py::class_<RankPolicy>(m, "RankPolicy")
      .def_static("fixed", &RankPolicy::fixed, py::arg("rank"))
      .def_static("threshold", &RankPolicy::threshold, py::arg("eps_rel"));

  py::enum_<AmplitudeMethod>(m, "AmplitudeMethod")
      .value("PROJECT", AmplitudeMethod::kProject)
      .value("TRAJECTORY_LSQ", AmplitudeMethod::kTrajectoryLsq);

  py::class_<SnapshotSet>(m, "SnapshotSet")
      .def(py::init([](const CMatrix& data, double dt, double t0,
                       const std::vector<std::string>& labels) {
             SnapshotSet s;
             s.data = data;
             s.dt = dt;
             s.t0 = t0;
             s.labels = labels;
             s.validate();
             return s;
           }),
           py::arg("data"), py::arg("dt"), py::arg("t0") = 0.0,
           py::arg("labels") = std::vector<std::string>());

  py::class_<DmdModel>(m, "DmdModel")
      .def_readonly("base_dim", &DmdModel::base_dim)
      .def_readonly("delay", &DmdModel::delay)
      .def_readonly("rank", &DmdModel::rank)
      .def_readonly("dropped_modes", &DmdModel::dropped_modes)
      .def_readonly("disc_eigs", &DmdModel::disc_eigs)
      .def_readonly("cont_freqs", &DmdModel::cont_freqs)
      .def_readonly("amplitudes", &DmdModel::amplitudes)
      .def_readonly("modes", &DmdModel::modes)
      .def_readonly("labels", &DmdModel::labels)
      .def("predict", &DmdModel::predict, py::arg("t"))
      .def("predict_series", &DmdModel::predict_series, py::arg("grid"))
      .def("save_json", &DmdModel::save_json, py::arg("path"))
      .def_static("load_json", &DmdModel::load_json, py::arg("path"));

  m.def("fit_dmd", &fit_dmd, py::arg("snapshots"), py::arg("policy"),
        py::arg("amplitudes") = AmplitudeMethod::kTrajectoryLsq,
        py::arg("delay") = 25);
  m.def("reconstruction_error", &reconstruction_error, py::arg("model"),
        py::arg("snapshots"));
  m.def("snapshots_from_series", &snapshots_from_series, py::arg("series"),
        py::arg("count"));
  m.def("series_from_model", &series_from_model, py::arg("model"),
        py::arg("grid"));

  py::class_<PopulationTrajectory>(m, "PopulationTrajectory")
      .def_readonly("grid", &PopulationTrajectory::grid)
      .def_readonly("p_d", &PopulationTrajectory::p_d)
      .def_readonly("max_bound_dev", &PopulationTrajectory::max_bound_dev);

  m.def("solve_population_series", &solve_population_series,
        py::arg("series"), py::arg("p0"), py::arg("grid"),
        py::arg("zero_pad") = false);
  m.def("solve_population_model", &solve_population_model, py::arg("model"),
        py::arg("p0"), py::arg("grid"));

  m.def("run_config", &run_config, py::arg("path"),
        "Run an experiment config file; returns the report as a JSON string");
  m.def("compare_files", &compare_files, py::arg("a"), py::arg("b"));
}
