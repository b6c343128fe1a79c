#include "rkdmd/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "rkdmd/csv.hpp"
#include "rkdmd/gme.hpp"
#include "rkdmd/hierarchy.hpp"
#include "rkdmd/kernels.hpp"

namespace rkdmd {

namespace {

using nlohmann::json;

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ =
      std::chrono::steady_clock::now();
};

json complex_pair(const Complex& z) { return json::array({z.real(), z.imag()}); }

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

// Effective grid: driven systems get dt snapped to an integer divisor of the
// drive period so phase averages and period-shifted comparisons are exact.
double effective_dt(const ExperimentConfig& cfg, const EtHamiltonian& h,
                    std::vector<std::string>& notes) {
  if (!h.driven()) return cfg.grid_dt;
  const double period = h.period();
  const long k = std::max(1L, std::lround(period / cfg.grid_dt));
  const double dt = period / static_cast<double>(k);
  if (std::abs(dt - cfg.grid_dt) > 1e-12 * cfg.grid_dt) {
    std::ostringstream msg;
    msg << "grid.dt snapped from " << cfg.grid_dt << " to " << dt << " ("
        << k << " steps per drive period)";
    notes.push_back(msg.str());
  }
  return dt;
}

TimeGrid make_grid(double dt, double t_end) {
  TimeGrid grid;
  grid.t0 = 0.0;
  grid.dt = dt;
  grid.n = static_cast<int>(std::llround(t_end / dt)) + 1;
  grid.validate();
  return grid;
}

KernelSeries truncate_series(const KernelSeries& s, int count) {
  KernelSeries out;
  out.grid = s.grid;
  out.grid.n = count;
  for (const auto& [label, values] : s.comp)
    out.comp[label] = std::vector<Complex>(values.begin(),
                                           values.begin() + count);
  return out;
}

KernelSeries zero_pad_series(const KernelSeries& s, const TimeGrid& grid) {
  KernelSeries out;
  out.grid = grid;
  for (const auto& [label, values] : s.comp) {
    std::vector<Complex> padded(static_cast<std::size_t>(grid.n),
                                Complex(0.0, 0.0));
    const std::size_t keep =
        std::min(values.size(), padded.size());
    for (std::size_t i = 0; i < keep; ++i) padded[i] = values[i];
    out.comp[label] = std::move(padded);
  }
  return out;
}

double rel_l2(const std::vector<Complex>& test,
              const std::vector<Complex>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += std::norm(test[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double max_abs_diff(const std::vector<Complex>& a,
                    const std::vector<Complex>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

Complex dc_value(const KernelSeries& s, const std::string& label) {
  Complex acc(0.0, 0.0);
  for (const Complex& v : s.comp.at(label)) acc += v;
  return acc * s.grid.dt;
}

json series_comparison(const KernelSeries& test, const KernelSeries& ref) {
  json out;
  for (const auto& [label, ref_values] : ref.comp) {
    const auto it = test.comp.find(label);
    if (it == test.comp.end()) continue;
    out[label] = {{"rel_l2", rel_l2(it->second, ref_values)},
                  {"max_abs_diff", max_abs_diff(it->second, ref_values)}};
  }
  return out;
}

json bath_report(const ExperimentConfig& cfg,
                 const std::vector<BathExpansion>& expansions) {
  json out = json::array();
  for (std::size_t b = 0; b < expansions.size(); ++b) {
    const BathExpansion& e = expansions[b];
    json terms = json::array();
    for (const BathTerm& t : e.terms)
      terms.push_back({{"eta", complex_pair(t.eta)},
                       {"eta_bar", complex_pair(t.eta_bar)},
                       {"gamma", complex_pair(t.gamma)}});
    out.push_back(
        {{"coupling", to_string(e.coupling)},
         {"n_terms", e.terms.size()},
         {"c0", complex_pair(e.c0_sum())},
         {"c0_truncation_residual", e.c0_residual},
         {"markovian_weight_exact",
          markovian_weight_exact(cfg.baths[b].j, cfg.beta)},
         {"terms", terms}});
  }
  return out;
}

struct DirectTrajectory {
  std::vector<double> p_d;
  std::vector<Eigen::Matrix2cd> rho;
  PropagationMetrics metrics;
};

DirectTrajectory propagate_direct(const HierarchySpace& space,
                                  const EtHamiltonian& h, const TimeGrid& grid,
                                  int substeps, double p0) {
  AdoState init = thermal_donor_initial(space);
  init.values(0) = Complex(p0, 0.0);
  init.values(3) = Complex(1.0 - p0, 0.0);
  DirectTrajectory out;
  out.p_d.reserve(static_cast<std::size_t>(grid.n));
  out.rho.reserve(static_cast<std::size_t>(grid.n));
  propagate_observe(space, h, init, grid, substeps,
                    [&out](int, const AdoState& s) {
                      const Eigen::Matrix2cd m = tier0_matrix(s);
                      out.p_d.push_back(m(0, 0).real());
                      out.rho.push_back(m);
                    },
                    &out.metrics);
  return out;
}

double cycle_drift(const std::vector<double>& p, const TimeGrid& grid,
                   double period, double after_t) {
  const int k = static_cast<int>(std::llround(period / grid.dt));
  if (k < 1 || std::abs(k * grid.dt - period) > 1e-9 * period)
    throw NumericalError(
        "limit-cycle check: grid spacing is not commensurate with the period");
  double worst = 0.0;
  bool any = false;
  for (int i = 0; i + k < grid.n; ++i) {
    if (grid.time(i) < after_t) continue;
    worst = std::max(worst,
                     std::abs(p[static_cast<std::size_t>(i + k)] -
                              p[static_cast<std::size_t>(i)]));
    any = true;
  }
  if (!any)
    throw NumericalError(
        "limit-cycle check: horizon too short; raise floquet.periods");
  return worst;
}

json population_csv_and_metrics(const std::string& dir,
                                const std::string& file, const TimeGrid& grid,
                                const std::vector<double>& direct,
                                const std::vector<std::pair<std::string,
                                                            const std::vector<double>*>>&
                                    routes) {
  CsvTable table;
  table.header = {"t", "P_D_direct"};
  table.cols.push_back(grid.times());
  table.cols.push_back(direct);
  json metrics;
  for (const auto& [name, values] : routes) {
    table.header.push_back(name);
    table.cols.push_back(*values);
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i)
      worst = std::max(worst, std::abs((*values)[i] - direct[i]));
    metrics[name] = {{"max_abs_diff_vs_direct", worst}};
  }
  write_csv(join_path(dir, file), table);
  return metrics;
}

json prop_metrics_json(const PropagationMetrics& m) {
  return {{"max_trace_dev", m.max_trace_dev},
          {"max_herm_dev", m.max_herm_dev},
          {"substeps", m.substeps}};
}

// --- experiment bodies -----------------------------------------------------

json run_kernels(const ExperimentConfig& cfg);
json run_population(const ExperimentConfig& cfg);
json run_floquet(const ExperimentConfig& cfg);
json run_gme(const ExperimentConfig& cfg);
json run_dmd_fit(const ExperimentConfig& cfg);
json run_compare_experiment(const ExperimentConfig& cfg);

struct PipelinePieces {
  std::vector<BathExpansion> expansions;
  EtHamiltonian h = EtHamiltonian::et_params(0, 0, 1, 0, 0);
  std::unique_ptr<HierarchySpace> space;
  TimeGrid lag_grid;
  std::vector<std::string> notes;
};

PipelinePieces build_pipeline(const ExperimentConfig& cfg) {
  PipelinePieces p;
  p.notes = cfg.notes;
  p.expansions = cfg.build_expansions();
  p.h = cfg.system.build();
  p.space = std::make_unique<HierarchySpace>(
      p.expansions, cfg.depth,
      static_cast<std::size_t>(cfg.memory_cap_mb * 1024.0 * 1024.0));
  p.lag_grid = make_grid(effective_dt(cfg, p.h, p.notes), cfg.grid_t_end);
  if (cfg.snapshots > p.lag_grid.n)
    throw ConfigError(
        "grid.snapshots exceeds the number of samples on [0, grid.t_end]");
  return p;
}

json report_envelope(const ExperimentConfig& cfg,
                     const std::vector<std::string>& notes) {
  json report;
  report["experiment"] = to_string(cfg.experiment);
  report["config"] = cfg.raw;
  report["notes"] = notes;
  return report;
}

json dmd_report(const DmdModel& model, double recon_err) {
  return {{"rank", model.rank},
          {"dropped_modes", model.dropped_modes},
          {"delay", model.delay},
          {"reconstruction_err", recon_err}};
}

json run_kernels(const ExperimentConfig& cfg) {
  Stopwatch watch;
  PipelinePieces p = build_pipeline(cfg);
  json report = report_envelope(cfg, p.notes);
  report["bath"] = bath_report(cfg, p.expansions);
  json timings;
  timings["setup_sec"] = watch.lap();

  ExtractionInfo info;
  const KernelSeries reference =
      extract_kernel(*p.space, p.h, ProjectorKind::kPopulation, p.lag_grid,
                     0.0, cfg.substeps, &info);
  timings["reference_kernel_sec"] = watch.lap();

  const KernelSeries window = truncate_series(reference, cfg.snapshots);
  const SnapshotSet snaps = snapshots_from_series(reference, cfg.snapshots);
  const DmdModel model =
      fit_dmd(snaps, cfg.policy, cfg.amplitudes, cfg.delay);
  const double recon = reconstruction_error(model, snaps);
  const KernelSeries predicted = series_from_model(model, p.lag_grid);
  const KernelSeries padded = zero_pad_series(window, p.lag_grid);
  timings["dmd_sec"] = watch.lap();

  const SpectrumSeries spec_ref = kernel_fft(reference);
  const SpectrumSeries spec_dmd = kernel_fft(predicted);
  const SpectrumSeries spec_pad = kernel_fft(padded);
  timings["spectra_sec"] = watch.lap();

  write_csv(join_path(cfg.output_dir, "kernels_reference.csv"),
            kernel_table(reference));
  write_csv(join_path(cfg.output_dir, "kernels_dmd.csv"),
            kernel_table(predicted));
  write_csv(join_path(cfg.output_dir, "kernels_snapshots.csv"),
            kernel_table(window));
  write_csv(join_path(cfg.output_dir, "kernels_snapshots_zeropad.csv"),
            kernel_table(padded));
  write_csv(join_path(cfg.output_dir, "spectrum_reference.csv"),
            spectrum_table(spec_ref));
  write_csv(join_path(cfg.output_dir, "spectrum_dmd.csv"),
            spectrum_table(spec_dmd));
  write_csv(join_path(cfg.output_dir, "spectrum_snapshots_zeropad.csv"),
            spectrum_table(spec_pad));
  model.save_json(join_path(cfg.output_dir, "dmd_model.json"));

  report["hierarchy"] = {{"n_ado", p.space->n_ado()},
                         {"depth", cfg.depth},
                         {"n_terms", p.space->n_terms()},
                         {"max_tier_damping", p.space->max_tier_damping()}};
  report["extraction"] = {{"substeps", info.substeps},
                          {"max_trace_colsum", info.max_trace_colsum},
                          {"max_imag", info.max_imag}};
  report["dmd"] = dmd_report(model, recon);

  json metrics;
  metrics["dmd_vs_reference"] = series_comparison(predicted, reference);
  json dc;
  for (const std::string& label : reference.labels()) {
    const Complex ref_dc = dc_value(reference, label);
    const Complex dmd_dc = dc_value(predicted, label);
    const Complex pad_dc = dc_value(padded, label);
    dc[label] = {{"reference", complex_pair(ref_dc)},
                 {"dmd", complex_pair(dmd_dc)},
                 {"snapshots_zeropad", complex_pair(pad_dc)},
                 {"dmd_abs_dev", std::abs(dmd_dc - ref_dc)},
                 {"snapshots_zeropad_abs_dev", std::abs(pad_dc - ref_dc)}};
  }
  metrics["dc"] = dc;
  report["metrics"] = metrics;
  timings["write_sec"] = watch.lap();
  report["timings_sec"] = timings;
  return report;
}

json run_population(const ExperimentConfig& cfg) {
  Stopwatch watch;
  PipelinePieces p = build_pipeline(cfg);
  json report = report_envelope(cfg, p.notes);
  report["bath"] = bath_report(cfg, p.expansions);
  json timings;
  timings["setup_sec"] = watch.lap();

  ExtractionInfo info;
  const KernelSeries reference =
      extract_kernel(*p.space, p.h, ProjectorKind::kPopulation, p.lag_grid,
                     0.0, cfg.substeps, &info);
  timings["reference_kernel_sec"] = watch.lap();

  const KernelSeries window = truncate_series(reference, cfg.snapshots);
  const SnapshotSet snaps = snapshots_from_series(reference, cfg.snapshots);
  const DmdModel model =
      fit_dmd(snaps, cfg.policy, cfg.amplitudes, cfg.delay);
  const double recon = reconstruction_error(model, snaps);
  const KernelSeries predicted = series_from_model(model, p.lag_grid);
  timings["dmd_sec"] = watch.lap();

  const DirectTrajectory direct =
      propagate_direct(*p.space, p.h, p.lag_grid, cfg.substeps, cfg.p0);
  timings["direct_propagation_sec"] = watch.lap();

  const PopulationTrajectory sol_ref = solve_population(
      population_table(reference, p.lag_grid, false), cfg.p0, p.lag_grid);
  const PopulationTrajectory sol_dmd = solve_population(
      population_table(model, p.lag_grid), cfg.p0, p.lag_grid);
  const PopulationTrajectory sol_pad = solve_population(
      population_table(window, p.lag_grid, true), cfg.p0, p.lag_grid);
  timings["volterra_sec"] = watch.lap();

  write_csv(join_path(cfg.output_dir, "kernels_reference.csv"),
            kernel_table(reference));
  write_csv(join_path(cfg.output_dir, "kernels_dmd.csv"),
            kernel_table(predicted));
  model.save_json(join_path(cfg.output_dir, "dmd_model.json"));

  json metrics = population_csv_and_metrics(
      cfg.output_dir, "population.csv", p.lag_grid, direct.p_d,
      {{"P_D_ref_kernel", &sol_ref.p_d},
       {"P_D_dmd_kernel", &sol_dmd.p_d},
       {"P_D_snapshots_zeropad", &sol_pad.p_d}});
  metrics["P_D_ref_kernel"]["max_bound_dev"] = sol_ref.max_bound_dev;
  metrics["P_D_dmd_kernel"]["max_bound_dev"] = sol_dmd.max_bound_dev;
  metrics["P_D_snapshots_zeropad"]["max_bound_dev"] = sol_pad.max_bound_dev;
  metrics["dmd_vs_reference"] = series_comparison(predicted, reference);

  report["hierarchy"] = {{"n_ado", p.space->n_ado()},
                         {"depth", cfg.depth},
                         {"n_terms", p.space->n_terms()},
                         {"max_tier_damping", p.space->max_tier_damping()}};
  report["extraction"] = {{"substeps", info.substeps},
                          {"max_trace_colsum", info.max_trace_colsum},
                          {"max_imag", info.max_imag}};
  report["dmd"] = dmd_report(model, recon);
  report["direct"] = prop_metrics_json(direct.metrics);
  report["notes_zeropad"] =
      "P_D_snapshots_zeropad solves with the truncated kernel window "
      "zero-padded to the full grid";
  report["metrics"] = metrics;
  timings["write_sec"] = watch.lap();
  report["timings_sec"] = timings;
  return report;
}

json run_floquet(const ExperimentConfig& cfg) {
  Stopwatch watch;
  PipelinePieces p = build_pipeline(cfg);
  json report = report_envelope(cfg, p.notes);
  report["bath"] = bath_report(cfg, p.expansions);
  json timings;
  timings["setup_sec"] = watch.lap();

  ExtractionInfo info;
  const PhaseKernelSamples phases =
      extract_two_time_kernel(*p.space, p.h, p.lag_grid, cfg.floquet_n_phase,
                              cfg.substeps, &info);
  timings["two_time_kernel_sec"] = watch.lap();

  const FloquetKernelSet reference =
      fourier_components(phases, cfg.system.omega, cfg.floquet_n_max);
  const auto minus_one = fourier_component(phases, cfg.system.omega, -1);

  // Conjugate symmetry of the n = -1 harmonic, computed independently.
  double sym_dev = 0.0;
  if (cfg.floquet_n_max >= 1) {
    for (const auto& [label, values] : reference.comp[1]) {
      const std::vector<Complex>& neg = minus_one.at(label);
      for (std::size_t i = 0; i < values.size(); ++i)
        sym_dev = std::max(sym_dev, std::abs(neg[i] - std::conj(values[i])));
    }
  }

  // How well the kept harmonics rebuild the direct two-time samples.
  double recon_two_time = 0.0;
  double kernel_scale = 0.0;
  for (int j = 0; j < phases.n_phase; ++j) {
    const double t0 = phases.period * j / phases.n_phase;
    const KernelSeries& sample = phases.k[static_cast<std::size_t>(j)];
    for (int i = 0; i < p.lag_grid.n; ++i) {
      const auto rebuilt =
          floquet_reconstruct(reference, i, t0 + p.lag_grid.time(i));
      for (const auto& [label, values] : sample.comp) {
        const Complex direct_v = values[static_cast<std::size_t>(i)];
        kernel_scale = std::max(kernel_scale, std::abs(direct_v));
        recon_two_time = std::max(
            recon_two_time, std::abs(rebuilt.at(label) - direct_v));
      }
    }
  }
  timings["harmonics_sec"] = watch.lap();

  const KernelSeries flat_ref = flatten_floquet(reference);
  const SnapshotSet snaps = snapshots_from_series(flat_ref, cfg.snapshots);
  const DmdModel model =
      fit_dmd(snaps, cfg.policy, cfg.amplitudes, cfg.delay);
  const double recon = reconstruction_error(model, snaps);
  const KernelSeries flat_dmd = series_from_model(model, p.lag_grid);
  timings["dmd_sec"] = watch.lap();

  const TimeGrid solve_grid =
      make_grid(p.lag_grid.dt, cfg.floquet_periods * phases.period);
  const DirectTrajectory direct =
      propagate_direct(*p.space, p.h, solve_grid, cfg.substeps, cfg.p0);
  timings["direct_propagation_sec"] = watch.lap();

  const PopulationTrajectory sol_ref = solve_population_floquet(
      floquet_table(reference, solve_grid, true), cfg.p0, solve_grid);
  const PopulationTrajectory sol_dmd = solve_population_floquet(
      floquet_table(model, cfg.system.omega, cfg.floquet_n_max, solve_grid),
      cfg.p0, solve_grid);
  timings["volterra_sec"] = watch.lap();

  write_csv(join_path(cfg.output_dir, "floquet_kernels_reference.csv"),
            kernel_table(flat_ref));
  write_csv(join_path(cfg.output_dir, "floquet_kernels_dmd.csv"),
            kernel_table(flat_dmd));
  model.save_json(join_path(cfg.output_dir, "dmd_model.json"));

  json metrics = population_csv_and_metrics(
      cfg.output_dir, "population_floquet.csv", solve_grid, direct.p_d,
      {{"P_D_ref_kernel_zeropad", &sol_ref.p_d},
       {"P_D_dmd_kernel", &sol_dmd.p_d}});

  const double settle = 10.0 * phases.period;
  metrics["limit_cycle_drift"] = {
      {"after_t", settle},
      {"direct", cycle_drift(direct.p_d, solve_grid, phases.period, settle)},
      {"ref_kernel_zeropad",
       cycle_drift(sol_ref.p_d, solve_grid, phases.period, settle)},
      {"dmd_kernel",
       cycle_drift(sol_dmd.p_d, solve_grid, phases.period, settle)}};

  json peaks;
  for (const auto& [label, ignored] : reference.comp[0]) {
    json arr = json::array();
    for (int n = 0; n <= cfg.floquet_n_max; ++n) {
      double peak = 0.0;
      for (const Complex& v :
           reference.comp[static_cast<std::size_t>(n)].at(label))
        peak = std::max(peak, std::abs(v));
      arr.push_back(peak);
    }
    peaks[label] = arr;
  }
  metrics["harmonic_peaks"] = peaks;
  metrics["minus_one_conj_symmetry_dev"] = sym_dev;
  metrics["two_time_reconstruction"] = {{"max_abs_err", recon_two_time},
                                        {"kernel_scale", kernel_scale}};
  metrics["dmd_vs_reference"] = series_comparison(flat_dmd, flat_ref);

  report["hierarchy"] = {{"n_ado", p.space->n_ado()},
                         {"depth", cfg.depth},
                         {"n_terms", p.space->n_terms()},
                         {"max_tier_damping", p.space->max_tier_damping()}};
  report["extraction"] = {{"substeps", info.substeps},
                          {"max_trace_colsum", info.max_trace_colsum},
                          {"max_imag", info.max_imag},
                          {"n_phase", cfg.floquet_n_phase}};
  report["dmd"] = dmd_report(model, recon);
  report["direct"] = prop_metrics_json(direct.metrics);
  report["metrics"] = metrics;
  timings["write_sec"] = watch.lap();
  report["timings_sec"] = timings;
  return report;
}

json run_gme(const ExperimentConfig& cfg) {
  Stopwatch watch;
  PipelinePieces p = build_pipeline(cfg);
  json report = report_envelope(cfg, p.notes);
  report["bath"] = bath_report(cfg, p.expansions);
  json timings;
  timings["setup_sec"] = watch.lap();

  ExtractionInfo tensor_info;
  const KernelSeries tensor =
      extract_kernel(*p.space, p.h, ProjectorKind::kSystem, p.lag_grid, 0.0,
                     cfg.substeps, &tensor_info);
  timings["tensor_kernel_sec"] = watch.lap();

  ExtractionInfo pop_info;
  const KernelSeries pop_kernels =
      extract_kernel(*p.space, p.h, ProjectorKind::kPopulation, p.lag_grid,
                     0.0, cfg.substeps, &pop_info);
  timings["population_kernel_sec"] = watch.lap();

  const SnapshotSet snaps = snapshots_from_series(tensor, cfg.snapshots);
  const DmdModel model =
      fit_dmd(snaps, cfg.policy, cfg.amplitudes, cfg.delay);
  const double recon = reconstruction_error(model, snaps);
  const KernelSeries predicted = series_from_model(model, p.lag_grid);
  timings["dmd_sec"] = watch.lap();

  Eigen::Matrix2cd rho0 = Eigen::Matrix2cd::Zero();
  rho0(0, 0) = cfg.p0;
  rho0(1, 1) = 1.0 - cfg.p0;
  const DensityTrajectory traj_ref = solve_gme(
      gme_table(tensor, p.lag_grid, false), p.h, rho0, p.lag_grid);
  const DensityTrajectory traj_dmd =
      solve_gme(gme_table(model, p.lag_grid), p.h, rho0, p.lag_grid);
  const PopulationTrajectory pop_ref = solve_population(
      population_table(pop_kernels, p.lag_grid, false), cfg.p0, p.lag_grid);
  timings["solves_sec"] = watch.lap();

  const DirectTrajectory direct =
      propagate_direct(*p.space, p.h, p.lag_grid, cfg.substeps, cfg.p0);
  timings["direct_propagation_sec"] = watch.lap();

  write_csv(join_path(cfg.output_dir, "kernel_tensor_reference.csv"),
            kernel_table(tensor));
  write_csv(join_path(cfg.output_dir, "kernel_tensor_dmd.csv"),
            kernel_table(predicted));
  write_csv(join_path(cfg.output_dir, "kernels_reference.csv"),
            kernel_table(pop_kernels));
  model.save_json(join_path(cfg.output_dir, "dmd_model.json"));

  auto rho_csv = [&](const std::string& name, const DensityTrajectory& traj) {
    CsvTable table;
    table.header = {"t",
                    "rho_DD_re", "rho_DD_im",
                    "rho_AD_re", "rho_AD_im",
                    "rho_DA_re", "rho_DA_im",
                    "rho_AA_re", "rho_AA_im"};
    table.cols.assign(9, {});
    table.cols[0] = p.lag_grid.times();
    for (const Eigen::Matrix2cd& m : traj.rho) {
      table.cols[1].push_back(m(0, 0).real());
      table.cols[2].push_back(m(0, 0).imag());
      table.cols[3].push_back(m(1, 0).real());
      table.cols[4].push_back(m(1, 0).imag());
      table.cols[5].push_back(m(0, 1).real());
      table.cols[6].push_back(m(0, 1).imag());
      table.cols[7].push_back(m(1, 1).real());
      table.cols[8].push_back(m(1, 1).imag());
    }
    write_csv(join_path(cfg.output_dir, name + ".csv"), table);
    write_json_file(join_path(cfg.output_dir, name + ".metrics.json"),
                    {{"max_trace_dev", traj.max_trace_dev},
                     {"max_herm_dev", traj.max_herm_dev},
                     {"flagged", traj.flagged},
                     {"tolerance", kGmeInvariantTol}});
  };
  rho_csv("gme_reference", traj_ref);
  rho_csv("gme_dmd", traj_dmd);

  json metrics = population_csv_and_metrics(
      cfg.output_dir, "population_crosscheck.csv", p.lag_grid, direct.p_d,
      {{"P_D_pop_kernel", &pop_ref.p_d}});
  {
    std::vector<double> gme_pd;
    gme_pd.reserve(traj_ref.rho.size());
    for (const Eigen::Matrix2cd& m : traj_ref.rho)
      gme_pd.push_back(m(0, 0).real());
    double vs_pop = 0.0, vs_direct = 0.0;
    for (std::size_t i = 0; i < gme_pd.size(); ++i) {
      vs_pop = std::max(vs_pop, std::abs(gme_pd[i] - pop_ref.p_d[i]));
      vs_direct = std::max(vs_direct, std::abs(gme_pd[i] - direct.p_d[i]));
    }
    double dmd_vs_direct = 0.0;
    for (std::size_t i = 0; i < traj_dmd.rho.size(); ++i)
      dmd_vs_direct = std::max(
          dmd_vs_direct,
          std::abs(traj_dmd.rho[i](0, 0).real() - direct.p_d[i]));
    metrics["crosscheck"] = {{"gme_ref_vs_pop_ref", vs_pop},
                             {"gme_ref_vs_direct", vs_direct},
                             {"gme_dmd_vs_direct", dmd_vs_direct}};
  }

  // Which Hermiticity relation the off-diagonal blocks actually satisfy.
  {
    static const char* kEntry[4] = {"D,D", "A,D", "D,A", "A,A"};
    static const int kSwap[4] = {0, 2, 1, 3};  // (a,b) -> (b,a)
    double transpose_conj = 0.0, entrywise_conj = 0.0, scale = 0.0;
    for (int c = 0; c < 4; ++c) {
      const auto& da = tensor.comp.at(std::string("K_DA[") + kEntry[c] + "]");
      const auto& ad_swap =
          tensor.comp.at(std::string("K_AD[") + kEntry[kSwap[c]] + "]");
      const auto& ad_same =
          tensor.comp.at(std::string("K_AD[") + kEntry[c] + "]");
      for (std::size_t i = 0; i < da.size(); ++i) {
        scale = std::max(scale, std::abs(da[i]));
        transpose_conj =
            std::max(transpose_conj, std::abs(da[i] - std::conj(ad_swap[i])));
        entrywise_conj =
            std::max(entrywise_conj, std::abs(da[i] - std::conj(ad_same[i])));
      }
    }
    metrics["offdiag_block_relation"] = {
        {"max_dev_transpose_conj", transpose_conj},
        {"max_dev_entrywise_conj", entrywise_conj},
        {"block_scale", scale},
        {"supported", transpose_conj <= entrywise_conj
                          ? "K_DA[a,b] = conj(K_AD[b,a])"
                          : "K_DA[a,b] = conj(K_AD[a,b])"}};
  }

  {
    const std::size_t last = traj_ref.rho.size() - 1;
    metrics["im_rho_DA_final"] = {
        {"reference", std::abs(traj_ref.rho[last](0, 1).imag())},
        {"dmd", std::abs(traj_dmd.rho[last](0, 1).imag())}};
  }
  metrics["dmd_vs_reference"] = series_comparison(predicted, tensor);

  report["hierarchy"] = {{"n_ado", p.space->n_ado()},
                         {"depth", cfg.depth},
                         {"n_terms", p.space->n_terms()},
                         {"max_tier_damping", p.space->max_tier_damping()}};
  report["extraction"] = {
      {"tensor", {{"substeps", tensor_info.substeps},
                  {"max_trace_colsum", tensor_info.max_trace_colsum}}},
      {"population", {{"substeps", pop_info.substeps},
                      {"max_trace_colsum", pop_info.max_trace_colsum},
                      {"max_imag", pop_info.max_imag}}}};
  report["dmd"] = dmd_report(model, recon);
  report["direct"] = prop_metrics_json(direct.metrics);
  report["gme_reference"] = {{"max_trace_dev", traj_ref.max_trace_dev},
                             {"max_herm_dev", traj_ref.max_herm_dev},
                             {"flagged", traj_ref.flagged}};
  report["gme_dmd"] = {{"max_trace_dev", traj_dmd.max_trace_dev},
                       {"max_herm_dev", traj_dmd.max_herm_dev},
                       {"flagged", traj_dmd.flagged}};
  report["metrics"] = metrics;
  timings["write_sec"] = watch.lap();
  report["timings_sec"] = timings;
  return report;
}

json run_dmd_fit(const ExperimentConfig& cfg) {
  Stopwatch watch;
  json report = report_envelope(cfg, cfg.notes);
  json timings;

  const KernelSeries input = kernel_from_table(read_csv(cfg.input_series));
  const int count = cfg.snapshots > 0 ? cfg.snapshots : input.grid.n;
  if (count > input.grid.n)
    throw ConfigError("grid.snapshots exceeds the rows of the input series");
  const SnapshotSet snaps = snapshots_from_series(input, count);
  const DmdModel model =
      fit_dmd(snaps, cfg.policy, cfg.amplitudes, cfg.delay);
  const double recon = reconstruction_error(model, snaps);
  timings["dmd_sec"] = watch.lap();

  TimeGrid horizon;
  horizon.t0 = input.grid.t0;
  horizon.dt = input.grid.dt;
  horizon.n = static_cast<int>(
                  std::llround((cfg.grid_t_end - input.grid.t0) / horizon.dt)) +
              1;
  horizon.validate();
  const KernelSeries predicted = series_from_model(model, horizon);

  model.save_json(join_path(cfg.output_dir, "dmd_model.json"));
  write_csv(join_path(cfg.output_dir, "prediction.csv"),
            kernel_table(predicted));

  json metrics;
  const int overlap = std::min(horizon.n, input.grid.n);
  metrics["window_vs_input"] =
      series_comparison(truncate_series(predicted, overlap),
                        truncate_series(input, overlap));
  report["dmd"] = dmd_report(model, recon);
  report["metrics"] = metrics;
  timings["write_sec"] = watch.lap();
  report["timings_sec"] = timings;
  return report;
}

json run_compare_experiment(const ExperimentConfig& cfg) {
  json report = report_envelope(cfg, cfg.notes);
  report["compare"] = compare_tables(cfg.compare_a, cfg.compare_b);
  return report;
}

}  // namespace

json run_experiment(const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + cfg.output_dir +
                      "': " + ec.message());

  json report;
  switch (cfg.experiment) {
    case ExperimentKind::kKernels: report = run_kernels(cfg); break;
    case ExperimentKind::kFloquetKernels: report = run_floquet(cfg); break;
    case ExperimentKind::kPopulation: report = run_population(cfg); break;
    case ExperimentKind::kGme: report = run_gme(cfg); break;
    case ExperimentKind::kDmdFit: report = run_dmd_fit(cfg); break;
    case ExperimentKind::kCompare: report = run_compare_experiment(cfg); break;
  }
  write_json_file(join_path(cfg.output_dir, "report.json"), report);
  return report;
}

json compare_tables(const std::string& path_a, const std::string& path_b) {
  const CsvTable a = read_csv(path_a);
  const CsvTable b = read_csv(path_b);
  const int ta = a.find("t");
  const int tb = b.find("t");
  const int oa = a.find("omega");
  const int ob = b.find("omega");
  std::string axis = "t";
  int ca = ta, cb = tb;
  if (ta < 0 && oa >= 0) {
    axis = "omega";
    ca = oa;
    cb = ob;
  }
  if (ca < 0 || cb < 0)
    throw ConfigError("compare: both files need a 't' (or 'omega') column");

  const std::vector<double>& ax_a = a.cols[static_cast<std::size_t>(ca)];
  const std::vector<double>& ax_b = b.cols[static_cast<std::size_t>(cb)];
  if (ax_a.size() != ax_b.size())
    throw ConfigError("compare: row counts differ");
  for (std::size_t i = 0; i < ax_a.size(); ++i)
    if (std::abs(ax_a[i] - ax_b[i]) >
        1e-9 * std::max(1.0, std::abs(ax_a[i])))
      throw ConfigError("compare: axis values differ between the files");

  json columns;
  double overall = 0.0;
  json missing = json::array();
  for (std::size_t c = 0; c < a.header.size(); ++c) {
    if (static_cast<int>(c) == ca) continue;
    const int other = b.find(a.header[c]);
    if (other < 0) {
      missing.push_back(a.header[c]);
      continue;
    }
    const std::vector<double>& va = a.cols[c];
    const std::vector<double>& vb = b.cols[static_cast<std::size_t>(other)];
    double worst = 0.0, num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
      worst = std::max(worst, std::abs(va[i] - vb[i]));
      num += (va[i] - vb[i]) * (va[i] - vb[i]);
      den += va[i] * va[i];
    }
    overall = std::max(overall, worst);
    columns[a.header[c]] = {
        {"max_abs_diff", worst},
        {"rel_l2", den > 0.0 ? std::sqrt(num / den) : std::sqrt(num)}};
  }

  json out;
  out["a"] = path_a;
  out["b"] = path_b;
  out["axis"] = axis;
  out["rows"] = ax_a.size();
  out["columns"] = columns;
  out["missing_in_b"] = missing;
  out["max_abs_diff"] = overall;
  return out;
}

}  // namespace rkdmd
