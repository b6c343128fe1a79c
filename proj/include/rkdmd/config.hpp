#ifndef RKDMD_CONFIG_HPP
#define RKDMD_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "rkdmd/bath.hpp"
#include "rkdmd/dmd.hpp"
#include "rkdmd/hamiltonian.hpp"

namespace rkdmd {

enum class ExperimentKind {
  kKernels,
  kFloquetKernels,
  kPopulation,
  kGme,
  kDmdFit,
  kCompare,
};

struct SystemConfig {
  enum class Mode { kExplicit, kEtParams };
  Mode mode = Mode::kEtParams;
  // explicit mode
  double h_dd = 0.0;
  double h_aa = 0.0;
  Complex h_da = Complex(0.0, 0.0);
  // et_params mode
  double e0 = 0.0;
  double lambda = 0.0;
  double vbar = 1.0;
  double eps = 0.0;
  double omega = 0.0;

  EtHamiltonian build() const;
};

struct BathEntryConfig {
  SpectralDensity j;
  CouplingLabel coupling = CouplingLabel::kDonorGap;
};

// Everything a run needs, parsed from the flat `key = value` file format.
// Parsing collects every violation and reports them in one ConfigError.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kKernels;
  std::string output_dir = "out";

  SystemConfig system;
  double beta = 1.0;
  int n_matsubara = 6;
  std::vector<BathEntryConfig> baths;

  int depth = 0;
  double memory_cap_mb = 2048.0;
  int substeps = 0;  // 0 = pick from the stiffness bound

  double grid_dt = 0.0;
  double grid_t_end = 0.0;
  int snapshots = 0;

  RankPolicy policy;
  int delay = 25;
  AmplitudeMethod amplitudes = AmplitudeMethod::kTrajectoryLsq;

  int floquet_n_max = 3;
  int floquet_n_phase = 32;
  double floquet_periods = 14.0;

  double p0 = 1.0;

  std::string input_series;
  std::string compare_a;
  std::string compare_b;

  // Defaults that were silently filled in plus any grid adjustments; these
  // are echoed by the CLI and recorded in the run report.
  std::vector<std::string> notes;
  std::map<std::string, std::string> raw;

  std::vector<BathExpansion> build_expansions() const;
};

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin);
ExperimentConfig parse_config_file(const std::string& path);

std::string to_string(ExperimentKind kind);

}  // namespace rkdmd

#endif  // RKDMD_CONFIG_HPP
