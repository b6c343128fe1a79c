#ifndef RKDMD_RUNNER_HPP
#define RKDMD_RUNNER_HPP

#include <json.hpp>
#include <string>

#include "rkdmd/config.hpp"

namespace rkdmd {

// Executes one experiment: writes CSVs, model files and report.json into
// cfg.output_dir and returns the report.  Throws ConfigError /
// NumericalError / CapacityError on failure.
nlohmann::json run_experiment(const ExperimentConfig& cfg);

// Column-wise difference metrics between two series tables written by this
// tool (shared grid required).  Used by the `compare` CLI subcommand.
nlohmann::json compare_tables(const std::string& path_a,
                              const std::string& path_b);

}  // namespace rkdmd

#endif  // RKDMD_RUNNER_HPP
