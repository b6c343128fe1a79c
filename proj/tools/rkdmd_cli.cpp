#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <new>
#include <string>

#include <CLI11.hpp>

#include "rkdmd/runner.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

// RKDMD_THREADS caps the worker thread count; unset means library default.
void apply_thread_env() {
  const char* env = std::getenv("RKDMD_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1)
    throw rkdmd::ConfigError(
        std::string("RKDMD_THREADS must be a positive integer, got '") + env +
        "'");
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(n));
#endif
}

int run_command(const std::string& config_path) {
  const rkdmd::ExperimentConfig cfg = rkdmd::parse_config_file(config_path);
  for (const std::string& note : cfg.notes)
    std::cout << "note: " << note << "\n";

  const nlohmann::json report = rkdmd::run_experiment(cfg);
  if (report.contains("notes")) {
    for (const auto& note : report["notes"]) {
      const std::string text = note.get<std::string>();
      if (std::find(cfg.notes.begin(), cfg.notes.end(), text) ==
          cfg.notes.end())
        std::cout << "note: " << text << "\n";
    }
  }
  std::cout << "experiment: " << report["experiment"].get<std::string>()
            << "\n";
  std::cout << "report: " << cfg.output_dir << "/report.json\n";
  return 0;
}

int compare_command(const std::string& a, const std::string& b,
                    const std::string& out_path) {
  const nlohmann::json result = rkdmd::compare_tables(a, b);
  std::cout << result.dump(2) << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out)
      throw rkdmd::ConfigError("cannot write '" + out_path + "'");
    out << result.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Memory-kernel extraction, DMD extrapolation and generalized "
      "rate-equation solves for a two-level electron-transfer system"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Path to a .cfg file")->required();

  std::string cmp_a, cmp_b, cmp_out;
  CLI::App* cmp =
      app.add_subcommand("compare", "Compare two series CSV files");
  cmp->add_option("a", cmp_a, "First CSV")->required();
  cmp->add_option("b", cmp_b, "Second CSV")->required();
  cmp->add_option("-o,--output", cmp_out, "Write the metrics JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_thread_env();
    if (run->parsed()) return run_command(config_path);
    return compare_command(cmp_a, cmp_b, cmp_out);
  } catch (const rkdmd::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rkdmd::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return 4;
  } catch (const rkdmd::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
