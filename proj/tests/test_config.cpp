#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "rkdmd/config.hpp"

using namespace rkdmd;

namespace {

const char* kKernelsCfg = R"(# electron transfer, symmetric explicit system
experiment = kernels
output.dir = run_out

system.mode = explicit
system.h.dd = 1.0
system.h.aa = -1.0
system.h.da.re = 1.0

bath.beta = 1.0
bath.n_matsubara = 4
bath.1.kind = drude
bath.1.coupling = donor_gap
bath.1.lambda = 1.0
bath.1.gamma = 1.0

hierarchy.depth = 6
grid.dt = 0.01        # inline comments are stripped
grid.t_end = 6.0
grid.snapshots = 150
)";

std::string count_problems(const std::string& what) {
  // The aggregate error lists one "  - " bullet per problem.
  std::string out;
  std::size_t pos = 0, n = 0;
  while ((pos = what.find("\n  - ", pos)) != std::string::npos) {
    ++n;
    pos += 5;
  }
  return std::to_string(n);
}

}  // namespace

TEST_CASE("a complete kernels config parses with no default notes") {
  ExperimentConfig cfg = parse_config_text(kKernelsCfg, "demo.cfg");
  CHECK(cfg.experiment == ExperimentKind::kKernels);
  CHECK(cfg.output_dir == "run_out");
  CHECK(cfg.system.mode == SystemConfig::Mode::kExplicit);
  CHECK(cfg.system.h_dd == 1.0);
  CHECK(cfg.system.h_aa == -1.0);
  CHECK(cfg.system.h_da == Complex(1.0, 0.0));
  CHECK(cfg.beta == 1.0);
  CHECK(cfg.n_matsubara == 4);
  REQUIRE(cfg.baths.size() == 1);
  CHECK(cfg.baths[0].j.kind == SpectralDensity::Kind::kDrude);
  CHECK(cfg.baths[0].coupling == CouplingLabel::kDonorGap);
  CHECK(cfg.depth == 6);
  CHECK(cfg.grid_dt == 0.01);
  CHECK(cfg.grid_t_end == 6.0);
  CHECK(cfg.snapshots == 150);
  // dmd defaults
  CHECK(cfg.policy.mode == RankPolicy::Mode::kThreshold);
  CHECK(cfg.policy.eps_rel == 1e-10);
  CHECK(cfg.delay == 25);
  CHECK(cfg.amplitudes == AmplitudeMethod::kTrajectoryLsq);
  CHECK(cfg.notes.empty());

  std::vector<BathExpansion> baths = cfg.build_expansions();
  REQUIRE(baths.size() == 1);
  CHECK(baths[0].terms.size() == 5);  // one pole + 4 Matsubara
}

TEST_CASE("silently filled defaults are echoed as notes") {
  ExperimentConfig cfg = parse_config_text(R"(
experiment = kernels
system.mode = et_params
system.e0 = 1.5
system.lambda = 0.2
bath.1.kind = drude
bath.1.coupling = donor_gap
bath.1.lambda = 1.0
bath.1.gamma = 1.0
hierarchy.depth = 4
grid.dt = 0.01
grid.t_end = 2.0
grid.snapshots = 50
)",
                                           "demo.cfg");
  CHECK(cfg.system.vbar == 1.0);
  CHECK(cfg.beta == 1.0);
  REQUIRE(cfg.notes.size() == 2);
  CHECK(cfg.notes[0] == "system.vbar not set; using default 1.0");
  CHECK(cfg.notes[1] == "bath.beta not set; using default 1.0");
}

TEST_CASE("every problem is collected into a single report") {
  const char* broken = R"(
experiment = kernels
experiment = kernels
just some words
system.mode = explicit
system.h.dd = abc
bath.1.kind = drude
bath.1.coupling = donor_gap
bath.1.lambda = 1.0
bath.1.gamma = 1.0
hierarchy.depth = 4
grid.dt = 0.01
grid.t_end = 6.0
grid.snapshots = 150
mystery.key = 7
)";
  try {
    parse_config_text(broken, "demo.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("demo.cfg: 6 problems found") != std::string::npos);
    CHECK(count_problems(what) == "6");
    CHECK(what.find("demo.cfg:3: duplicate key 'experiment'") !=
          std::string::npos);
    CHECK(what.find("demo.cfg:4: expected 'key = value'") !=
          std::string::npos);
    CHECK(what.find("key 'system.h.dd': 'abc' is not a number") !=
          std::string::npos);
    CHECK(what.find("missing required key 'system.h.aa'") !=
          std::string::npos);
    CHECK(what.find("missing required key 'system.h.da.re'") !=
          std::string::npos);
    CHECK(what.find("unknown key 'mystery.key'") != std::string::npos);
  }
}

TEST_CASE("bath entries must be numbered without gaps") {
  std::string text = kKernelsCfg;
  text += R"(
bath.3.kind = drude
bath.3.coupling = bridge
bath.3.lambda = 0.5
bath.3.gamma = 2.0
)";
  CHECK_THROWS_WITH_AS(parse_config_text(text, "demo.cfg"),
                       doctest::Contains("found bath.3"), ConfigError);
}

TEST_CASE("bad bath parameters are tagged with their entry") {
  std::string text = kKernelsCfg;
  const std::size_t pos = text.find("bath.1.lambda = 1.0");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 19, "bath.1.lambda = -1.");
  CHECK_THROWS_WITH_AS(parse_config_text(text, "demo.cfg"),
                       doctest::Contains("(bath.1)"), ConfigError);
}

TEST_CASE("floquet runs demand enough phase samples and a drive") {
  const std::string driven = R"(
experiment = floquet_kernels
system.mode = et_params
system.e0 = 1.5
system.lambda = 0.2
system.vbar = 1.0
system.eps = 2.0
system.omega = 4.0
bath.beta = 1.0
bath.1.kind = brownian
bath.1.coupling = bridge
bath.1.lambda = 0.2
bath.1.omega0 = 1.0
bath.1.zeta = 1.0
hierarchy.depth = 2
grid.dt = 0.01
grid.t_end = 2.0
grid.snapshots = 50
)";
  ExperimentConfig ok = parse_config_text(driven, "demo.cfg");
  CHECK(ok.floquet_n_max == 3);
  CHECK(ok.floquet_n_phase == 32);
  CHECK(ok.floquet_periods == 14.0);
  CHECK(ok.p0 == 1.0);

  CHECK_THROWS_WITH_AS(
      parse_config_text(driven + "floquet.n_phase = 6\n", "demo.cfg"),
      doctest::Contains("must exceed 2*floquet.n_max"), ConfigError);

  std::string undriven = driven;
  const std::size_t pos = undriven.find("system.eps = 2.0");
  REQUIRE(pos != std::string::npos);
  undriven.replace(pos, 16, "system.eps = 0.0");
  CHECK_THROWS_WITH_AS(parse_config_text(undriven, "demo.cfg"),
                       doctest::Contains("requires a driven system"),
                       ConfigError);
}

TEST_CASE("initial population must be a probability") {
  std::string text = kKernelsCfg;
  const std::size_t pos = text.find("experiment = kernels");
  text.replace(pos, 20, "experiment = population");
  text += "population.p0 = 1.5\n";
  CHECK_THROWS_WITH_AS(parse_config_text(text, "demo.cfg"),
                       doctest::Contains("must lie in [0, 1]"), ConfigError);
}

TEST_CASE("dmd_fit needs only a series and a horizon") {
  ExperimentConfig cfg = parse_config_text(R"(
experiment = dmd_fit
input.series = kernel_reference.csv
grid.t_end = 40.0
dmd.rank_policy = fixed
dmd.rank = 12
dmd.delay = 10
dmd.amplitudes = project
)",
                                           "demo.cfg");
  CHECK(cfg.input_series == "kernel_reference.csv");
  CHECK(cfg.grid_t_end == 40.0);
  CHECK(cfg.baths.empty());
  CHECK(cfg.policy.mode == RankPolicy::Mode::kFixed);
  CHECK(cfg.policy.rank == 12);
  CHECK(cfg.delay == 10);
  CHECK(cfg.amplitudes == AmplitudeMethod::kProject);

  CHECK_THROWS_WITH_AS(
      parse_config_text("experiment = dmd_fit\ngrid.t_end = 4.0\n", "x.cfg"),
      doctest::Contains("missing required key 'input.series'"), ConfigError);
}

TEST_CASE("compare runs need both file names and nothing else") {
  ExperimentConfig cfg = parse_config_text(
      "experiment = compare\ncompare.a = a.csv\ncompare.b = b.csv\n", "x.cfg");
  CHECK(cfg.compare_a == "a.csv");
  CHECK(cfg.compare_b == "b.csv");

  CHECK_THROWS_WITH_AS(parse_config_text("experiment = compare\n", "x.cfg"),
                       doctest::Contains("missing required key 'compare.a'"),
                       ConfigError);
}

TEST_CASE("guard rails on numeric ranges") {
  std::string text = kKernelsCfg;
  auto swap = [&text](const std::string& from, const std::string& to) {
    const std::size_t pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
  };
  swap("hierarchy.depth = 6", "hierarchy.depth = 0");
  swap("grid.dt = 0.01", "grid.dt = -0.5");
  swap("grid.snapshots = 150", "grid.snapshots = 1");
  text += "dmd.delay = 0\n";
  try {
    parse_config_text(text, "demo.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("'hierarchy.depth': must be >= 1") != std::string::npos);
    CHECK(what.find("'grid.dt': must be > 0") != std::string::npos);
    CHECK(what.find("'grid.snapshots': need at least 2") != std::string::npos);
    CHECK(what.find("'dmd.delay': must be >= 1") != std::string::npos);
  }
}

TEST_CASE("experiment names round trip through to_string") {
  CHECK(to_string(ExperimentKind::kKernels) == "kernels");
  CHECK(to_string(ExperimentKind::kFloquetKernels) == "floquet_kernels");
  CHECK(to_string(ExperimentKind::kPopulation) == "population");
  CHECK(to_string(ExperimentKind::kGme) == "gme");
  CHECK(to_string(ExperimentKind::kDmdFit) == "dmd_fit");
  CHECK(to_string(ExperimentKind::kCompare) == "compare");
  for (const char* name :
       {"kernels", "floquet_kernels", "population", "gme", "dmd_fit",
        "compare"}) {
    std::string text = kKernelsCfg;
    const std::size_t pos = text.find("experiment = kernels");
    text.replace(pos, 20, std::string("experiment = ") + name);
    if (std::string(name) == "floquet_kernels" ||
        std::string(name) == "dmd_fit" || std::string(name) == "compare")
      continue;  // exercised in their own cases above
    ExperimentConfig cfg = parse_config_text(text, "demo.cfg");
    CHECK(to_string(cfg.experiment) == name);
  }
}

TEST_CASE("configs load from disk and bad paths are reported") {
  const std::string path = "config_file_test.cfg";
  {
    std::ofstream out(path);
    out << kKernelsCfg;
  }
  ExperimentConfig cfg = parse_config_file(path);
  CHECK(cfg.experiment == ExperimentKind::kKernels);
  CHECK(cfg.snapshots == 150);
  std::remove(path.c_str());

  CHECK_THROWS_WITH_AS(parse_config_file("missing_config.cfg"),
                       doctest::Contains("cannot read config file"),
                       ConfigError);
}
