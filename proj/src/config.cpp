#include "rkdmd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace rkdmd {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Typed access over the raw key/value map with error accumulation and
// consumed-key tracking, so unknown keys can be reported as well.
class Reader {
 public:
  Reader(const std::map<std::string, std::string>& raw,
         std::vector<std::string>& errors)
      : raw_(raw), errors_(errors) {}

  bool has(const std::string& key) const { return raw_.count(key) > 0; }

  void fail(const std::string& msg) { errors_.push_back(msg); }

  std::string str(const std::string& key, const std::string& fallback,
                  bool required = false) {
    auto it = raw_.find(key);
    if (it == raw_.end()) {
      if (required) errors_.push_back("missing required key '" + key + "'");
      return fallback;
    }
    used_.insert(key);
    return it->second;
  }

  double number(const std::string& key, double fallback,
                bool required = false) {
    auto it = raw_.find(key);
    if (it == raw_.end()) {
      if (required) errors_.push_back("missing required key '" + key + "'");
      return fallback;
    }
    used_.insert(key);
    const std::string v = it->second;
    char* end = nullptr;
    const double parsed = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
      errors_.push_back("key '" + key + "': '" + v + "' is not a number");
      return fallback;
    }
    return parsed;
  }

  int integer(const std::string& key, int fallback, bool required = false) {
    const double v = number(key, static_cast<double>(fallback), required);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      errors_.push_back("key '" + key + "': expected an integer");
    return i;
  }

  int choice(const std::string& key,
             const std::vector<std::pair<std::string, int>>& options,
             int fallback, bool required = false) {
    auto it = raw_.find(key);
    if (it == raw_.end()) {
      if (required) errors_.push_back("missing required key '" + key + "'");
      return fallback;
    }
    used_.insert(key);
    for (const auto& [name, value] : options)
      if (it->second == name) return value;
    std::string expect;
    for (const auto& [name, value] : options) {
      if (!expect.empty()) expect += " | ";
      expect += name;
    }
    errors_.push_back("key '" + key + "': '" + it->second +
                      "' is not one of " + expect);
    return fallback;
  }

  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : raw_)
      if (!used_.count(key)) out.push_back(key);
    return out;
  }

 private:
  const std::map<std::string, std::string>& raw_;
  std::set<std::string> used_;
  std::vector<std::string>& errors_;
};

std::map<std::string, std::string> tokenize(const std::string& text,
                                            const std::string& origin,
                                            std::vector<std::string>& errors) {
  std::map<std::string, std::string> raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << origin << ":" << lineno << ": expected 'key = value'";
      errors.push_back(msg.str());
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      std::ostringstream msg;
      msg << origin << ":" << lineno << ": empty key or value";
      errors.push_back(msg.str());
      continue;
    }
    if (raw.count(key)) {
      std::ostringstream msg;
      msg << origin << ":" << lineno << ": duplicate key '" << key << "'";
      errors.push_back(msg.str());
      continue;
    }
    raw[key] = value;
  }
  return raw;
}

void parse_baths(Reader& r, const std::map<std::string, std::string>& raw,
                 ExperimentConfig& cfg, std::vector<std::string>& errors) {
  std::set<int> indices;
  for (const auto& [key, value] : raw) {
    if (key.rfind("bath.", 0) != 0) continue;
    const std::string rest = key.substr(5);
    const std::size_t dot = rest.find('.');
    if (dot == std::string::npos) continue;  // bath.beta etc.
    const std::string idx = rest.substr(0, dot);
    if (!idx.empty() &&
        std::all_of(idx.begin(), idx.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      indices.insert(std::atoi(idx.c_str()));
  }
  int expect = 1;
  for (int idx : indices) {
    if (idx != expect) {
      std::ostringstream msg;
      msg << "bath entries must be numbered 1..N without gaps; found bath."
          << idx;
      errors.push_back(msg.str());
      return;
    }
    ++expect;
  }

  for (int idx : indices) {
    const std::string p = "bath." + std::to_string(idx) + ".";
    const int kind =
        r.choice(p + "kind", {{"drude", 0}, {"brownian", 1}}, 0, true);
    const int coupling = r.choice(
        p + "coupling", {{"donor_gap", 0}, {"bridge", 1}}, 0, true);
    BathEntryConfig bath;
    bath.coupling =
        coupling == 0 ? CouplingLabel::kDonorGap : CouplingLabel::kBridge;
    const double lambda = r.number(p + "lambda", 0.0, true);
    try {
      if (kind == 0) {
        const double gamma = r.number(p + "gamma", 0.0, true);
        bath.j = SpectralDensity::drude(lambda, gamma);
      } else {
        const double omega0 = r.number(p + "omega0", 0.0, true);
        const double zeta = r.number(p + "zeta", 0.0, true);
        bath.j = SpectralDensity::brownian(lambda, omega0, zeta);
      }
      cfg.baths.push_back(bath);
    } catch (const ConfigError& e) {
      errors.push_back(std::string(e.what()) + " (bath." +
                       std::to_string(idx) + ")");
    }
  }
}

}  // namespace

EtHamiltonian SystemConfig::build() const {
  if (mode == Mode::kExplicit) {
    Eigen::Matrix2cd h;
    h << Complex(h_dd, 0.0), h_da, std::conj(h_da), Complex(h_aa, 0.0);
    return EtHamiltonian::fixed(h);
  }
  return EtHamiltonian::et_params(e0, lambda, vbar, eps, omega);
}

std::vector<BathExpansion> ExperimentConfig::build_expansions() const {
  std::vector<BathExpansion> out;
  out.reserve(baths.size());
  for (const BathEntryConfig& bath : baths)
    out.push_back(
        correlation_expansion(bath.j, beta, n_matsubara, bath.coupling));
  return out;
}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  std::vector<std::string> errors;
  const std::map<std::string, std::string> raw =
      tokenize(text, origin, errors);

  ExperimentConfig cfg;
  cfg.raw = raw;
  Reader r(raw, errors);

  const int experiment = r.choice("experiment",
                                  {{"kernels", 0},
                                   {"floquet_kernels", 1},
                                   {"population", 2},
                                   {"gme", 3},
                                   {"dmd_fit", 4},
                                   {"compare", 5}},
                                  0, true);
  cfg.experiment = static_cast<ExperimentKind>(experiment);
  cfg.output_dir = r.str("output.dir", "out");

  const bool wants_hierarchy = cfg.experiment == ExperimentKind::kKernels ||
                               cfg.experiment == ExperimentKind::kFloquetKernels ||
                               cfg.experiment == ExperimentKind::kPopulation ||
                               cfg.experiment == ExperimentKind::kGme;
  const bool wants_dmd = wants_hierarchy ||
                         cfg.experiment == ExperimentKind::kDmdFit;
  const bool wants_grid = wants_dmd;

  if (wants_hierarchy) {
    const int mode = r.choice("system.mode",
                              {{"explicit", 0}, {"et_params", 1}}, 1, true);
    cfg.system.mode = mode == 0 ? SystemConfig::Mode::kExplicit
                                : SystemConfig::Mode::kEtParams;
    if (cfg.system.mode == SystemConfig::Mode::kExplicit) {
      cfg.system.h_dd = r.number("system.h.dd", 0.0, true);
      cfg.system.h_aa = r.number("system.h.aa", 0.0, true);
      cfg.system.h_da = Complex(r.number("system.h.da.re", 0.0, true),
                                r.number("system.h.da.im", 0.0));
    } else {
      cfg.system.e0 = r.number("system.e0", 0.0, true);
      cfg.system.lambda = r.number("system.lambda", 0.0, true);
      if (r.has("system.vbar")) {
        cfg.system.vbar = r.number("system.vbar", 1.0);
      } else {
        cfg.notes.push_back("system.vbar not set; using default 1.0");
      }
      cfg.system.eps = r.number("system.eps", 0.0);
      cfg.system.omega = r.number("system.omega", 0.0);
    }

    if (r.has("bath.beta")) {
      cfg.beta = r.number("bath.beta", 1.0);
    } else {
      cfg.notes.push_back("bath.beta not set; using default 1.0");
    }
    cfg.n_matsubara = r.integer("bath.n_matsubara", 6);
    if (cfg.n_matsubara < 0)
      r.fail("key 'bath.n_matsubara': must be >= 0");
    parse_baths(r, raw, cfg, errors);
    if (cfg.baths.empty() && errors.empty())
      errors.push_back("at least one bath (bath.1.*) is required");

    cfg.depth = r.integer("hierarchy.depth", 0, true);
    if (cfg.depth < 1 && r.has("hierarchy.depth"))
      r.fail("key 'hierarchy.depth': must be >= 1");
    cfg.memory_cap_mb = r.number("hierarchy.memory_cap_mb", 2048.0);
    if (!(cfg.memory_cap_mb > 0.0))
      r.fail("key 'hierarchy.memory_cap_mb': must be > 0");
    cfg.substeps = r.integer("hierarchy.substeps", 0);
    if (cfg.substeps < 0) r.fail("key 'hierarchy.substeps': must be >= 0");
  }

  if (wants_grid) {
    // dmd_fit inherits dt from the input series; it only needs a horizon.
    const bool needs_dt = wants_hierarchy;
    cfg.grid_dt = r.number("grid.dt", 0.0, needs_dt);
    if (r.has("grid.dt") && !(cfg.grid_dt > 0.0))
      r.fail("key 'grid.dt': must be > 0");
    cfg.grid_t_end = r.number("grid.t_end", 0.0, true);
    if (r.has("grid.t_end") && !(cfg.grid_t_end > 0.0))
      r.fail("key 'grid.t_end': must be > 0");
  }

  if (wants_dmd) {
    const bool dmd_fit = cfg.experiment == ExperimentKind::kDmdFit;
    cfg.snapshots = r.integer("grid.snapshots", 0, !dmd_fit);
    if (r.has("grid.snapshots") && cfg.snapshots < 2)
      r.fail("key 'grid.snapshots': need at least 2");

    const int mode = r.choice("dmd.rank_policy",
                              {{"threshold", 0}, {"fixed", 1}}, 0);
    if (mode == 0) {
      cfg.policy = RankPolicy::threshold(r.number("dmd.epsilon", 1e-10));
    } else {
      cfg.policy = RankPolicy::fixed(r.integer("dmd.rank", 0, true));
    }
    try {
      cfg.policy.validate();
    } catch (const ConfigError& e) {
      r.fail(e.what());
    }
    cfg.delay = r.integer("dmd.delay", 25);
    if (cfg.delay < 1) r.fail("key 'dmd.delay': must be >= 1");
    cfg.amplitudes =
        r.choice("dmd.amplitudes", {{"project", 0}, {"trajectory_lsq", 1}},
                 1) == 0
            ? AmplitudeMethod::kProject
            : AmplitudeMethod::kTrajectoryLsq;
  }

  if (cfg.experiment == ExperimentKind::kFloquetKernels) {
    cfg.floquet_n_max = r.integer("floquet.n_max", 3);
    if (cfg.floquet_n_max < 0) r.fail("key 'floquet.n_max': must be >= 0");
    cfg.floquet_n_phase = r.integer("floquet.n_phase", 32);
    if (cfg.floquet_n_phase < 1)
      r.fail("key 'floquet.n_phase': must be >= 1");
    if (cfg.floquet_n_phase <= 2 * cfg.floquet_n_max)
      r.fail("floquet.n_phase must exceed 2*floquet.n_max to resolve the "
             "requested harmonics");
    cfg.floquet_periods = r.number("floquet.periods", 14.0);
    if (!(cfg.floquet_periods > 0.0))
      r.fail("key 'floquet.periods': must be > 0");
    if (cfg.system.mode != SystemConfig::Mode::kEtParams ||
        cfg.system.eps == 0.0 || !(cfg.system.omega > 0.0))
      errors.push_back(
          "floquet_kernels requires a driven system "
          "(system.mode = et_params with system.eps != 0 and system.omega > 0)");
  }

  if (cfg.experiment == ExperimentKind::kPopulation ||
      cfg.experiment == ExperimentKind::kFloquetKernels ||
      cfg.experiment == ExperimentKind::kGme) {
    cfg.p0 = r.number("population.p0", 1.0);
    if (cfg.p0 < 0.0 || cfg.p0 > 1.0)
      r.fail("key 'population.p0': must lie in [0, 1]");
  }

  if (cfg.experiment == ExperimentKind::kDmdFit)
    cfg.input_series = r.str("input.series", "", true);

  if (cfg.experiment == ExperimentKind::kCompare) {
    cfg.compare_a = r.str("compare.a", "", true);
    cfg.compare_b = r.str("compare.b", "", true);
  }

  for (const std::string& key : r.unused())
    errors.push_back("unknown key '" + key + "'");

  if (!errors.empty()) {
    std::ostringstream msg;
    msg << origin << ": " << errors.size()
        << (errors.size() == 1 ? " problem" : " problems") << " found";
    for (const std::string& e : errors) msg << "\n  - " << e;
    throw ConfigError(msg.str());
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kKernels: return "kernels";
    case ExperimentKind::kFloquetKernels: return "floquet_kernels";
    case ExperimentKind::kPopulation: return "population";
    case ExperimentKind::kGme: return "gme";
    case ExperimentKind::kDmdFit: return "dmd_fit";
    case ExperimentKind::kCompare: return "compare";
  }
  return "unknown";
}

}  // namespace rkdmd
