#include "rkdmd/kernels.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rkdmd {

namespace {

void q_project(ProjectorKind kind, Complex* y) {
  if (kind == ProjectorKind::kPopulation) {
    y[0] = Complex(0.0, 0.0);
    y[3] = Complex(0.0, 0.0);
  } else {
    y[0] = Complex(0.0, 0.0);
    y[1] = Complex(0.0, 0.0);
    y[2] = Complex(0.0, 0.0);
    y[3] = Complex(0.0, 0.0);
  }
}

void p_project(ProjectorKind kind, Complex* y, std::size_t n) {
  if (kind == ProjectorKind::kPopulation) {
    y[1] = Complex(0.0, 0.0);
    y[2] = Complex(0.0, 0.0);
  }
  for (std::size_t i = 4; i < n; ++i) y[i] = Complex(0.0, 0.0);
}

// Tier-0 entry names in block order rho_DD, rho_AD, rho_DA, rho_AA.
constexpr std::array<const char*, 4> kRowName = {"DD", "AD", "DA", "AA"};
constexpr std::array<const char*, 4> kColName = {"D,D", "A,D", "D,A", "A,A"};

// P L exp(Q L Q tau) Q L e_seed along the lag grid; rows receives the four
// tier-0 entries of the final P L application per sample.
void extract_seed(const HierarchySpace& space, const EtHamiltonian& h,
                  ProjectorKind kind, const TimeGrid& lag, double t_origin,
                  int sub, int seed_pos,
                  std::array<std::vector<Complex>, 4>& rows,
                  ExtractionInfo* info) {
  const std::size_t nstate = space.state_size();
  std::vector<Complex> w(nstate, Complex(0.0, 0.0));
  std::vector<Complex> v(nstate), k1(nstate), k2(nstate), k3(nstate),
      k4(nstate), tmp(nstate);

  w[static_cast<std::size_t>(seed_pos)] = Complex(1.0, 0.0);
  space.rhs(h, t_origin, w.data(), v.data());
  q_project(kind, v.data());
  w = v;

  const double hstep = lag.dt / sub;
  for (int i = 0; i < lag.n; ++i) {
    const double tau = lag.time(i);
    space.rhs(h, t_origin + tau, w.data(), v.data());
    for (int r = 0; r < 4; ++r)
      rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] = v[r];
    if (info) {
      const double colsum = std::abs(v[0] + v[3]);
      if (colsum > info->max_trace_colsum) info->max_trace_colsum = colsum;
    }
    if (i + 1 == lag.n) break;

    for (int s = 0; s < sub; ++s) {
      const double ts = t_origin + tau + s * hstep;
      if (s == 0) {
        k1 = v;
        q_project(kind, k1.data());
      } else {
        space.rhs(h, ts, w.data(), k1.data());
        q_project(kind, k1.data());
      }
      for (std::size_t m = 0; m < nstate; ++m)
        tmp[m] = w[m] + (0.5 * hstep) * k1[m];
      space.rhs(h, ts + 0.5 * hstep, tmp.data(), k2.data());
      q_project(kind, k2.data());
      for (std::size_t m = 0; m < nstate; ++m)
        tmp[m] = w[m] + (0.5 * hstep) * k2[m];
      space.rhs(h, ts + 0.5 * hstep, tmp.data(), k3.data());
      q_project(kind, k3.data());
      for (std::size_t m = 0; m < nstate; ++m)
        tmp[m] = w[m] + hstep * k3[m];
      space.rhs(h, ts + hstep, tmp.data(), k4.data());
      q_project(kind, k4.data());
      const double c = hstep / 6.0;
      for (std::size_t m = 0; m < nstate; ++m)
        w[m] += c * (k1[m] + 2.0 * (k2[m] + k3[m]) + k4[m]);
    }

    double norm2 = 0.0;
    for (const Complex& x : w) norm2 += std::norm(x);
    if (!std::isfinite(norm2)) {
      std::ostringstream msg;
      msg << "kernel extraction: integration blew up at lag = "
          << lag.time(i + 1) << " (substeps = " << sub << ")";
      throw NumericalError(msg.str());
    }
  }
}

}  // namespace

AdoState apply_projector(ProjectorKind kind, const AdoState& state) {
  AdoState out = state;
  p_project(kind, out.values.data(),
            static_cast<std::size_t>(out.values.size()));
  return out;
}

AdoState apply_complement(ProjectorKind kind, const AdoState& state) {
  AdoState out = state;
  q_project(kind, out.values.data());
  return out;
}

std::vector<std::string> KernelSeries::labels() const {
  std::vector<std::string> out;
  out.reserve(comp.size());
  for (const auto& [label, values] : comp) out.push_back(label);
  return out;
}

void KernelSeries::validate() const {
  grid.validate();
  if (comp.empty()) throw NumericalError("kernel series: no components");
  for (const auto& [label, values] : comp)
    if (values.size() != static_cast<std::size_t>(grid.n))
      throw NumericalError("kernel series: component '" + label +
                           "' length does not match grid");
}

KernelSeries extract_kernel(const HierarchySpace& space,
                            const EtHamiltonian& h, ProjectorKind kind,
                            const TimeGrid& lag_grid, double t_origin,
                            int substeps, ExtractionInfo* info) {
  lag_grid.validate();
  if (lag_grid.t0 != 0.0)
    throw ConfigError("kernel extraction: lag grid must start at 0");
  const int sub =
      substeps > 0 ? substeps : space.suggested_substeps(lag_grid.dt, h);
  if (info) info->substeps = sub;

  KernelSeries series;
  series.grid = lag_grid;
  const std::size_t n = static_cast<std::size_t>(lag_grid.n);

  if (kind == ProjectorKind::kPopulation) {
    std::array<std::vector<Complex>, 4> rows;
    for (auto& rvec : rows) rvec.assign(n, Complex(0.0, 0.0));

    extract_seed(space, h, kind, lag_grid, t_origin, sub, 0, rows, info);
    std::vector<Complex> k_dd(n);
    for (std::size_t i = 0; i < n; ++i) k_dd[i] = -rows[0][i];

    extract_seed(space, h, kind, lag_grid, t_origin, sub, 3, rows, info);
    std::vector<Complex> k_ad(n);
    for (std::size_t i = 0; i < n; ++i) k_ad[i] = rows[0][i];

    if (info) {
      for (std::size_t i = 0; i < n; ++i)
        info->max_imag = std::max({info->max_imag, std::abs(k_dd[i].imag()),
                                   std::abs(k_ad[i].imag())});
    }
    series.comp["k_DD"] = std::move(k_dd);
    series.comp["k_AD"] = std::move(k_ad);
    return series;
  }

  for (int seed = 0; seed < 4; ++seed) {
    std::array<std::vector<Complex>, 4> rows;
    for (auto& rvec : rows) rvec.assign(n, Complex(0.0, 0.0));
    extract_seed(space, h, kind, lag_grid, t_origin, sub, seed, rows, info);
    for (int r = 0; r < 4; ++r) {
      std::string label = std::string("K_") +
                          kRowName[static_cast<std::size_t>(r)] + "[" +
                          kColName[static_cast<std::size_t>(seed)] + "]";
      series.comp[label] = std::move(rows[static_cast<std::size_t>(r)]);
    }
  }
  return series;
}

PhaseKernelSamples extract_two_time_kernel(const HierarchySpace& space,
                                           const EtHamiltonian& h,
                                           const TimeGrid& lag_grid,
                                           int n_phase, int substeps,
                                           ExtractionInfo* info) {
  if (!h.driven())
    throw ConfigError("two-time kernel: system has no periodic drive");
  if (n_phase < 1) throw ConfigError("two-time kernel: n_phase must be >= 1");

  PhaseKernelSamples out;
  out.period = h.period();
  out.n_phase = n_phase;
  out.lag_grid = lag_grid;
  out.k.reserve(static_cast<std::size_t>(n_phase));
  for (int j = 0; j < n_phase; ++j) {
    const double t_origin = out.period * j / n_phase;
    out.k.push_back(extract_kernel(space, h, ProjectorKind::kPopulation,
                                   lag_grid, t_origin, substeps, info));
  }
  return out;
}

FloquetKernelSet fourier_components(const PhaseKernelSamples& samples,
                                    double omega, int n_max) {
  if (n_max < 0) throw ConfigError("floquet: n_max must be >= 0");
  FloquetKernelSet set;
  set.omega = omega;
  set.n_max = n_max;
  set.lag_grid = samples.lag_grid;
  set.comp.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n)
    set.comp.push_back(fourier_component(samples, omega, n));
  return set;
}

std::map<std::string, std::vector<Complex>> fourier_component(
    const PhaseKernelSamples& samples, double omega, int n) {
  if (samples.k.empty())
    throw NumericalError("floquet: no phase samples to transform");
  const int j_count = samples.n_phase;
  const std::size_t n_lag = static_cast<std::size_t>(samples.lag_grid.n);
  const Complex mi(0.0, -1.0);

  std::map<std::string, std::vector<Complex>> out;
  for (const auto& [label, ignored] : samples.k.front().comp)
    out[label].assign(n_lag, Complex(0.0, 0.0));

  for (int j = 0; j < j_count; ++j) {
    const double t0 = samples.period * j / j_count;
    const KernelSeries& series = samples.k[static_cast<std::size_t>(j)];
    for (const auto& [label, values] : series.comp) {
      std::vector<Complex>& acc = out[label];
      for (std::size_t i = 0; i < n_lag; ++i) {
        const double t_eval = t0 + samples.lag_grid.time(static_cast<int>(i));
        acc[i] += values[i] * std::exp(mi * (n * omega * t_eval));
      }
    }
  }
  for (auto& [label, values] : out)
    for (Complex& v : values) v /= static_cast<double>(j_count);
  return out;
}

std::map<std::string, Complex> floquet_reconstruct(const FloquetKernelSet& set,
                                                   int lag_index, double t) {
  std::map<std::string, Complex> out;
  const Complex i_unit(0.0, 1.0);
  for (const auto& [label, values] : set.comp[0])
    out[label] = values[static_cast<std::size_t>(lag_index)];
  for (int n = 1; n <= set.n_max; ++n) {
    const Complex phase = std::exp(i_unit * (n * set.omega * t));
    for (const auto& [label, values] : set.comp[static_cast<std::size_t>(n)]) {
      const Complex v = values[static_cast<std::size_t>(lag_index)];
      out[label] += v * phase + std::conj(v * phase);
    }
  }
  return out;
}

KernelSeries flatten_floquet(const FloquetKernelSet& set) {
  KernelSeries out;
  out.grid = set.lag_grid;
  for (int n = 0; n <= set.n_max; ++n) {
    for (const auto& [label, values] : set.comp[static_cast<std::size_t>(n)]) {
      std::ostringstream key;
      key << label << "[n=" << n << "]";
      out.comp[key.str()] = values;
    }
  }
  return out;
}

SpectrumSeries kernel_fft(const KernelSeries& series) {
  series.validate();
  const int n = series.grid.n;
  const double dt = series.grid.dt;
  const int lo = -(n / 2);
  const int hi = lo + n - 1;
  const Complex mi(0.0, -1.0);

  SpectrumSeries spec;
  spec.omega.reserve(static_cast<std::size_t>(n));
  for (int j = lo; j <= hi; ++j)
    spec.omega.push_back(2.0 * std::numbers::pi * j / (n * dt));

  for (const auto& [label, values] : series.comp) {
    std::vector<Complex> trans;
    trans.reserve(static_cast<std::size_t>(n));
    for (int j = lo; j <= hi; ++j) {
      const double w = 2.0 * std::numbers::pi * j / (n * dt);
      Complex acc(0.0, 0.0);
      for (int m = 0; m < n; ++m)
        acc += values[static_cast<std::size_t>(m)] * std::exp(mi * (w * m * dt));
      trans.push_back(acc * dt);
    }
    spec.comp[label] = std::move(trans);
  }
  return spec;
}

}  // namespace rkdmd
