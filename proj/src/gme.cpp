#include "rkdmd/gme.hpp"

#include <cmath>
#include <sstream>

namespace rkdmd {

namespace {

void check_lag_compat(const TimeGrid& series_grid, const TimeGrid& grid,
                      bool zero_pad, const char* what) {
  if (series_grid.t0 != 0.0)
    throw ConfigError(std::string(what) + ": kernel lag grid must start at 0");
  if (!series_grid.same_spacing(grid)) {
    std::ostringstream msg;
    msg << what << ": kernel spacing dt = " << series_grid.dt
        << " does not match solver grid dt = " << grid.dt
        << "; re-extract the kernel on the solver grid";
    throw ConfigError(msg.str());
  }
  if (!zero_pad && series_grid.n < grid.n) {
    std::ostringstream msg;
    msg << what << ": kernel covers " << series_grid.n
        << " lags but the solve needs " << grid.n
        << "; extend the kernel or request zero padding";
    throw ConfigError(msg.str());
  }
}

const std::vector<Complex>& component(const KernelSeries& series,
                                      const std::string& label,
                                      const char* what) {
  auto it = series.comp.find(label);
  if (it == series.comp.end())
    throw ConfigError(std::string(what) + ": kernel series lacks component '" +
                      label + "'");
  return it->second;
}

std::vector<double> real_padded(const std::vector<Complex>& values, int n) {
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  const std::size_t keep = std::min(values.size(), out.size());
  for (std::size_t i = 0; i < keep; ++i) out[i] = values[i].real();
  return out;
}

std::vector<Complex> complex_padded(const std::vector<Complex>& values,
                                    int n) {
  std::vector<Complex> out(static_cast<std::size_t>(n), Complex(0.0, 0.0));
  const std::size_t keep = std::min(values.size(), out.size());
  for (std::size_t i = 0; i < keep; ++i) out[i] = values[i];
  return out;
}

std::string harmonic_label(const std::string& base, int n) {
  std::ostringstream s;
  s << base << "[n=" << n << "]";
  return s.str();
}

// -i [h, .] acting on vec(rho) = (rho_DD, rho_AD, rho_DA, rho_AA).
Eigen::Matrix4cd liouvillian(const Eigen::Matrix2cd& h) {
  const Complex mi(0.0, -1.0);
  Eigen::Matrix4cd l = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int m = 0; m < 2; ++m) {
          Complex v(0.0, 0.0);
          if (j == m) v += h(i, k);
          if (i == k) v -= h(m, j);
          l(i + 2 * j, k + 2 * m) += mi * v;
        }
  return l;
}

}  // namespace

PopulationKernelTable population_table(const KernelSeries& series,
                                       const TimeGrid& grid, bool zero_pad) {
  series.validate();
  grid.validate();
  check_lag_compat(series.grid, grid, zero_pad, "population solve");
  PopulationKernelTable table;
  table.k_dd = real_padded(component(series, "k_DD", "population solve"),
                           grid.n);
  table.k_ad = real_padded(component(series, "k_AD", "population solve"),
                           grid.n);
  return table;
}

PopulationKernelTable population_table(const DmdModel& model,
                                       const TimeGrid& grid) {
  TimeGrid lag;
  lag.t0 = 0.0;
  lag.dt = grid.dt;
  lag.n = grid.n;
  const KernelSeries series = series_from_model(model, lag);
  return population_table(series, grid, false);
}

FloquetKernelTable floquet_table(const FloquetKernelSet& set,
                                 const TimeGrid& grid, bool zero_pad) {
  grid.validate();
  check_lag_compat(set.lag_grid, grid, zero_pad, "floquet solve");
  FloquetKernelTable table;
  table.omega = set.omega;
  table.n_max = set.n_max;
  for (int n = 0; n <= set.n_max; ++n) {
    const auto& comp = set.comp[static_cast<std::size_t>(n)];
    auto dd = comp.find("k_DD");
    auto ad = comp.find("k_AD");
    if (dd == comp.end() || ad == comp.end())
      throw ConfigError("floquet solve: harmonic set lacks k_DD/k_AD");
    table.k_dd.push_back(complex_padded(dd->second, grid.n));
    table.k_ad.push_back(complex_padded(ad->second, grid.n));
  }
  return table;
}

FloquetKernelTable floquet_table(const DmdModel& model, double omega,
                                 int n_max, const TimeGrid& grid) {
  TimeGrid lag;
  lag.t0 = 0.0;
  lag.dt = grid.dt;
  lag.n = grid.n;
  const KernelSeries series = series_from_model(model, lag);
  FloquetKernelTable table;
  table.omega = omega;
  table.n_max = n_max;
  for (int n = 0; n <= n_max; ++n) {
    table.k_dd.push_back(complex_padded(
        component(series, harmonic_label("k_DD", n), "floquet solve"),
        grid.n));
    table.k_ad.push_back(complex_padded(
        component(series, harmonic_label("k_AD", n), "floquet solve"),
        grid.n));
  }
  return table;
}

PopulationTrajectory solve_population(const PopulationKernelTable& kern,
                                      double p_d0, const TimeGrid& grid) {
  grid.validate();
  if (kern.k_dd.size() < static_cast<std::size_t>(grid.n) ||
      kern.k_ad.size() < static_cast<std::size_t>(grid.n))
    throw NumericalError("population solve: kernel table shorter than grid");

  const double dt = grid.dt;
  std::vector<double> p(static_cast<std::size_t>(grid.n), 0.0);
  p[0] = p_d0;

  auto rate = [&](int i) {
    if (i == 0) return 0.0;
    double acc = 0.0;
    for (int j = 0; j <= i; ++j) {
      const double pv = p[static_cast<std::size_t>(i - j)];
      double f = -kern.k_dd[static_cast<std::size_t>(j)] * pv +
                 kern.k_ad[static_cast<std::size_t>(j)] * (1.0 - pv);
      if (j == 0 || j == i) f *= 0.5;
      acc += f;
    }
    return acc * dt;
  };

  for (int i = 0; i + 1 < grid.n; ++i) {
    const double r0 = rate(i);
    p[static_cast<std::size_t>(i + 1)] = p[static_cast<std::size_t>(i)] + dt * r0;
    const double r1 = rate(i + 1);
    p[static_cast<std::size_t>(i + 1)] =
        p[static_cast<std::size_t>(i)] + 0.5 * dt * (r0 + r1);
  }

  PopulationTrajectory out;
  out.grid = grid;
  out.p_d = std::move(p);
  for (double v : out.p_d)
    out.max_bound_dev = std::max({out.max_bound_dev, -v, v - 1.0});
  return out;
}

PopulationTrajectory solve_population_floquet(const FloquetKernelTable& kern,
                                              double p_d0,
                                              const TimeGrid& grid) {
  grid.validate();
  if (kern.k_dd.empty() ||
      kern.k_dd[0].size() < static_cast<std::size_t>(grid.n))
    throw NumericalError("floquet solve: kernel table shorter than grid");

  const double dt = grid.dt;
  const std::size_t n = static_cast<std::size_t>(grid.n);
  std::vector<double> p(n, 0.0);
  p[0] = p_d0;

  // k(tau_j; t_i) assembled per evaluation time from the harmonics.
  std::vector<double> row_dd(n), row_ad(n);
  auto fill_row = [&](int i, std::vector<double>& dd, std::vector<double>& ad) {
    const double t = grid.time(i);
    for (std::size_t j = 0; j < n; ++j) {
      dd[j] = kern.k_dd[0][j].real();
      ad[j] = kern.k_ad[0][j].real();
    }
    for (int m = 1; m <= kern.n_max; ++m) {
      const Complex phase = std::exp(Complex(0.0, m * kern.omega * t));
      const std::vector<Complex>& kd = kern.k_dd[static_cast<std::size_t>(m)];
      const std::vector<Complex>& ka = kern.k_ad[static_cast<std::size_t>(m)];
      for (std::size_t j = 0; j < n; ++j) {
        dd[j] += 2.0 * (kd[j] * phase).real();
        ad[j] += 2.0 * (ka[j] * phase).real();
      }
    }
  };

  auto rate = [&](int i, const std::vector<double>& dd,
                  const std::vector<double>& ad) {
    if (i == 0) return 0.0;
    double acc = 0.0;
    for (int j = 0; j <= i; ++j) {
      const double pv = p[static_cast<std::size_t>(i - j)];
      double f = -dd[static_cast<std::size_t>(j)] * pv +
                 ad[static_cast<std::size_t>(j)] * (1.0 - pv);
      if (j == 0 || j == i) f *= 0.5;
      acc += f;
    }
    return acc * dt;
  };

  std::vector<double> next_dd(n), next_ad(n);
  fill_row(0, row_dd, row_ad);
  for (int i = 0; i + 1 < grid.n; ++i) {
    const double r0 = rate(i, row_dd, row_ad);
    p[static_cast<std::size_t>(i + 1)] = p[static_cast<std::size_t>(i)] + dt * r0;
    fill_row(i + 1, next_dd, next_ad);
    const double r1 = rate(i + 1, next_dd, next_ad);
    p[static_cast<std::size_t>(i + 1)] =
        p[static_cast<std::size_t>(i)] + 0.5 * dt * (r0 + r1);
    row_dd.swap(next_dd);
    row_ad.swap(next_ad);
  }

  PopulationTrajectory out;
  out.grid = grid;
  out.p_d = std::move(p);
  for (double v : out.p_d)
    out.max_bound_dev = std::max({out.max_bound_dev, -v, v - 1.0});
  return out;
}

GmeKernelTable gme_table(const KernelSeries& series, const TimeGrid& grid,
                         bool zero_pad) {
  series.validate();
  grid.validate();
  check_lag_compat(series.grid, grid, zero_pad, "gme solve");

  static const char* kRow[4] = {"DD", "AD", "DA", "AA"};
  static const char* kCol[4] = {"D,D", "A,D", "D,A", "A,A"};
  GmeKernelTable table;
  table.k.assign(static_cast<std::size_t>(grid.n), Eigen::Matrix4cd::Zero());
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const std::string label =
          std::string("K_") + kRow[r] + "[" + kCol[c] + "]";
      const std::vector<Complex>& values =
          component(series, label, "gme solve");
      const std::size_t keep =
          std::min(values.size(), static_cast<std::size_t>(grid.n));
      for (std::size_t j = 0; j < keep; ++j) table.k[j](r, c) = values[j];
    }
  return table;
}

GmeKernelTable gme_table(const DmdModel& model, const TimeGrid& grid) {
  TimeGrid lag;
  lag.t0 = 0.0;
  lag.dt = grid.dt;
  lag.n = grid.n;
  const KernelSeries series = series_from_model(model, lag);
  return gme_table(series, grid, false);
}

DensityTrajectory solve_gme(const GmeKernelTable& kern,
                            const EtHamiltonian& h,
                            const Eigen::Matrix2cd& rho0,
                            const TimeGrid& grid) {
  grid.validate();
  if (kern.k.size() < static_cast<std::size_t>(grid.n))
    throw NumericalError("gme solve: kernel table shorter than grid");

  const double dt = grid.dt;
  const std::size_t n = static_cast<std::size_t>(grid.n);
  std::vector<Eigen::Vector4cd> p(n, Eigen::Vector4cd::Zero());
  p[0] << rho0(0, 0), rho0(1, 0), rho0(0, 1), rho0(1, 1);

  auto deriv = [&](int i) {
    Eigen::Vector4cd acc =
        liouvillian(h.at(grid.time(i))) * p[static_cast<std::size_t>(i)];
    if (i == 0) return acc;
    Eigen::Vector4cd mem = Eigen::Vector4cd::Zero();
    for (int j = 0; j <= i; ++j) {
      Eigen::Vector4cd f =
          kern.k[static_cast<std::size_t>(j)] * p[static_cast<std::size_t>(i - j)];
      if (j == 0 || j == i) f *= 0.5;
      mem += f;
    }
    return Eigen::Vector4cd(acc + dt * mem);
  };

  for (int i = 0; i + 1 < grid.n; ++i) {
    const Eigen::Vector4cd r0 = deriv(i);
    p[static_cast<std::size_t>(i + 1)] = p[static_cast<std::size_t>(i)] + dt * r0;
    const Eigen::Vector4cd r1 = deriv(i + 1);
    p[static_cast<std::size_t>(i + 1)] =
        p[static_cast<std::size_t>(i)] + 0.5 * dt * (r0 + r1);
  }

  DensityTrajectory out;
  out.grid = grid;
  out.rho.reserve(n);
  const Complex tr0 = p[0](0) + p[0](3);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Matrix2cd m;
    m << p[i](0), p[i](2), p[i](1), p[i](3);
    out.rho.push_back(m);
    out.max_trace_dev =
        std::max(out.max_trace_dev, std::abs(p[i](0) + p[i](3) - tr0));
    const double herm = std::max({std::abs(p[i](2) - std::conj(p[i](1))),
                                  std::abs(p[i](0).imag()),
                                  std::abs(p[i](3).imag())});
    out.max_herm_dev = std::max(out.max_herm_dev, herm);
  }
  out.flagged = out.max_trace_dev > kGmeInvariantTol ||
                out.max_herm_dev > kGmeInvariantTol;
  return out;
}

}  // namespace rkdmd
