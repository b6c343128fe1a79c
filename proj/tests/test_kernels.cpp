#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "rkdmd/gme.hpp"
#include "rkdmd/kernels.hpp"

using namespace rkdmd;

namespace {

TimeGrid lag_grid(double dt, int n) {
  TimeGrid g;
  g.t0 = 0.0;
  g.dt = dt;
  g.n = n;
  return g;
}

BathExpansion donor_drude(int n_matsubara) {
  return correlation_expansion(SpectralDensity::drude(1.0, 1.0), 1.0,
                               n_matsubara, CouplingLabel::kDonorGap);
}

BathExpansion bridge_brownian() {
  return correlation_expansion(SpectralDensity::brownian(0.2, 1.0, 1.0), 1.0,
                               0, CouplingLabel::kBridge);
}

AdoState random_state(const HierarchySpace& space, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AdoState s;
  s.values.resize(static_cast<Eigen::Index>(space.state_size()));
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    s.values(i) = Complex(u(rng), u(rng));
  return s;
}

}  // namespace

TEST_CASE("projector and complement are an exact resolution of identity") {
  HierarchySpace space({donor_drude(1)}, 3);
  for (auto kind : {ProjectorKind::kPopulation, ProjectorKind::kSystem}) {
    AdoState x = random_state(space, 99);
    AdoState p = apply_projector(kind, x);
    AdoState q = apply_complement(kind, x);
    CHECK((p.values + q.values - x.values).norm() == 0.0);
    CHECK((apply_projector(kind, p).values - p.values).norm() == 0.0);
    CHECK((apply_complement(kind, q).values - q.values).norm() == 0.0);
    CHECK(apply_projector(kind, q).values.norm() == 0.0);
    CHECK(apply_complement(kind, p).values.norm() == 0.0);
  }
}

TEST_CASE("closed system kernel is 2 vbar^2 cos(gap * lag) exactly") {
  // Without a bath the complement dynamics is a pure coherence rotation and
  // the population kernel has the closed form 2 vbar^2 cos((h_AA - h_DD) tau).
  const double vbar = 0.8;
  const double gap = 1.3;
  HierarchySpace space({}, 0);
  auto h = EtHamiltonian::et_params(gap, 0.0, vbar, 0.0, 0.0);
  ExtractionInfo info;
  KernelSeries k = extract_kernel(space, h, ProjectorKind::kPopulation,
                                  lag_grid(0.01, 301), 0.0, 2, &info);
  REQUIRE(k.comp.count("k_DD") == 1);
  REQUIRE(k.comp.count("k_AD") == 1);
  for (int i = 0; i < 301; ++i) {
    double tau = 0.01 * i;
    double expected = 2.0 * vbar * vbar * std::cos(gap * tau);
    CHECK(std::abs(k.comp["k_DD"][static_cast<std::size_t>(i)].real() -
                   expected) < 1e-8);
    CHECK(std::abs(k.comp["k_AD"][static_cast<std::size_t>(i)].real() -
                   expected) < 1e-8);
  }
  CHECK(info.max_imag < 1e-12);
  CHECK(info.max_trace_colsum < 1e-12);
}

TEST_CASE("donor-gap coupling leaves the lag-zero kernel at 2 vbar^2") {
  HierarchySpace space({donor_drude(2)}, 4);
  auto h = EtHamiltonian::et_params(1.0, 0.5, 1.0, 0.0, 0.0);
  KernelSeries k = extract_kernel(space, h, ProjectorKind::kPopulation,
                                  lag_grid(0.02, 3));
  CHECK(k.comp["k_DD"][0].real() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(k.comp["k_AD"][0].real() == doctest::Approx(2.0).epsilon(1e-10));
  // Both kernels start positive: forward and backward transfer rates.
  CHECK(k.comp["k_DD"][1].real() > 0.0);
  CHECK(k.comp["k_AD"][1].real() > 0.0);
}

TEST_CASE("static dissipative kernel closes the population equation") {
  // The kernel is exact at any hierarchy depth, so solving the memory
  // equation with it must reproduce the hierarchy's own donor population
  // up to integrator error, O(dt^2).
  HierarchySpace space({donor_drude(1)}, 3);
  auto h = EtHamiltonian::et_params(1.0, 0.5, 1.0, 0.0, 0.0);
  TimeGrid grid = lag_grid(0.005, 401);

  ExtractionInfo info;
  KernelSeries k = extract_kernel(space, h, ProjectorKind::kPopulation, grid,
                                  0.0, 0, &info);
  CHECK(info.max_trace_colsum < 1e-11);
  CHECK(info.max_imag < 1e-11);

  PopulationTrajectory solved =
      solve_population(population_table(k, grid, false), 1.0, grid);

  auto direct = propagate(space, h, thermal_donor_initial(space), grid);
  double worst = 0.0;
  for (int i = 0; i < grid.n; ++i)
    worst = std::max(worst,
                     std::abs(solved.p_d[static_cast<std::size_t>(i)] -
                              direct[static_cast<std::size_t>(i)].values(0).real()));
  CHECK(worst < 5e-4);
  // And it is actually dynamics, not a constant.
  CHECK(solved.p_d.front() - solved.p_d.back() > 0.05);
}

TEST_CASE("system kernel closes the full density-matrix equation") {
  std::vector<BathExpansion> baths = {donor_drude(0), bridge_brownian()};
  HierarchySpace space(baths, 2);
  auto h = EtHamiltonian::et_params(1.0, 0.2, 1.0, 0.0, 0.0);
  TimeGrid grid = lag_grid(0.005, 401);

  KernelSeries k = extract_kernel(space, h, ProjectorKind::kSystem, grid);
  CHECK(k.comp.size() == 16);
  REQUIRE(k.comp.count("K_DD[D,D]") == 1);
  REQUIRE(k.comp.count("K_AD[A,D]") == 1);
  REQUIRE(k.comp.count("K_AA[D,A]") == 1);

  Eigen::Matrix2cd rho0 = Eigen::Matrix2cd::Zero();
  rho0(0, 0) = 1.0;
  DensityTrajectory solved =
      solve_gme(gme_table(k, grid, false), h, rho0, grid);
  auto direct = propagate(space, h, thermal_donor_initial(space), grid);

  double worst = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    Eigen::Matrix2cd ref = tier0_matrix(direct[static_cast<std::size_t>(i)]);
    worst = std::max(
        worst, (solved.rho[static_cast<std::size_t>(i)] - ref).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-3);
  CHECK(solved.max_trace_dev < 1e-6);
  CHECK(solved.max_herm_dev < 1e-6);
  CHECK_FALSE(solved.flagged);
}

TEST_CASE("static extraction ignores the time origin") {
  HierarchySpace space({donor_drude(1)}, 2);
  auto h = EtHamiltonian::et_params(1.0, 0.5, 1.0, 0.0, 0.0);
  TimeGrid grid = lag_grid(0.02, 51);
  KernelSeries a = extract_kernel(space, h, ProjectorKind::kPopulation, grid,
                                  0.0, 2);
  KernelSeries b = extract_kernel(space, h, ProjectorKind::kPopulation, grid,
                                  5.0, 2);
  for (const auto& [label, values] : a.comp)
    for (std::size_t i = 0; i < values.size(); ++i)
      CHECK(std::abs(values[i] - b.comp[label][i]) < 1e-14);
}

TEST_CASE("driven closed system: two-time kernel matches the phase integral") {
  // With a diagonal drive the complement rotation has the exact phase
  // phi = gap*tau + (eps/omega)(sin(w(t0+tau)) - sin(w t0)), so every phase
  // sample of the two-time kernel is 2 vbar^2 cos(phi).
  const double vbar = 0.7, gap = 1.0, eps = 0.5, omega = 2.0;
  HierarchySpace space({}, 0);
  auto h = EtHamiltonian::et_params(gap, 0.0, vbar, eps, omega);
  TimeGrid grid = lag_grid(0.01, 201);
  PhaseKernelSamples samples = extract_two_time_kernel(space, h, grid, 4, 3);
  REQUIRE(samples.k.size() == 4);
  CHECK(samples.period == doctest::Approx(M_PI).epsilon(1e-12));
  for (int j = 0; j < 4; ++j) {
    double t0 = samples.period * j / 4.0;
    for (int i = 0; i < grid.n; i += 7) {
      double tau = grid.time(i);
      double phi = gap * tau + eps / omega * (std::sin(omega * (t0 + tau)) -
                                              std::sin(omega * t0));
      double expected = 2.0 * vbar * vbar * std::cos(phi);
      CHECK(std::abs(samples.k[static_cast<std::size_t>(j)]
                         .comp["k_DD"][static_cast<std::size_t>(i)]
                         .real() -
                     expected) < 1e-7);
    }
  }
}

TEST_CASE("drive harmonics: conjugate symmetry and reconstruction") {
  const double vbar = 0.7, gap = 1.0, eps = 0.5, omega = 2.0;
  HierarchySpace space({}, 0);
  auto h = EtHamiltonian::et_params(gap, 0.0, vbar, eps, omega);
  TimeGrid grid = lag_grid(0.02, 101);
  PhaseKernelSamples samples = extract_two_time_kernel(space, h, grid, 16, 3);

  auto plus = fourier_component(samples, omega, 1);
  auto minus = fourier_component(samples, omega, -1);
  for (const auto& [label, values] : plus)
    for (std::size_t i = 0; i < values.size(); ++i)
      CHECK(std::abs(minus[label][i] - std::conj(values[i])) < 1e-10);

  FloquetKernelSet set = fourier_components(samples, omega, 6);
  CHECK(set.comp.size() == 7);
  // Harmonic content of exp(i a sin(...)) decays like Bessel functions, so
  // truncating at n = 6 reconstructs the sampled kernel to ~1e-6.
  for (int j = 0; j < samples.n_phase; j += 5) {
    double t0 = samples.period * j / samples.n_phase;
    for (int i = 0; i < grid.n; i += 13) {
      double t_eval = t0 + grid.time(i);
      auto rec = floquet_reconstruct(set, i, t_eval);
      Complex sampled = samples.k[static_cast<std::size_t>(j)]
                            .comp["k_DD"][static_cast<std::size_t>(i)];
      CHECK(std::abs(rec["k_DD"] - sampled) < 1e-5);
    }
  }

  KernelSeries flat = flatten_floquet(set);
  CHECK(flat.comp.size() == 14);
  CHECK(flat.comp.count("k_DD[n=0]") == 1);
  CHECK(flat.comp.count("k_AD[n=6]") == 1);
  // n = 0 slice passes through unchanged.
  for (std::size_t i = 0; i < 101; ++i)
    CHECK(flat.comp["k_DD[n=0]"][i] == set.comp[0]["k_DD"][i]);
}

TEST_CASE("spectrum: DC bin is dt times the plain sum") {
  KernelSeries series;
  series.grid = lag_grid(0.5, 8);
  std::vector<Complex> x(8);
  Complex sum(0.0, 0.0);
  for (int i = 0; i < 8; ++i) {
    x[static_cast<std::size_t>(i)] =
        Complex(std::cos(0.7 * i), 0.1 * i - 0.3);
    sum += x[static_cast<std::size_t>(i)];
  }
  series.comp["k_DD"] = x;
  SpectrumSeries spec = kernel_fft(series);
  REQUIRE(spec.omega.size() == 8);
  // Symmetric harmonic range for even n: j = -4 .. 3.
  CHECK(spec.omega.front() ==
        doctest::Approx(-2.0 * M_PI / (8 * 0.5) * 4).epsilon(1e-12));
  CHECK(spec.omega[4] == doctest::Approx(0.0));
  CHECK(std::abs(spec.comp["k_DD"][4] - sum * 0.5) < 1e-12);
  // Spot-check one oscillating bin against the definition.
  int j = 6;  // harmonic index j - 4 = 2
  double w = spec.omega[static_cast<std::size_t>(j)];
  Complex expected(0.0, 0.0);
  for (int m = 0; m < 8; ++m)
    expected += x[static_cast<std::size_t>(m)] *
                std::exp(Complex(0.0, -w * m * 0.5));
  expected *= 0.5;
  CHECK(std::abs(spec.comp["k_DD"][static_cast<std::size_t>(j)] - expected) <
        1e-12);
}

TEST_CASE("extraction guards") {
  HierarchySpace space({donor_drude(0)}, 1);
  auto h = EtHamiltonian::et_params(1.0, 0.5, 1.0, 0.0, 0.0);
  TimeGrid bad = lag_grid(0.01, 10);
  bad.t0 = 1.0;
  CHECK_THROWS_AS(
      extract_kernel(space, h, ProjectorKind::kPopulation, bad),
      ConfigError);
  // Two-time sampling needs a drive.
  CHECK_THROWS_AS(extract_two_time_kernel(space, h, lag_grid(0.01, 10), 4),
                  ConfigError);
  auto driven = EtHamiltonian::et_params(1.0, 0.5, 1.0, 0.5, 2.0);
  CHECK_THROWS_AS(extract_two_time_kernel(space, driven, lag_grid(0.01, 10), 0),
                  ConfigError);

  KernelSeries broken;
  broken.grid = lag_grid(0.01, 10);
  broken.comp["k_DD"].assign(9, Complex(0.0, 0.0));
  CHECK_THROWS_AS(broken.validate(), NumericalError);
}
