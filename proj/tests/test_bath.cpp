#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "rkdmd/bath.hpp"
#include "support/oracles.hpp"

using namespace rkdmd;

TEST_CASE("drude pole coefficient: lambda gamma (cot(beta gamma / 2) - i)") {
  auto exp = correlation_expansion(SpectralDensity::drude(1.0, 1.0), 1.0, 1,
                                   CouplingLabel::kDonorGap);
  REQUIRE(exp.terms.size() == 2);
  const BathTerm& pole = exp.terms[0];
  CHECK(pole.eta.real() == doctest::Approx(1.830487721712452).epsilon(1e-14));
  CHECK(pole.eta.imag() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(pole.gamma == Complex(1.0, 0.0));
  // First Matsubara coefficient 4 lambda gamma nu / (beta (nu^2 - gamma^2)).
  CHECK(exp.terms[1].eta.real() ==
        doctest::Approx(0.6531646256126765).epsilon(1e-14));
  CHECK(exp.terms[1].eta.imag() == 0.0);
  CHECK(exp.terms[1].gamma.real() ==
        doctest::Approx(2.0 * M_PI).epsilon(1e-15));
}

TEST_CASE("brownian pole pair carries conjugate rates and real C(0) sum") {
  auto exp = correlation_expansion(SpectralDensity::brownian(0.2, 1.0, 1.0),
                                   1.0, 0, CouplingLabel::kBridge);
  REQUIRE(exp.terms.size() == 2);
  const BathTerm& plus = exp.terms[0];
  const BathTerm& minus = exp.terms[1];
  CHECK(plus.eta.real() ==
        doctest::Approx(0.33213027198888445).epsilon(1e-13));
  CHECK(plus.eta.imag() ==
        doctest::Approx(0.10616439034426177).epsilon(1e-13));
  CHECK(minus.eta.real() ==
        doctest::Approx(0.10119016431303415).epsilon(1e-13));
  CHECK(minus.eta.imag() ==
        doctest::Approx(-0.10616439034426177).epsilon(1e-13));
  CHECK(std::abs(plus.gamma - std::conj(minus.gamma)) < 1e-15);
  CHECK(plus.gamma.real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(plus.gamma.imag() ==
        doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
  // eta_bar is conj(eta) of the conjugate-rate partner.
  CHECK(std::abs(plus.eta_bar - std::conj(minus.eta)) == 0.0);
  CHECK(std::abs(minus.eta_bar - std::conj(plus.eta)) == 0.0);
  CHECK(plus.conj_pair == 1);
  CHECK(minus.conj_pair == 0);
  // <x^2> is real: pole contributions to C(0) cancel in the imaginary part.
  CHECK(std::abs((plus.eta + minus.eta).imag()) < 1e-15);
}

TEST_CASE("drude reconstruction matches direct quadrature of C(t)") {
  auto exp = correlation_expansion(SpectralDensity::drude(1.0, 1.0), 1.0, 1000,
                                   CouplingLabel::kDonorGap);
  for (double t : {0.5, 1.0, 2.0}) {
    Complex ref = oracle::drude_c(1.0, 1.0, 1.0, t);
    Complex got = exp.c_at(t);
    CAPTURE(t);
    CHECK(std::abs(got.real() - ref.real()) < 1e-6);
    CHECK(std::abs(got.imag() - ref.imag()) < 1e-6);
  }
}

TEST_CASE("drude reconstruction, colder bath") {
  auto exp = correlation_expansion(SpectralDensity::drude(0.5, 2.0), 3.0, 1500,
                                   CouplingLabel::kDonorGap);
  Complex ref = oracle::drude_c(0.5, 2.0, 3.0, 0.8);
  Complex got = exp.c_at(0.8);
  CHECK(std::abs(got - ref) < 1e-6);
}

TEST_CASE("brownian C(0) matches quadrature") {
  auto j = SpectralDensity::brownian(0.2, 1.0, 1.0);
  double ref = oracle::brownian_c0(0.2, 1.0, 1.0, 1.0);
  auto exp = correlation_expansion(j, 1.0, 2000, CouplingLabel::kBridge);
  Complex c0 = exp.c0_sum();
  CHECK(std::abs(c0.real() - ref) < 1e-6);
  CHECK(std::abs(c0.imag()) < 1e-12);
  // The reported truncation residual bounds what a coarse expansion drops.
  auto coarse = correlation_expansion(j, 1.0, 3, CouplingLabel::kBridge);
  CHECK(std::abs(coarse.c0_sum().real() - ref) <=
        coarse.c0_residual + 1e-6);
  CHECK(coarse.c0_residual > 0.0);
  CHECK(coarse.c0_residual < std::abs(ref));
}

TEST_CASE("brownian C(t) matches quadrature at finite time") {
  auto exp = correlation_expansion(SpectralDensity::brownian(0.2, 1.0, 1.0),
                                   1.0, 800, CouplingLabel::kBridge);
  Complex ref = oracle::brownian_c(0.2, 1.0, 1.0, 1.0, 0.7);
  Complex got = exp.c_at(0.7);
  CHECK(std::abs(got.real() - ref.real()) < 1e-6);
  CHECK(std::abs(got.imag() - ref.imag()) < 1e-6);
}

TEST_CASE("conjugate reconstruction equals conj(C(t)) by construction") {
  for (auto j : {SpectralDensity::drude(1.0, 1.0),
                 SpectralDensity::brownian(0.2, 1.0, 1.0)}) {
    auto exp = correlation_expansion(j, 1.0, 6, CouplingLabel::kDonorGap);
    for (double t : {0.0, 0.3, 1.7}) {
      Complex a = exp.c_conj_at(t);
      Complex b = std::conj(exp.c_at(t));
      CHECK(std::abs(a - b) < 1e-15);
    }
  }
}

TEST_CASE("truncation error at t = 0 shrinks as terms are added") {
  auto j = SpectralDensity::brownian(0.2, 1.0, 1.0);
  double ref = oracle::brownian_c0(0.2, 1.0, 1.0, 1.0);
  double prev = 1e100;
  for (int n : {0, 4, 16, 64}) {
    auto exp = correlation_expansion(j, 1.0, n, CouplingLabel::kBridge);
    double err = std::abs(exp.c0_sum().real() - ref);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("markovian weight equals the zero-frequency limit of J(w)/w / beta") {
  auto drude = SpectralDensity::drude(1.3, 0.7);
  auto brown = SpectralDensity::brownian(0.2, 1.1, 0.9);
  for (double beta : {0.5, 1.0, 4.0}) {
    CHECK(markovian_weight_exact(drude, beta) ==
          doctest::Approx(eval_j(drude, 1e-9) / 1e-9 / beta).epsilon(1e-6));
    CHECK(markovian_weight_exact(brown, beta) ==
          doctest::Approx(eval_j(brown, 1e-9) / 1e-9 / beta).epsilon(1e-6));
  }
}

TEST_CASE("time integral of the expansion approaches the markovian weight") {
  // Re sum eta_k / gamma_k converges to the exact weight like 1/N because
  // the Matsubara coefficients fall off as 1/nu^2 once divided by the rate.
  auto j = SpectralDensity::drude(1.0, 1.0);
  const double beta = 1.0;
  double exact = markovian_weight_exact(j, beta);
  for (int n : {500, 2000}) {
    auto exp = correlation_expansion(j, beta, n, CouplingLabel::kDonorGap);
    Complex integral(0.0, 0.0);
    for (const BathTerm& term : exp.terms) integral += term.eta / term.gamma;
    double tail_bound =
        1.5 * j.lambda * j.gamma * beta / (M_PI * M_PI * n);
    CHECK(std::abs(integral.real() - exact) < tail_bound);
  }
}

TEST_CASE("spectral density spot values") {
  CHECK(eval_j(SpectralDensity::drude(1.0, 1.0), 1.0) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_j(SpectralDensity::brownian(0.2, 1.0, 1.0), 1.0) ==
        doctest::Approx(0.4).epsilon(1e-15));
  CHECK(eval_j(SpectralDensity::drude(1.0, 1.0), 0.0) == 0.0);
}

TEST_CASE("parameter validation refuses unusable densities") {
  CHECK_THROWS_AS(SpectralDensity::drude(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(SpectralDensity::drude(1.0, -1.0), ConfigError);
  CHECK_THROWS_AS(SpectralDensity::brownian(1.0, 1.0, 2.0), ConfigError);
  CHECK_THROWS_AS(SpectralDensity::brownian(1.0, 1.0, 2.5), ConfigError);
  CHECK_NOTHROW(SpectralDensity::brownian(1.0, 1.0, 1.9999));
}

TEST_CASE("degenerate Matsubara/Drude pole is refused, not divided by zero") {
  // beta*gamma = 2*pi puts the Drude rate exactly on the first Bose pole.
  auto j = SpectralDensity::drude(1.0, 2.0 * M_PI);
  CHECK_THROWS_AS(correlation_expansion(j, 1.0, 4, CouplingLabel::kDonorGap),
                  ConfigError);
  CHECK_THROWS_AS(
      correlation_expansion(SpectralDensity::drude(1.0, 1.0), -1.0, 4,
                            CouplingLabel::kDonorGap),
      ConfigError);
  CHECK_THROWS_AS(
      correlation_expansion(SpectralDensity::drude(1.0, 1.0), 1.0, -1,
                            CouplingLabel::kDonorGap),
      ConfigError);
}
