#include "rkdmd/bath.hpp"

#include <cmath>
#include <numbers>

namespace rkdmd {

namespace {

constexpr double kPi = std::numbers::pi;

// Matsubara coefficient of J evaluated at the Bose pole -i nu.
double matsubara_coeff(const SpectralDensity& j, double beta, double nu) {
  if (j.kind == SpectralDensity::Kind::kDrude) {
    const double den = nu * nu - j.gamma * j.gamma;
    if (std::abs(den) < 1e-12 * j.gamma * j.gamma)
      throw ConfigError(
          "bath: a Matsubara frequency coincides with the Drude rate; "
          "perturb beta or gamma");
    return 4.0 * j.lambda * j.gamma * nu / (beta * den);
  }
  const double w2 = j.omega0 * j.omega0;
  const double den = (nu * nu + w2) * (nu * nu + w2) - nu * nu * j.zeta * j.zeta;
  return -4.0 * j.lambda * w2 * j.zeta * nu / (beta * den);
}

}  // namespace

SpectralDensity SpectralDensity::drude(double lambda, double gamma) {
  SpectralDensity j;
  j.kind = Kind::kDrude;
  j.lambda = lambda;
  j.gamma = gamma;
  j.validate();
  return j;
}

SpectralDensity SpectralDensity::brownian(double lambda, double omega0,
                                          double zeta) {
  SpectralDensity j;
  j.kind = Kind::kBrownian;
  j.lambda = lambda;
  j.omega0 = omega0;
  j.zeta = zeta;
  j.validate();
  return j;
}

void SpectralDensity::validate() const {
  if (kind == Kind::kDrude) {
    if (!(lambda > 0.0)) throw ConfigError("bath: drude lambda must be > 0");
    if (!(gamma > 0.0)) throw ConfigError("bath: drude gamma must be > 0");
    return;
  }
  if (!(lambda > 0.0)) throw ConfigError("bath: brownian lambda must be > 0");
  if (!(omega0 > 0.0)) throw ConfigError("bath: brownian omega0 must be > 0");
  if (!(zeta > 0.0)) throw ConfigError("bath: brownian zeta must be > 0");
  if (!(zeta < 2.0 * omega0))
    throw ConfigError(
        "bath: overdamped brownian mode (zeta >= 2*omega0) is not supported");
}

double eval_j(const SpectralDensity& j, double omega) {
  if (j.kind == SpectralDensity::Kind::kDrude)
    return 2.0 * j.lambda * j.gamma * omega /
           (omega * omega + j.gamma * j.gamma);
  const double w2 = j.omega0 * j.omega0;
  const double d = omega * omega - w2;
  return 2.0 * j.lambda * w2 * j.zeta * omega /
         (d * d + omega * omega * j.zeta * j.zeta);
}

Complex BathExpansion::c_at(double t) const {
  Complex acc(0.0, 0.0);
  for (const BathTerm& term : terms) acc += term.eta * std::exp(-term.gamma * t);
  return acc;
}

Complex BathExpansion::c_conj_at(double t) const {
  Complex acc(0.0, 0.0);
  for (const BathTerm& term : terms)
    acc += term.eta_bar * std::exp(-term.gamma * t);
  return acc;
}

Complex BathExpansion::c0_sum() const {
  Complex acc(0.0, 0.0);
  for (const BathTerm& term : terms) acc += term.eta;
  return acc;
}

BathExpansion correlation_expansion(const SpectralDensity& j, double beta,
                                    int n_matsubara, CouplingLabel coupling) {
  j.validate();
  if (!(beta > 0.0)) throw ConfigError("bath: beta must be > 0");
  if (n_matsubara < 0) throw ConfigError("bath: n_matsubara must be >= 0");

  BathExpansion exp;
  exp.n_matsubara = n_matsubara;
  exp.beta = beta;
  exp.coupling = coupling;

  if (j.kind == SpectralDensity::Kind::kDrude) {
    const double half = 0.5 * beta * j.gamma;
    if (std::abs(std::sin(half)) < 1e-12)
      throw ConfigError(
          "bath: beta*gamma is a multiple of 2*pi, Drude pole degenerate with "
          "a Matsubara pole; perturb beta or gamma");
    const double cot = std::cos(half) / std::sin(half);
    BathTerm pole;
    pole.eta = j.lambda * j.gamma * Complex(cot, -1.0);
    pole.eta_bar = std::conj(pole.eta);
    pole.gamma = Complex(j.gamma, 0.0);
    pole.conj_pair = 0;
    exp.terms.push_back(pole);
  } else {
    const double w1 =
        std::sqrt(j.omega0 * j.omega0 - 0.25 * j.zeta * j.zeta);
    const double pref = j.lambda * j.omega0 * j.omega0 / (2.0 * w1);
    const Complex arg = 0.5 * beta * Complex(w1, -0.5 * j.zeta);
    const Complex coth = 1.0 / std::tanh(arg);
    BathTerm plus;
    plus.eta = pref * (coth + 1.0);
    plus.gamma = Complex(0.5 * j.zeta, w1);
    plus.conj_pair = 1;
    BathTerm minus;
    minus.eta = pref * (std::conj(coth) - 1.0);
    minus.gamma = Complex(0.5 * j.zeta, -w1);
    minus.conj_pair = 0;
    plus.eta_bar = std::conj(minus.eta);
    minus.eta_bar = std::conj(plus.eta);
    exp.terms.push_back(plus);
    exp.terms.push_back(minus);
  }

  const int offset = static_cast<int>(exp.terms.size());
  for (int k = 1; k <= n_matsubara; ++k) {
    const double nu = 2.0 * kPi * k / beta;
    BathTerm term;
    term.eta = Complex(matsubara_coeff(j, beta, nu), 0.0);
    term.eta_bar = term.eta;
    term.gamma = Complex(nu, 0.0);
    term.conj_pair = offset + k - 1;
    exp.terms.push_back(term);
  }

  // Tail estimate: coefficients decay like 1/nu^3, so a few thousand extra
  // terms pin the neglected weight well below any tolerance used here.
  double tail = 0.0;
  for (int k = n_matsubara + 1; k <= n_matsubara + 5000; ++k)
    tail += matsubara_coeff(j, beta, 2.0 * kPi * k / beta);
  exp.c0_residual = std::abs(tail);
  return exp;
}

double markovian_weight_exact(const SpectralDensity& j, double beta) {
  if (j.kind == SpectralDensity::Kind::kDrude)
    return 2.0 * j.lambda / (beta * j.gamma);
  return 2.0 * j.lambda * j.zeta / (beta * j.omega0 * j.omega0);
}

std::string to_string(CouplingLabel label) {
  return label == CouplingLabel::kDonorGap ? "donor_gap" : "bridge";
}

}  // namespace rkdmd
