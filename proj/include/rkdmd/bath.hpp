#ifndef RKDMD_BATH_HPP
#define RKDMD_BATH_HPP

#include <string>
#include <vector>

#include "rkdmd/numerics.hpp"

namespace rkdmd {

// Harmonic-bath spectral densities.  Drude: J(w) = 2 lambda gamma w /
// (w^2 + gamma^2).  Brownian: J(w) = 2 lambda w0^2 zeta w /
// ((w^2 - w0^2)^2 + w^2 zeta^2), supported in the underdamped regime
// zeta < 2 w0 only.
struct SpectralDensity {
  enum class Kind { kDrude, kBrownian };

  Kind kind = Kind::kDrude;
  double lambda = 0.0;  // reorganization energy / coupling strength
  double gamma = 0.0;   // Drude inverse correlation time
  double omega0 = 0.0;  // Brownian oscillator frequency
  double zeta = 0.0;    // Brownian friction

  static SpectralDensity drude(double lambda, double gamma);
  static SpectralDensity brownian(double lambda, double omega0, double zeta);
  void validate() const;
};

double eval_j(const SpectralDensity& j, double omega);

// Which system operator the bath couples to.  kDonorGap multiplies
// |A><A| (energy-gap fluctuations), kBridge multiplies the off-diagonal
// coupling operator |D><A| + |A><D|.
enum class CouplingLabel { kDonorGap, kBridge };

// One exponential term of C(t>0) = sum_k eta_k exp(-gamma_k t).
// eta_bar_k is the coefficient appearing on the right side of the
// hierarchy down-coupling; it equals conj(eta) of the term whose decay
// rate is the complex conjugate of gamma_k (conj_pair holds that index,
// the term itself for real rates).  This pairing keeps conjugate
// hierarchy blocks exchanging under Hermitian conjugation, which is what
// preserves rho = rho^H during propagation.
struct BathTerm {
  Complex eta;
  Complex eta_bar;
  Complex gamma;
  int conj_pair = -1;
};

struct BathExpansion {
  std::vector<BathTerm> terms;
  int n_matsubara = 0;
  double beta = 0.0;
  CouplingLabel coupling = CouplingLabel::kDonorGap;
  // Magnitude of the Matsubara tail dropped by the truncation, estimated
  // from a deep partial sum; a C(0) accuracy indicator.
  double c0_residual = 0.0;

  // Reconstructed C(t) for t >= 0.
  Complex c_at(double t) const;
  // Reconstruction of conj(C(t)) through the conjugate-pair coefficients;
  // equals conj(c_at(t)) exactly when the pairing is consistent.
  Complex c_conj_at(double t) const;
  Complex c0_sum() const;
};

// Exponential decomposition of the finite-temperature correlation function
// with n_matsubara Matsubara terms (plus the spectral-density poles).
BathExpansion correlation_expansion(const SpectralDensity& j, double beta,
                                    int n_matsubara, CouplingLabel coupling);

// Exact Markovian weight Re integral_0^inf C(t) dt for the full (untruncated)
// correlation function; used to report how much memory the truncation keeps.
double markovian_weight_exact(const SpectralDensity& j, double beta);

std::string to_string(CouplingLabel label);

}  // namespace rkdmd

#endif  // RKDMD_BATH_HPP
