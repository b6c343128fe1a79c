#include "rkdmd/hamiltonian.hpp"

#include <cmath>
#include <numbers>

namespace rkdmd {

EtHamiltonian EtHamiltonian::fixed(const Eigen::Matrix2cd& h) {
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("system: explicit Hamiltonian must be Hermitian");
  EtHamiltonian out;
  out.base_ = 0.5 * (h + h.adjoint());
  return out;
}

EtHamiltonian EtHamiltonian::et_params(double e0, double lambda, double vbar,
                                       double eps, double omega) {
  EtHamiltonian out;
  out.base_ << Complex(0.0, 0.0), Complex(vbar, 0.0), Complex(vbar, 0.0),
      Complex(e0 + lambda, 0.0);
  if (eps != 0.0) {
    if (!(omega > 0.0))
      throw ConfigError("system: drive amplitude set but omega is not > 0");
    out.eps_ = eps;
    out.omega_ = omega;
    out.driven_ = true;
  }
  return out;
}

Eigen::Matrix2cd EtHamiltonian::at(double t) const {
  Eigen::Matrix2cd h = base_;
  if (driven_) h(1, 1) += eps_ * std::cos(omega_ * t);
  return h;
}

double EtHamiltonian::period() const {
  if (!driven_)
    throw NumericalError("system: period requested for an undriven system");
  return 2.0 * std::numbers::pi / omega_;
}

}  // namespace rkdmd
