#ifndef RKDMD_HAMILTONIAN_HPP
#define RKDMD_HAMILTONIAN_HPP

#include <Eigen/Dense>

#include "rkdmd/numerics.hpp"

namespace rkdmd {

// Two-level system Hamiltonian in the donor/acceptor basis (index 0 = D,
// index 1 = A).  Either a fixed user matrix, or the electron-transfer
// parameterization
//   H(t) = [[0, vbar], [vbar, e0 + lambda + eps*cos(omega t)]]
// where vbar is the bath-averaged coupling and lambda shifts the acceptor
// by the donor-bath reorganization energy.
class EtHamiltonian {
 public:
  static EtHamiltonian fixed(const Eigen::Matrix2cd& h);
  static EtHamiltonian et_params(double e0, double lambda, double vbar,
                                 double eps, double omega);

  Eigen::Matrix2cd at(double t) const;
  bool driven() const { return driven_; }
  // Drive period 2*pi/omega; throws for undriven systems.
  double period() const;

 private:
  EtHamiltonian() = default;
  Eigen::Matrix2cd base_ = Eigen::Matrix2cd::Zero();
  double eps_ = 0.0;
  double omega_ = 0.0;
  bool driven_ = false;
};

}  // namespace rkdmd

#endif  // RKDMD_HAMILTONIAN_HPP
