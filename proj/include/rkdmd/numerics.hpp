#ifndef RKDMD_NUMERICS_HPP
#define RKDMD_NUMERICS_HPP

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "rkdmd/errors.hpp"

namespace rkdmd {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Rank selection for truncated factorizations: either a fixed target rank
// or a relative singular-value threshold (keep sigma_i > eps_rel * sigma_0).
struct RankPolicy {
  enum class Mode { kFixed, kThreshold };

  Mode mode = Mode::kThreshold;
  int rank = 0;
  double eps_rel = 1e-10;

  static RankPolicy fixed(int r) {
    RankPolicy p;
    p.mode = Mode::kFixed;
    p.rank = r;
    return p;
  }

  static RankPolicy threshold(double eps) {
    RankPolicy p;
    p.mode = Mode::kThreshold;
    p.eps_rel = eps;
    return p;
  }

  void validate() const {
    if (mode == Mode::kFixed) {
      if (rank < 1) throw ConfigError("rank policy: fixed rank must be >= 1");
    } else {
      if (!(eps_rel > 0.0) || !(eps_rel < 1.0))
        throw ConfigError("rank policy: threshold must lie in (0, 1)");
    }
  }
};

// Thin SVD truncated per policy: A ~= U diag(sigma) V^H with U (m x r),
// V (n x r), sigma descending and strictly positive.
struct TruncatedSvd {
  CMatrix u;
  RVector sigma;
  CMatrix v;

  int rank() const { return static_cast<int>(sigma.size()); }
};

TruncatedSvd truncated_svd(const CMatrix& a, const RankPolicy& policy);

// Dense eigendecomposition A W = W diag(lambda).  Eigenvectors are
// unit-norm columns of W; pairs are sorted by descending |lambda| so
// results are reproducible across runs.
struct EigResult {
  CVector values;
  CMatrix vectors;
};

EigResult eig_dense(const CMatrix& a);

// x = V diag(1/sigma) U^H y from an existing truncated SVD.  Components with
// sigma_i <= cutoff * sigma_0 are dropped; *dropped reports how many.
CVector pinv_apply(const TruncatedSvd& svd, const CVector& y,
                   double cutoff = 0.0, int* dropped = nullptr);

// Minimum-norm least squares min ||A x - y||_2 via complete orthogonal
// decomposition.
CVector lsq_solve(const CMatrix& a, const CVector& y);

// One classical Runge-Kutta 4 step for dy/dt = f(t, y).
template <typename Rhs>
CVector rk4_step(Rhs&& f, double t, const CVector& y, double h) {
  CVector k1 = f(t, y);
  CVector k2 = f(t + 0.5 * h, CVector(y + (0.5 * h) * k1));
  CVector k3 = f(t + 0.5 * h, CVector(y + (0.5 * h) * k2));
  CVector k4 = f(t + h, CVector(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace rkdmd

#endif  // RKDMD_NUMERICS_HPP
