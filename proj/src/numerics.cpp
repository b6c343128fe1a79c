#include "rkdmd/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace rkdmd {

TruncatedSvd truncated_svd(const CMatrix& a, const RankPolicy& policy) {
  policy.validate();
  if (a.size() == 0) throw NumericalError("svd: empty matrix");

  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const int full = static_cast<int>(s.size());

  int r = 0;
  if (policy.mode == RankPolicy::Mode::kFixed) {
    r = std::min(policy.rank, full);
    // A fixed rank never resurrects numerically-zero directions; the floor
    // is the usual numerical-rank cutoff eps * max(m, n) * sigma_0.
    const double floor = std::numeric_limits<double>::epsilon() *
                         static_cast<double>(std::max(a.rows(), a.cols())) *
                         s(0);
    while (r > 0 && s(r - 1) <= floor) --r;
  } else {
    const double cut = policy.eps_rel * s(0);
    while (r < full && s(r) > cut && s(r) > 0.0) ++r;
  }
  if (r == 0)
    throw NumericalError("svd: truncation removed every singular value");

  TruncatedSvd out;
  out.u = svd.matrixU().leftCols(r);
  out.sigma = s.head(r);
  out.v = svd.matrixV().leftCols(r);
  return out;
}

EigResult eig_dense(const CMatrix& a) {
  if (a.rows() != a.cols()) throw NumericalError("eig: matrix not square");
  Eigen::ComplexEigenSolver<CMatrix> solver(a);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eig: iteration failed to converge");

  const int n = static_cast<int>(a.rows());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const CVector& vals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(vals(i)) > std::abs(vals(j));
  });

  EigResult out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values(i) = vals(order[static_cast<std::size_t>(i)]);
    CVector col = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    double nrm = col.norm();
    if (nrm > 0.0) col /= nrm;
    out.vectors.col(i) = col;
  }
  return out;
}

CVector pinv_apply(const TruncatedSvd& svd, const CVector& y, double cutoff,
                   int* dropped) {
  if (y.size() != svd.u.rows())
    throw NumericalError("pinv: vector length does not match U rows");
  const int r = svd.rank();
  const double floor_val = cutoff > 0.0 ? cutoff * svd.sigma(0) : 0.0;

  CVector coeffs = svd.u.adjoint() * y;
  int kept = 0;
  for (int i = 0; i < r; ++i) {
    if (svd.sigma(i) > floor_val) {
      coeffs(i) /= svd.sigma(i);
      ++kept;
    } else {
      coeffs(i) = Complex(0.0, 0.0);
    }
  }
  if (dropped) *dropped = r - kept;
  return svd.v * coeffs;
}

CVector lsq_solve(const CMatrix& a, const CVector& y) {
  if (y.size() != a.rows())
    throw NumericalError("lsq: rhs length does not match rows");
  return a.completeOrthogonalDecomposition().solve(y);
}

}  // namespace rkdmd
