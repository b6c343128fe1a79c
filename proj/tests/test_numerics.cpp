#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rkdmd/numerics.hpp"
#include "support/oracles.hpp"

using namespace rkdmd;

namespace {

std::mt19937_64 rng(421995);

CMatrix random_cmatrix(int rows, int cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = Complex(u(rng), u(rng));
  return m;
}

// Matrix with exactly the given singular values padded by zeros.
CMatrix with_spectrum(int rows, int cols, const std::vector<double>& sv) {
  CMatrix a = random_cmatrix(rows, rows);
  CMatrix b = random_cmatrix(cols, cols);
  Eigen::HouseholderQR<CMatrix> qa(a), qb(b);
  CMatrix qu = qa.householderQ();
  CMatrix qv = qb.householderQ();
  CMatrix s = CMatrix::Zero(rows, cols);
  for (std::size_t i = 0; i < sv.size(); ++i) s(i, i) = sv[i];
  return qu * s * qv.adjoint();
}

}  // namespace

TEST_CASE("threshold svd finds the numerical rank and reconstructs") {
  CMatrix a = with_spectrum(9, 7, {4.0, 1.5, 0.3, 2e-13, 1e-14});
  TruncatedSvd svd = truncated_svd(a, RankPolicy::threshold(1e-10));
  CHECK(svd.rank() == 3);
  CHECK(svd.sigma(0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(svd.sigma(2) == doctest::Approx(0.3).epsilon(1e-12));
  CMatrix rebuilt = svd.u * svd.sigma.cast<Complex>().asDiagonal() *
                    svd.v.adjoint();
  CHECK((rebuilt - a).norm() <= 1e-11 * a.norm());
  // Factor orthonormality.
  CHECK((svd.u.adjoint() * svd.u - CMatrix::Identity(3, 3)).norm() < 1e-13);
  CHECK((svd.v.adjoint() * svd.v - CMatrix::Identity(3, 3)).norm() < 1e-13);
}

TEST_CASE("fixed-rank svd keeps the requested count but never zeros") {
  CMatrix a = with_spectrum(6, 6, {2.0, 1.0, 0.5});
  TruncatedSvd svd = truncated_svd(a, RankPolicy::fixed(2));
  CHECK(svd.rank() == 2);
  // Asking for more than the true rank must not resurrect zero modes.
  TruncatedSvd wide = truncated_svd(a, RankPolicy::fixed(5));
  CHECK(wide.rank() == 3);
}

TEST_CASE("svd of a zero matrix is rejected, not silently empty") {
  CMatrix z = CMatrix::Zero(4, 4);
  CHECK_THROWS_AS(truncated_svd(z, RankPolicy::threshold(1e-10)),
                  NumericalError);
}

TEST_CASE("rank policy validation") {
  CHECK_THROWS_AS(RankPolicy::fixed(0).validate(), ConfigError);
  CHECK_THROWS_AS(RankPolicy::threshold(0.0).validate(), ConfigError);
  CHECK_THROWS_AS(RankPolicy::threshold(1.5).validate(), ConfigError);
  CHECK_NOTHROW(RankPolicy::threshold(1e-10).validate());
}

TEST_CASE("eigendecomposition recovers a planted spectrum, sorted") {
  CVector lam(4);
  lam << Complex(0.9, 0.3), Complex(-0.5, 0.6), Complex(0.2, 0.0),
      Complex(0.05, -0.05);
  CMatrix v = random_cmatrix(4, 4);
  CMatrix a = v * lam.asDiagonal() * v.inverse();
  EigResult eig = eig_dense(a);
  REQUIRE(eig.values.size() == 4);
  for (int i = 0; i + 1 < 4; ++i)
    CHECK(std::abs(eig.values(i)) >= std::abs(eig.values(i + 1)) - 1e-12);
  // Planted values sorted by modulus: 0.9+0.3i, -0.5+0.6i, 0.2, 0.05-0.05i.
  CHECK(std::abs(eig.values(0) - lam(0)) < 1e-10);
  CHECK(std::abs(eig.values(1) - lam(1)) < 1e-10);
  CHECK(std::abs(eig.values(2) - lam(2)) < 1e-10);
  CHECK(std::abs(eig.values(3) - lam(3)) < 1e-10);
  // Residual of the eigen relation per pair.
  for (int i = 0; i < 4; ++i) {
    CVector r = a * eig.vectors.col(i) - eig.values(i) * eig.vectors.col(i);
    CHECK(r.norm() < 1e-10);
    CHECK(eig.vectors.col(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pinv_apply solves consistent systems and drops small modes") {
  CMatrix a = with_spectrum(8, 5, {3.0, 1.0, 0.4, 1e-12});
  CVector x_true = random_cmatrix(5, 1).col(0);
  CVector y = a * x_true;
  TruncatedSvd svd = truncated_svd(a, RankPolicy::threshold(1e-14));
  CHECK(svd.rank() == 4);

  int dropped = 0;
  CVector x = pinv_apply(svd, y, 1e-8, &dropped);
  CHECK(dropped == 1);
  // Residual orthogonal to the retained column space.
  CVector r = a * x - y;
  CMatrix u3 = svd.u.leftCols(3);
  CHECK((u3.adjoint() * r).norm() < 1e-9 * y.norm());

  // With no cutoff the full consistent system is solved.
  CVector x_full = pinv_apply(svd, y);
  CHECK((a * x_full - y).norm() < 1e-8 * y.norm());
}

TEST_CASE("lsq_solve matches the pseudoinverse on overdetermined data") {
  CMatrix a = random_cmatrix(10, 4);
  CVector y = random_cmatrix(10, 1).col(0);
  CVector x = lsq_solve(a, y);
  // Normal-equation residual: A^H (A x - y) = 0 characterizes the minimizer.
  CHECK((a.adjoint() * (a * x - y)).norm() < 1e-11 * y.norm());
}

TEST_CASE("rk4 observed convergence order is four") {
  CMatrix a(3, 3);
  a << Complex(-0.2, 1.0), Complex(0.3, 0.0), Complex(0.0, -0.4),
      Complex(0.0, 0.2), Complex(-0.1, -2.0), Complex(0.5, 0.0),
      Complex(0.1, 0.0), Complex(0.0, 0.0), Complex(-0.3, 0.7);
  CVector y0(3);
  y0 << Complex(1.0, 0.0), Complex(0.0, -1.0), Complex(0.5, 0.5);
  CVector exact = oracle::expm(a) * y0;

  auto rhs = [&](double, const CVector& y) -> CVector { return a * y; };
  auto integrate = [&](int steps) {
    double h = 1.0 / steps;
    CVector y = y0;
    for (int i = 0; i < steps; ++i) y = rk4_step(rhs, i * h, y, h);
    return (y - exact).norm();
  };
  double e1 = integrate(20);
  double e2 = integrate(40);
  double order = std::log2(e1 / e2);
  CHECK(order > 3.8);
  CHECK(order < 4.3);
  CHECK(e2 < 1e-6);
}
