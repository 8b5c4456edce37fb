#pragma once

#include <Eigen/Dense>
#include <random>

#include "qtmat/qt_matrix.hpp"

namespace qtmat::testing {

inline LaurentSymbol laplacian()
{
   return LaurentSymbol(-1, {1.0, -2.0, 1.0});
}

inline Mat random_mat(std::mt19937& rng, Eigen::Index r, Eigen::Index c)
{
   std::normal_distribution<double> g;
   Mat m(r, c);
   for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = cplx(g(rng), g(rng));
   return m;
}

inline QtMatrix random_qt(std::mt19937& rng, int band = 8, int support = 10, int rank = 3)
{
   std::uniform_int_distribution<int> lo(-band, 0), hi(0, band), sup(1, support), rk(1, rank);
   std::normal_distribution<double> g;
   const int l = lo(rng), h = hi(rng);
   std::vector<cplx> c(h - l + 1);
   for (auto& v : c) v = cplx(g(rng), g(rng));
   const int k = rk(rng);
   return {LaurentSymbol(l, c), Correction(random_mat(rng, sup(rng), k), random_mat(rng, sup(rng), k))};
}

// Thomas algorithm for a constant tridiagonal system (sub, diag, super).
inline Vec thomas(cplx sub, cplx diag, cplx sup, const Vec& rhs)
{
   const Eigen::Index n = rhs.size();
   Vec cp(n), dp(n), x(n);
   cp(0) = sup / diag;
   dp(0) = rhs(0) / diag;
   for (Eigen::Index i = 1; i < n; ++i) {
      const cplx m = diag - sub * cp(i - 1);
      cp(i) = sup / m;
      dp(i) = (rhs(i) - sub * dp(i - 1)) / m;
   }
   x(n - 1) = dp(n - 1);
   for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = dp(i) - cp(i) * x(i + 1);
   return x;
}

inline int numerical_rank(const Mat& m, double tol)
{
   Eigen::JacobiSVD<Mat> svd(m);
   const auto s = svd.singularValues();
   int r = 0;
   while (r < s.size() && s(r) > tol * s(0)) ++r;
   return r;
}

inline double norm2(const Mat& m)
{
   if (m.size() == 0) return 0.0;
   return Eigen::BDCSVD<Mat>(m).singularValues()(0);
}

// A Y + Y B + C = 0 through the vectorized system (I (x) A + B^T (x) I) vec Y = -vec C.
inline Mat kron_sylvester(const Mat& A, const Mat& B, const Mat& C)
{
   const Eigen::Index m = A.rows(), n = B.rows();
   Mat K = Mat::Zero(m * n, m * n);
   for (Eigen::Index j = 0; j < n; ++j) {
      K.block(j * m, j * m, m, m) += A;
      for (Eigen::Index l = 0; l < n; ++l) K.block(j * m, l * m, m, m).diagonal().array() += B(l, j);
   }
   const Vec y = K.partialPivLu().solve(-C.reshaped());
   return y.reshaped(m, n);
}

// A Y + Y B + C = 0 for Hermitian A and B through their eigendecompositions.
inline Mat hermitian_sylvester(const Mat& A, const Mat& B, const Mat& C)
{
   Eigen::SelfAdjointEigenSolver<Mat> ea(A), eb(B);
   Mat Ct = ea.eigenvectors().adjoint() * C * eb.eigenvectors();
   for (Eigen::Index j = 0; j < Ct.cols(); ++j)
      for (Eigen::Index i = 0; i < Ct.rows(); ++i) Ct(i, j) /= -(ea.eigenvalues()(i) + eb.eigenvalues()(j));
   return ea.eigenvectors() * Ct * eb.eigenvectors().adjoint();
}

// M X N + X + C = 0 through (N^T (x) M + I) vec X = -vec C.
inline Mat kron_stein(const Mat& M, const Mat& N, const Mat& C)
{
   const Eigen::Index m = M.rows(), n = N.rows();
   Mat K = Mat::Identity(m * n, m * n);
   for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index l = 0; l < n; ++l) K.block(j * m, l * m, m, m) += N(l, j) * M;
   const Vec x = K.partialPivLu().solve(-C.reshaped());
   return x.reshaped(m, n);
}

// Unitary Q times a real diagonal times Q^*.
inline Mat hermitian_with_spectrum(std::mt19937& rng, const Eigen::VectorXd& eig)
{
   const Eigen::Index n = eig.size();
   Eigen::HouseholderQR<Mat> qr(random_mat(rng, n, n));
   const Mat Q = qr.householderQ() * Mat::Identity(n, n);
   return Q * eig.cast<cplx>().asDiagonal() * Q.adjoint();
}

// Cosines of the principal angles between the column spans of X and Y (orthonormal inputs).
inline Eigen::VectorXd principal_cosines(const Mat& X, const Mat& Y)
{
   return Eigen::JacobiSVD<Mat>(X.adjoint() * Y).singularValues();
}

} // namespace qtmat::testing
