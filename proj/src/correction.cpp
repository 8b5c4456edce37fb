#include "qtmat/correction.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qtmat/block_vector.hpp"
#include "qtmat/errors.hpp"

namespace qtmat {

namespace {

struct ThinQr {
   Mat Q;
   Mat R;
};

ThinQr thin_qr(const Mat& m)
{
   const Eigen::Index p = std::min(m.rows(), m.cols());
   Eigen::HouseholderQR<Mat> qr(m);
   ThinQr out;
   out.Q = qr.householderQ() * Mat::Identity(m.rows(), p);
   out.R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
   return out;
}

// Trailing rows of m whose norm (scaled by the weights) is <= thresh.
Eigen::Index trimmed_rows(const Mat& m, const Eigen::VectorXd& weights, double thresh)
{
   Eigen::Index r = m.rows();
   while (r > 0) {
      const double nrm = (m.row(r - 1).transpose().cwiseProduct(weights.cast<cplx>())).norm();
      if (nrm > thresh) break;
      --r;
   }
   return r;
}

} // namespace

Correction::Correction(Mat u, Mat v) : U(std::move(u)), V(std::move(v))
{
   if (U.cols() != V.cols()) throw InvalidArgument("Correction: U and V must have equal column counts");
}

Correction Correction::from_entries(const std::vector<std::tuple<int, int, cplx>>& entries)
{
   int rmax = 0, cmax = 0;
   for (const auto& [i, j, v] : entries) {
      if (i < 1 || j < 1) throw InvalidArgument("Correction entries are 1-based");
      rmax = std::max(rmax, i);
      cmax = std::max(cmax, j);
   }
   Mat block = Mat::Zero(rmax, cmax);
   for (const auto& [i, j, v] : entries) block(i - 1, j - 1) += v;
   return from_dense(block, 0.0);
}

Correction Correction::from_dense(const Mat& block, double tol)
{
   if (block.size() == 0) return {};
   return compress(Correction(block, Mat::Identity(block.cols(), block.cols())), tol);
}

Mat Correction::dense(Eigen::Index rows, Eigen::Index cols) const
{
   Mat out = Mat::Zero(rows, cols);
   if (is_zero()) return out;
   const Eigen::Index r = std::min(rows, U.rows());
   const Eigen::Index c = std::min(cols, V.rows());
   if (r > 0 && c > 0) out.topLeftCorner(r, c) = U.topRows(r) * V.topRows(c).adjoint();
   return out;
}

Eigen::VectorXd singular_values(const Correction& e)
{
   if (e.is_zero()) return Eigen::VectorXd(0);
   const ThinQr qu = thin_qr(e.U);
   const ThinQr qv = thin_qr(e.V);
   const Mat core = qu.R * qv.R.adjoint();
   Eigen::BDCSVD<Mat> svd(core);
   return svd.singularValues();
}

double Correction::frobenius_norm() const
{
   return singular_values(*this).norm();
}

double Correction::norm(Norm p) const
{
   if (is_zero()) return 0.0;
   if (p == Norm::two) {
      const Eigen::VectorXd s = singular_values(*this);
      return s.size() ? s(0) : 0.0;
   }
   double best = 0.0;
   constexpr Eigen::Index chunk = 256;
   const Mat Vh = V.adjoint();
   for (Eigen::Index r0 = 0; r0 < U.rows(); r0 += chunk) {
      const Eigen::Index len = std::min(chunk, U.rows() - r0);
      const Mat rows = U.middleRows(r0, len) * Vh;
      best = std::max(best, rows.cwiseAbs().rowwise().sum().maxCoeff());
   }
   return best;
}

Correction operator+(const Correction& a, const Correction& b)
{
   if (a.is_zero()) return b;
   if (b.is_zero()) return a;
   const Eigen::Index ru = std::max(a.U.rows(), b.U.rows());
   const Eigen::Index rv = std::max(a.V.rows(), b.V.rows());
   Mat U(ru, a.rank() + b.rank());
   Mat V(rv, a.rank() + b.rank());
   U << pad_rows(a.U, ru), pad_rows(b.U, ru);
   V << pad_rows(a.V, rv), pad_rows(b.V, rv);
   return {std::move(U), std::move(V)};
}

Correction operator-(const Correction& a)
{
   return {-a.U, a.V};
}

Correction operator-(const Correction& a, const Correction& b)
{
   return a + (-b);
}

Correction operator*(cplx s, const Correction& a)
{
   if (s == cplx(0.0)) return {};
   return {s * a.U, a.V};
}

namespace {

Correction compress_impl(const Correction& e, double rel_tol, double abs_tol)
{
   if (e.is_zero()) return {};
   // Equal column norms in both factors make the cancellation floor below
   // independent of how each rank-one term is split between U and V.
   Mat Ub = e.U, Vb = e.V;
   for (Eigen::Index i = 0; i < Ub.cols(); ++i) {
      const double nu = Ub.col(i).norm(), nv = Vb.col(i).norm();
      if (nu > 0.0 && nv > 0.0) {
         const double t = std::sqrt(nv / nu);
         Ub.col(i) *= t;
         Vb.col(i) /= t;
      }
   }
   const ThinQr qu = thin_qr(Ub);
   const ThinQr qv = thin_qr(Vb);
   const Mat core = qu.R * qv.R.adjoint();
   Eigen::BDCSVD<Mat> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
   Eigen::VectorXd s = svd.singularValues();
   // Singular values at the roundoff level of the factors are exact cancellation.
   const double floor = 8.0 * std::numeric_limits<double>::epsilon() * qu.R.norm() * qv.R.norm();
   for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) <= floor) s(i) = 0.0;
   const double total = s.norm();
   if (total == 0.0) return {};

   // Shortest prefix whose discarded tail has Frobenius mass <= tol * total.
   Eigen::Index r = s.size();
   double tail2 = 0.0;
   const double budget = std::max(rel_tol * total, abs_tol);
   const double budget2 = budget * budget;
   while (r > 0) {
      const double next = tail2 + s(r - 1) * s(r - 1);
      if (s(r - 1) > 0.0 && next > budget2) break;
      tail2 = next;
      --r;
   }
   if (r == 0) return {};

   Mat U = qu.Q * (svd.matrixU().leftCols(r) * s.head(r).asDiagonal());
   Mat V = qv.Q * svd.matrixV().leftCols(r);

   // Row norms of E are the row norms of U; column norms are those of V scaled by s.
   const double thresh = 1e-15 * total;
   const Eigen::VectorXd ones = Eigen::VectorXd::Ones(r);
   const Eigen::Index ru = trimmed_rows(U, ones, thresh);
   const Eigen::Index rv = trimmed_rows(V, s.head(r), thresh);
   if (ru == 0 || rv == 0) return {};
   return {U.topRows(ru), V.topRows(rv)};
}

} // namespace

Correction compress(const Correction& e, double tol)
{
   return compress_impl(e, tol, 0.0);
}

Correction compress_absolute(const Correction& e, double abs_tol)
{
   return compress_impl(e, 0.0, abs_tol);
}

Correction hankel_correction(std::span<const cplx> f)
{
   Eigen::Index d = static_cast<Eigen::Index>(f.size());
   while (d > 0 && f[d - 1] == cplx(0.0)) --d;
   if (d == 0) return {};
   Mat H = Mat::Zero(d, d);
   for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; i + j < d; ++j) H(i, j) = f[i + j];
   Eigen::BDCSVD<Mat> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
   const Eigen::VectorXd s = svd.singularValues();
   const double cut = s(0) * static_cast<double>(d) * std::numeric_limits<double>::epsilon();
   Eigen::Index r = 0;
   while (r < s.size() && s(r) > cut) ++r;
   return {svd.matrixU().leftCols(r) * s.head(r).asDiagonal(), svd.matrixV().leftCols(r)};
}

Correction hankel_correction(const LaurentSymbol& a, HankelSide side)
{
   const std::vector<cplx> f = a.hankel_coefficients(side == HankelSide::positive ? 1 : -1);
   return hankel_correction(f);
}

namespace {

Mat hankel_block(std::span<const cplx> f, Eigen::Index rows, Eigen::Index cols)
{
   Mat H = Mat::Zero(rows, cols);
   const auto d = static_cast<Eigen::Index>(f.size());
   for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols && i + j < d; ++j) H(i, j) = f[i + j];
   return H;
}

} // namespace

Correction hankel_product(std::span<const cplx> f, std::span<const cplx> g, double tol)
{
   Eigen::Index df = static_cast<Eigen::Index>(f.size());
   Eigen::Index dg = static_cast<Eigen::Index>(g.size());
   while (df > 0 && f[df - 1] == cplx(0.0)) --df;
   while (dg > 0 && g[dg - 1] == cplx(0.0)) --dg;
   if (df == 0 || dg == 0) return {};
   f = f.first(df);
   g = g.first(dg);
   // H(f) has df nonzero rows/columns, H(g) has dg; the inner dimension is min(df, dg).
   const Eigen::Index m = std::min(df, dg);
   Correction out;
   if (df <= dg)
      out = Correction(hankel_block(f, df, m), hankel_block(g, m, dg).adjoint());
   else
      out = Correction(hankel_block(f, df, m) * hankel_block(g, m, dg), Mat::Identity(dg, dg));
   return compress(out, tol);
}

} // namespace qtmat
