#include "qtmat/qt_matrix.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "qtmat/errors.hpp"

namespace qtmat {

Mat toeplitz_times(const LaurentSymbol& a, const Mat& X)
{
   const Eigen::Index r = X.rows();
   const Eigen::Index R = r + a.lower_bandwidth();
   Mat out = Mat::Zero(R, X.cols());
   if (a.is_zero() || r == 0) return out;
   const auto coeffs = a.coefficients();
   for (int k = 0; k < a.size(); ++k) {
      const cplx c = coeffs[k];
      if (c == cplx(0.0)) continue;
      const Eigen::Index d = a.min_degree() + k;
      // out(i) += a_d X(i + d) for 0 <= i < R, 0 <= i + d < r.
      const Eigen::Index i0 = std::max<Eigen::Index>(0, -d);
      const Eigen::Index i1 = std::min<Eigen::Index>(R, r - d);
      if (i1 > i0) out.middleRows(i0, i1 - i0) += c * X.middleRows(i0 + d, i1 - i0);
   }
   return out;
}

Correction correction_times_toeplitz(const Correction& e, const LaurentSymbol& b)
{
   if (e.is_zero() || b.is_zero()) return {};
   return {e.U, toeplitz_times(b.adjoint(), e.V)};
}

Correction toeplitz_times_correction(const LaurentSymbol& a, const Correction& e)
{
   if (e.is_zero() || a.is_zero()) return {};
   return {toeplitz_times(a, e.U), e.V};
}

Correction correction_times_correction(const Correction& e, const Correction& f)
{
   if (e.is_zero() || f.is_zero()) return {};
   return {e.U * inner(e.V, f.U), f.V};
}

Correction toeplitz_product_correction(const LaurentSymbol& a, const LaurentSymbol& b, double tol)
{
   const std::vector<cplx> am = a.hankel_coefficients(-1);
   const std::vector<cplx> bp = b.hankel_coefficients(1);
   return -hankel_product(am, bp, tol);
}

QtMatrix add(const QtMatrix& A, const QtMatrix& B, double tol)
{
   return {A.symbol + B.symbol, compress(A.correction + B.correction, tol)};
}

QtMatrix subtract(const QtMatrix& A, const QtMatrix& B, double tol)
{
   return {A.symbol - B.symbol, compress(A.correction - B.correction, tol)};
}

QtMatrix multiply(const QtMatrix& A, const QtMatrix& B, double tol)
{
   const LaurentSymbol a = truncate(A.symbol, tol);
   const LaurentSymbol b = truncate(B.symbol, tol);
   Correction e = toeplitz_product_correction(a, b, tol);
   e = e + correction_times_toeplitz(A.correction, b);
   e = e + toeplitz_times_correction(a, B.correction);
   e = e + correction_times_correction(A.correction, B.correction);
   return {truncate(A.symbol * B.symbol, tol), compress(e, tol)};
}

QtMatrix scale(cplx s, const QtMatrix& A)
{
   return {s * A.symbol, s * A.correction};
}

QtMatrix shift(const QtMatrix& A, cplx gamma)
{
   return {A.symbol + (-gamma), A.correction};
}

QtMatrix adjoint(const QtMatrix& A)
{
   return {A.symbol.adjoint(), A.correction.adjoint()};
}

Mat matvec(const QtMatrix& A, const Mat& v)
{
   Mat y = toeplitz_times(A.symbol, v);
   if (!A.correction.is_zero()) y = add_padded(y, A.correction.U * inner(A.correction.V, v));
   return y;
}

Mat matvec_adjoint(const QtMatrix& A, const Mat& v)
{
   Mat y = toeplitz_times(A.symbol.adjoint(), v);
   if (!A.correction.is_zero()) y = add_padded(y, A.correction.V * inner(A.correction.U, v));
   return y;
}

Mat finite_section(const QtMatrix& A, Eigen::Index rows, Eigen::Index cols)
{
   Mat out = A.correction.dense(rows, cols);
   const auto coeffs = A.symbol.coefficients();
   for (int k = 0; k < A.symbol.size(); ++k) {
      const Eigen::Index d = A.symbol.min_degree() + k;
      for (Eigen::Index i = std::max<Eigen::Index>(0, -d); i < rows && i + d < cols; ++i)
         out(i, i + d) += coeffs[k];
   }
   return out;
}

Mat finite_section(const QtMatrix& A, Eigen::Index n)
{
   return finite_section(A, n, n);
}

double norm_estimate(const QtMatrix& A, Norm p)
{
   return wiener_norm(A.symbol) + A.correction.norm(p);
}

void check_toeplitz_invertible(const LaurentSymbol& a)
{
   if (a.is_zero()) throw NotInvertible("Toeplitz part is zero");
   if (min_modulus_on_circle(a) <= 1e-12 * wiener_norm(a))
      throw NotInvertible("symbol vanishes on the unit circle");
   const int w = winding_number(a);
   if (w != 0) throw NotInvertible("symbol has winding number " + std::to_string(w));
}

using SpMat = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

struct SectionSolver::Factorization {
   Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
};

SectionSolver::SectionSolver(QtMatrix A) : A_(std::move(A))
{
   check_toeplitz_invertible(A_.symbol);
   norm_bound_ = norm_estimate(A_, Norm::two);
}

SectionSolver::~SectionSolver() = default;
SectionSolver::SectionSolver(SectionSolver&&) noexcept = default;
SectionSolver& SectionSolver::operator=(SectionSolver&&) noexcept = default;

const SectionSolver::Factorization& SectionSolver::factorization(Eigen::Index n) const
{
   auto it = cache_.find(n);
   if (it != cache_.end()) return *it->second;

   std::vector<Eigen::Triplet<cplx, int>> trip;
   const auto coeffs = A_.symbol.coefficients();
   trip.reserve(static_cast<size_t>(n) * static_cast<size_t>(A_.symbol.size()));
   for (int k = 0; k < A_.symbol.size(); ++k) {
      if (coeffs[k] == cplx(0.0)) continue;
      const Eigen::Index d = A_.symbol.min_degree() + k;
      for (Eigen::Index i = std::max<Eigen::Index>(0, -d); i < n && i + d < n; ++i)
         trip.emplace_back(static_cast<int>(i), static_cast<int>(i + d), coeffs[k]);
   }
   const Correction& E = A_.correction;
   if (!E.is_zero()) {
      const Mat D = E.dense(std::min(n, E.row_support()), std::min(n, E.col_support()));
      for (Eigen::Index j = 0; j < D.cols(); ++j)
         for (Eigen::Index i = 0; i < D.rows(); ++i)
            if (D(i, j) != cplx(0.0)) trip.emplace_back(static_cast<int>(i), static_cast<int>(j), D(i, j));
   }
   SpMat S(n, n);
   S.setFromTriplets(trip.begin(), trip.end());
   S.makeCompressed();

   auto f = std::make_unique<Factorization>();
   f->lu.analyzePattern(S);
   f->lu.factorize(S);
   if (f->lu.info() != Eigen::Success)
      throw NotInvertible("finite section of size " + std::to_string(n) + " is singular");
   return *cache_.emplace(n, std::move(f)).first->second;
}

Mat SectionSolver::solve(const Mat& b, const SolveBlockOptions& opts) const
{
   const double bnorm = b.norm();
   if (bnorm == 0.0) return Mat::Zero(0, b.cols());

   const Eigen::Index support = std::max({b.rows(), A_.correction.row_support(), A_.correction.col_support()});
   Eigen::Index n = support + 2 * A_.symbol.bandwidth() + 32;
   // Reuse an already factored section that is large enough.
   for (const auto& [size, fac] : cache_) {
      if (size >= n) {
         n = size;
         break;
      }
   }
   const double target = opts.tol * bnorm;
   double previous = std::numeric_limits<double>::infinity();
   int stalls = 0;
   while (true) {
      if (n > opts.n_cap)
         throw NoConvergence("solve_block: finite section exceeded n_cap = " + std::to_string(opts.n_cap));
      const Mat x = factorization(n).lu.solve(pad_rows(b, n));
      const double res = add_padded(matvec(A_, x), -b).norm();
      if (res <= target) {
         // Drop trailing rows while the residual bound stays within tol.
         const double allowed = 0.5 * (target - res) / std::max(norm_bound_, 1e-300);
         Eigen::Index keep = x.rows();
         double tail2 = 0.0;
         while (keep > 0) {
            const double next = tail2 + x.row(keep - 1).squaredNorm();
            if (std::sqrt(next) > allowed) break;
            tail2 = next;
            --keep;
         }
         if (keep < x.rows()) {
            const Mat xt = x.topRows(keep);
            if (add_padded(matvec(A_, xt), -b).norm() <= target) return xt;
         }
         return x;
      }
      stalls = res > 0.5 * previous ? stalls + 1 : 0;
      if (stalls >= 4)
         throw NoConvergence("solve_block: finite-section residual stagnated at " + std::to_string(res / bnorm));
      previous = res;
      n *= 2;
   }
}

Mat solve_block(const QtMatrix& A, const Mat& b, const SolveBlockOptions& opts)
{
   return SectionSolver(A).solve(b, opts);
}

QtMatrix qt_inverse(const QtMatrix& A, double tol)
{
   check_toeplitz_invertible(A.symbol);
   const LaurentSymbol g = truncate(invert_symbol(A.symbol, {.tol = tol}).x, tol);
   // I - A T(g) = H(a_-) H(g_+) - E_a T(g) up to the symbol error 1 - a g.
   const Correction defect =
      compress(-toeplitz_product_correction(A.symbol, g, tol) - correction_times_toeplitz(A.correction, g), tol);
   if (defect.is_zero()) return {g, {}};
   const Mat W = solve_block(A, defect.U, {.tol = tol});
   return {g, compress(Correction(W, defect.V), tol)};
}

} // namespace qtmat
