#include "qtmat/linear_operator.hpp"

#include <Eigen/Dense>
#include <algorithm>

#include "qtmat/block_vector.hpp"
#include "qtmat/errors.hpp"

namespace qtmat {

namespace {

// Accuracy of the inner solve used by CayleyOperator::apply.
constexpr double kApplyTol = 1e-14;

} // namespace

QtOperator::QtOperator(QtMatrix A, Eigen::Index n_cap)
    : A_(std::move(A)), n_cap_(n_cap), norm_(norm_estimate(A_, Norm::two))
{
}

Mat QtOperator::apply(const Mat& v) const
{
   return matvec(A_, v);
}

Mat QtOperator::apply_adjoint(const Mat& v) const
{
   return matvec_adjoint(A_, v);
}

const SectionSolver& QtOperator::solver(cplx s, bool adjoint) const
{
   auto& list = adjoint ? adjoint_solvers_ : solvers_;
   for (const auto& [shift_value, solver] : list)
      if (shift_value == s) return *solver;
   const QtMatrix shifted = adjoint ? qtmat::adjoint(shift(A_, s)) : shift(A_, s);
   try {
      list.emplace_back(s, std::make_unique<SectionSolver>(shifted));
   } catch (const NotInvertible& e) {
      throw PoleInsideSpectrum(std::string("shift lies in the essential spectrum: ") + e.what());
   }
   return *list.back().second;
}

Mat QtOperator::solve_shifted(cplx s, const Mat& b, double tol) const
{
   return solver(s, false).solve(b, {.tol = tol, .n_cap = n_cap_});
}

Mat QtOperator::solve_shifted_adjoint(cplx s, const Mat& b, double tol) const
{
   return solver(s, true).solve(b, {.tol = tol, .n_cap = n_cap_});
}

DenseOperator::DenseOperator(Mat A) : A_(std::move(A))
{
   if (A_.rows() != A_.cols()) throw InvalidArgument("DenseOperator needs a square matrix");
   Eigen::JacobiSVD<Mat> svd(A_);
   norm_ = A_.size() ? svd.singularValues()(0) : 0.0;
}

Mat DenseOperator::apply(const Mat& v) const
{
   return A_ * pad_rows(v.topRows(std::min(v.rows(), A_.rows())), A_.rows());
}

Mat DenseOperator::apply_adjoint(const Mat& v) const
{
   return A_.adjoint() * pad_rows(v.topRows(std::min(v.rows(), A_.rows())), A_.rows());
}

namespace {

Mat dense_shifted_solve(const Mat& A, cplx s, const Mat& b)
{
   const Eigen::Index n = A.rows();
   Mat S = A;
   S.diagonal().array() -= s;
   Eigen::FullPivLU<Mat> lu(S);
   if (!lu.isInvertible()) throw PoleInsideSpectrum("shift is an eigenvalue of the dense operator");
   return lu.solve(pad_rows(b.topRows(std::min(b.rows(), n)), n));
}

} // namespace

Mat DenseOperator::solve_shifted(cplx s, const Mat& b, double /*tol*/) const
{
   return dense_shifted_solve(A_, s, b);
}

Mat DenseOperator::solve_shifted_adjoint(cplx s, const Mat& b, double /*tol*/) const
{
   return dense_shifted_solve(A_.adjoint(), std::conj(s), b);
}

Mat ScaledOperator::solve_shifted(cplx s, const Mat& b, double tol) const
{
   // (sigma A - s)^{-1} = sigma^{-1} (A - s / sigma)^{-1}
   return A_->solve_shifted(s / sigma_, b, tol) / sigma_;
}

Mat ScaledOperator::solve_shifted_adjoint(cplx s, const Mat& b, double tol) const
{
   return A_->solve_shifted_adjoint(s / sigma_, b, tol) / std::conj(sigma_);
}

Mat CayleyOperator::solve_combination(cplx c0, cplx c1, const Mat& b, double tol, bool adjoint) const
{
   if (c1 == cplx(0.0)) return b / (adjoint ? std::conj(c0) : c0);
   // c0 + c1 M = c1 (M + c0 / c1)
   const cplx s = -c0 / c1;
   if (adjoint) return M_->solve_shifted_adjoint(s, b, tol) / std::conj(c1);
   return M_->solve_shifted(s, b, tol) / c1;
}

Mat CayleyOperator::apply(const Mat& v) const
{
   const Mat w = solve_combination(1.0, -1.0, v, kApplyTol, false);
   return add_padded(w, M_->apply(w));
}

Mat CayleyOperator::apply_adjoint(const Mat& v) const
{
   const Mat w = add_padded(v, M_->apply_adjoint(v));
   return solve_combination(1.0, -1.0, w, kApplyTol, true);
}

Mat CayleyOperator::solve_shifted(cplx s, const Mat& b, double tol) const
{
   // (A - s)^{-1} = (I - M) ((1 - s) I + (1 + s) M)^{-1}
   const Mat w = solve_combination(1.0 - s, 1.0 + s, b, tol, false);
   return add_padded(w, -M_->apply(w));
}

Mat CayleyOperator::solve_shifted_adjoint(cplx s, const Mat& b, double tol) const
{
   // (A - s)^{-*} = ((1 - s) I + (1 + s) M)^{-*} (I - M^*)
   const Mat w = add_padded(b, -M_->apply_adjoint(b));
   return solve_combination(1.0 - s, 1.0 + s, w, tol, true);
}

double CayleyOperator::norm_bound() const
{
   const double m = M_->norm_bound();
   if (m >= 1.0) return std::numeric_limits<double>::infinity();
   return (1.0 + m) / (1.0 - m);
}

} // namespace qtmat
