#pragma once

#include <map>
#include <memory>
#include <vector>

#include "qtmat/qt_matrix.hpp"
#include "qtmat/types.hpp"

namespace qtmat {

/// Operator acting on blocks of (possibly semi-infinite) vectors with finite support.
class LinearOperator {
public:
   virtual ~LinearOperator() = default;

   virtual Mat apply(const Mat& v) const = 0;
   virtual Mat apply_adjoint(const Mat& v) const = 0;
   /// (A - s I)^{-1} b with relative residual <= tol.
   virtual Mat solve_shifted(cplx s, const Mat& b, double tol) const = 0;
   /// (A - s I)^{-*} b.
   virtual Mat solve_shifted_adjoint(cplx s, const Mat& b, double tol) const = 0;
   /// Upper bound for the 2-norm.
   virtual double norm_bound() const = 0;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

/// QT matrix acting on finite-support blocks; shifted solves go through cached
/// adaptive finite sections.
class QtOperator final : public LinearOperator {
public:
   explicit QtOperator(QtMatrix A, Eigen::Index n_cap = Eigen::Index(1) << 18);

   const QtMatrix& matrix() const { return A_; }

   Mat apply(const Mat& v) const override;
   Mat apply_adjoint(const Mat& v) const override;
   Mat solve_shifted(cplx s, const Mat& b, double tol) const override;
   Mat solve_shifted_adjoint(cplx s, const Mat& b, double tol) const override;
   double norm_bound() const override { return norm_; }

private:
   const SectionSolver& solver(cplx s, bool adjoint) const;

   QtMatrix A_;
   Eigen::Index n_cap_;
   double norm_ = 0.0;
   mutable std::vector<std::pair<cplx, std::unique_ptr<SectionSolver>>> solvers_;
   mutable std::vector<std::pair<cplx, std::unique_ptr<SectionSolver>>> adjoint_solvers_;
};

/// Dense n x n matrix; vectors are padded or cut to n rows.
class DenseOperator final : public LinearOperator {
public:
   explicit DenseOperator(Mat A);

   const Mat& matrix() const { return A_; }

   Mat apply(const Mat& v) const override;
   Mat apply_adjoint(const Mat& v) const override;
   Mat solve_shifted(cplx s, const Mat& b, double tol) const override;
   Mat solve_shifted_adjoint(cplx s, const Mat& b, double tol) const override;
   double norm_bound() const override { return norm_; }

private:
   Mat A_;
   double norm_ = 0.0;
};

/// sigma * A.
class ScaledOperator final : public LinearOperator {
public:
   ScaledOperator(OperatorPtr A, cplx sigma) : A_(std::move(A)), sigma_(sigma) {}

   Mat apply(const Mat& v) const override { return sigma_ * A_->apply(v); }
   Mat apply_adjoint(const Mat& v) const override { return std::conj(sigma_) * A_->apply_adjoint(v); }
   Mat solve_shifted(cplx s, const Mat& b, double tol) const override;
   Mat solve_shifted_adjoint(cplx s, const Mat& b, double tol) const override;
   double norm_bound() const override { return std::abs(sigma_) * A_->norm_bound(); }

private:
   OperatorPtr A_;
   cplx sigma_;
};

/// Cayley transform (I + M)(I - M)^{-1} of an operator M with ||M|| < 1.
/// The Stein equation M X N + X + C = 0 becomes A X + X B + C~ = 0 with
/// A = Cayley(M), B = Cayley(-N).
class CayleyOperator final : public LinearOperator {
public:
   explicit CayleyOperator(OperatorPtr M) : M_(std::move(M)) {}

   Mat apply(const Mat& v) const override;
   Mat apply_adjoint(const Mat& v) const override;
   Mat solve_shifted(cplx s, const Mat& b, double tol) const override;
   Mat solve_shifted_adjoint(cplx s, const Mat& b, double tol) const override;
   /// (1 + ||M||) / (1 - ||M||).
   double norm_bound() const override;

private:
   // (c0 I + c1 M)^{-1} b and its adjoint.
   Mat solve_combination(cplx c0, cplx c1, const Mat& b, double tol, bool adjoint) const;

   OperatorPtr M_;
};

} // namespace qtmat
