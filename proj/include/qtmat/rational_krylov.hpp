#pragma once

#include <vector>

#include "qtmat/adi.hpp"
#include "qtmat/linear_operator.hpp"
#include "qtmat/poles.hpp"
#include "qtmat/solver_types.hpp"

namespace qtmat {

/// Orthonormal basis of a block rational Krylov space, stored at its natural
/// support (rows beyond W.rows() are zero).
struct RationalBasis {
   Mat W;
   std::vector<Pole> poles_used;
   Eigen::Index block_width = 0;
   Eigen::Index last_start = 0;   ///< first column of the most recent block
   Eigen::Index last_cols = 0;

   Eigen::Index size() const { return W.cols(); }
   Mat last_block() const { return W.middleCols(last_start, last_cols); }
};

/// Deflation threshold relative to the norm before orthogonalization.
inline constexpr double kDeflationTol = 1e-13;

/// Orthonormalization of the start block.
RationalBasis arnoldi_start(const Mat& U, double tol = kDeflationTol);

/// Adds w = A v (infinite pole) or w = (A - pole)^{-1} v for the last block v,
/// orthogonalized by two passes of modified Gram-Schmidt. Returns the number of
/// columns added; throws Breakdown when every new column deflates.
Eigen::Index arnoldi_extend(const LinearOperator& A, RationalBasis& basis, const Pole& pole,
                            double tol = kDeflationTol, double solve_tol = 1e-14);

/// A^* seen as an operator.
class AdjointOperator final : public LinearOperator {
public:
   explicit AdjointOperator(const LinearOperator& A) : A_(A) {}
   Mat apply(const Mat& v) const override { return A_.apply_adjoint(v); }
   Mat apply_adjoint(const Mat& v) const override { return A_.apply(v); }
   Mat solve_shifted(cplx s, const Mat& b, double tol) const override
   {
      return A_.solve_shifted_adjoint(std::conj(s), b, tol);
   }
   Mat solve_shifted_adjoint(cplx s, const Mat& b, double tol) const override
   {
      return A_.solve_shifted(std::conj(s), b, tol);
   }
   double norm_bound() const override { return A_.norm_bound(); }

private:
   const LinearOperator& A_;
};

/// Bartels-Stewart solve of Ap Y + Y Bp + Cp = 0 through complex Schur forms.
Mat dense_sylvester_small(const Mat& Ap, const Mat& Bp, const Mat& Cp);

/// (W Y) Z^*.
Correction lift_solution(const Mat& W, const Mat& Z, const Mat& Y);

/// Galerkin projection onto RK(A, U, {beta_j}) x RK(B^*, V, {-conj(alpha_j)}).
CorrectionSolution galerkin_factored(const LinearOperator& A, const LinearOperator& B, const Correction& C,
                                     const PoleSequence& poles, const SolveOptions& opts,
                                     const ResidualHooks& hooks = {});

} // namespace qtmat
