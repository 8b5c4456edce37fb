#pragma once

#include <string>

#include "qtmat/linear_operator.hpp"
#include "qtmat/qt_matrix.hpp"
#include "qtmat/solver_types.hpp"

namespace qtmat {

/// M X N + X + C = 0, with M and N already scaled by lambda and 1 / lambda.
struct SteinProblem {
   QtMatrix M;
   QtMatrix N;
   QtMatrix C;
   double lambda = 1.0;
};

/// Scales M and N to equal norm estimates, lambda = sqrt(||N|| / ||M||);
/// the solution is unchanged since (lambda M) X (N / lambda) = M X N.
SteinProblem make_stein_problem(const QtMatrix& M, const QtMatrix& N, const QtMatrix& C, bool balance = true,
                                Norm p = Norm::two);

struct SteinSolution {
   QtMatrix X;
   SolveReport report;
};

/// M X N + X + C in QT arithmetic.
QtMatrix stein_residual_qt(const QtMatrix& M, const QtMatrix& N, const QtMatrix& C, const QtMatrix& X);

/// ||M E N + E + C||_p for factored E and C: [M E_U, E_U, C_U] [N^* E_V, E_V, C_V]^*.
double stein_residual(const LinearOperator& M, const LinearOperator& N, const Correction& C, const Correction& E,
                      Norm p);

/// X_{k+1} = -C - M X_k N from X_0 = 0, compressed each step. The residual of
/// X_k is X_k - X_{k+1}. Throws NotContractive when ||M|| ||N|| >= 1 and
/// MaxIter when opts.max_iter iterations do not reach opts.tol.
SteinSolution stein_fixed_point(const SteinProblem& P, const SolveOptions& opts);

/// ADI with the constant pair (1, -1) on the Cayley-transformed equation, at most
/// opts.max_iter steps.
SteinSolution stein_adi(const SteinProblem& P, const SolveOptions& opts);

/// Galerkin projection of the Cayley-transformed equation with poles (1, -1).
SteinSolution stein_galerkin(const SteinProblem& P, const SolveOptions& opts);

struct CayleyRemap {
   QtMatrix A;
   QtMatrix B;
   QtMatrix C;
};

/// A = (M + I)(I - M)^{-1}, B = (N + I)^{-1}(I - N), C~ = 2 (I - M)^{-1} C (I + N)^{-1}.
/// Throws NotInvertible when I - M or I + N has a singular Toeplitz part.
CayleyRemap cayley_remap(const SteinProblem& P, double tol = 1e-13);

/// Dispatch on "fixedpoint", "adi" or "galerkin"; every method certifies
/// ||M X N + X + C|| <= opts.tol ||C|| in its final history entry.
SteinSolution solve_stein(const QtMatrix& M, const QtMatrix& N, const QtMatrix& C, const std::string& method,
                          const SolveOptions& opts, bool balance = true);

} // namespace qtmat
