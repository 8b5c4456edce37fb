#pragma once

#include "qtmat/linear_operator.hpp"
#include "qtmat/poles.hpp"
#include "qtmat/solver_types.hpp"

namespace qtmat {

struct CorrectionSolution {
   Correction X;
   SolveReport report;
};

/// ||A X + X B + C||_p for factored X and C, evaluated exactly as
/// [A X_U, X_U, C_U] [X_V, B^* X_V, C_V]^*.
double sylvester_residual(const LinearOperator& A, const LinearOperator& B, const Correction& C,
                          const Correction& X, Norm p);

/// Factored ADI for A X + X B + C = 0 with C = U V^*. Step j uses the pair
/// (alpha_j, beta_j), cycling through the sequence:
///   V_j = (A - beta_j)^{-1} R_{j-1},  W_j = -(B + alpha_j)^{-*} L_{j-1},
///   X  += (beta_j - alpha_j) V_j W_j^*,
/// with R_0 = -U, L_0 = V; the residual of the iterate is R_j L_j^*.
CorrectionSolution adi_factored(const LinearOperator& A, const LinearOperator& B, const Correction& C,
                                const PoleSequence& poles, const SolveOptions& opts, const ResidualHooks& hooks = {});

} // namespace qtmat
