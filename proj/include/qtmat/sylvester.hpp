#pragma once

#include <optional>

#include "qtmat/adi.hpp"
#include "qtmat/poles.hpp"
#include "qtmat/qt_matrix.hpp"
#include "qtmat/rational_krylov.hpp"
#include "qtmat/solver_types.hpp"

namespace qtmat {

/// C^ = E_c + E_a T(x) + T(x) E_b - H(a_-) H(x_+) - H(x_-) H(b_+): the right-hand
/// side of A E + E B + C^ = 0 left after the Toeplitz part x is removed.
Correction correction_rhs(const QtMatrix& A, const QtMatrix& B, const QtMatrix& C, const LaurentSymbol& x,
                          double tol = kArithmeticTol);

/// A X + X B + C in QT arithmetic, without recompression.
QtMatrix sylvester_residual_qt(const QtMatrix& A, const QtMatrix& B, const QtMatrix& C, const QtMatrix& X);

/// norm_estimate(A X + X B + C, p).
double residual_norm(const QtMatrix& A, const QtMatrix& B, const QtMatrix& C, const QtMatrix& X,
                     Norm p = Norm::two);

/// Real interval enclosing the spectrum of a Hermitian QT matrix: the range of
/// the real symbol on the unit circle widened by ||E||_2. Empty when the symbol
/// is not real or the correction is not Hermitian.
struct Enclosure {
   double lo = 0.0;
   double hi = 0.0;
};
std::optional<Enclosure> hermitian_enclosure(const QtMatrix& A);

/// ADI on the correction equation A E + E B + C = 0 with QT operators.
/// Residuals are relative to reference_norm (||C|| when nonpositive).
CorrectionSolution adi_sylvester(const QtMatrix& A, const QtMatrix& B, const Correction& C,
                                 const PoleSequence& poles, const SolveOptions& opts, double reference_norm = 0.0);

/// Galerkin projection on the correction equation with QT operators.
CorrectionSolution galerkin_sylvester(const QtMatrix& A, const QtMatrix& B, const Correction& C,
                                      const PoleSequence& poles, const SolveOptions& opts,
                                      double reference_norm = 0.0);

/// Zolotarev shifts for SPD pairs, extended poles otherwise.
PoleSequence auto_poles(const QtMatrix& A, const QtMatrix& B, const SolveOptions& opts);

struct SylvesterSolution {
   QtMatrix X;
   SolveReport report;
};

/// A X + X B + C = 0 with X = T(x) + E: x from ev_interp, E from ADI or Galerkin.
/// The last history entry is the certified relative residual
/// residual_norm(A, B, C, X) / norm_estimate(C).
SylvesterSolution solve_sylvester(const QtMatrix& A, const QtMatrix& B, const QtMatrix& C, const SolveOptions& opts,
                                  const std::optional<PoleSequence>& poles = std::nullopt);

} // namespace qtmat
