#pragma once

#include <map>
#include <memory>

#include "qtmat/block_vector.hpp"
#include "qtmat/correction.hpp"
#include "qtmat/symbol.hpp"

namespace qtmat {

/// Default relative tolerance used to recompress the results of QT arithmetic.
inline constexpr double kArithmeticTol = 1e-15;

/// Semi-infinite quasi-Toeplitz matrix T(a) + E with T(a) = [a_{j-i}].
struct QtMatrix {
   LaurentSymbol symbol;
   Correction correction;

   QtMatrix() = default;
   QtMatrix(LaurentSymbol a, Correction e = {}) : symbol(std::move(a)), correction(std::move(e)) {}

   static QtMatrix identity() { return QtMatrix(LaurentSymbol::constant(1.0)); }
   bool is_zero() const { return symbol.is_zero() && correction.is_zero(); }
};

/// T(a) X for a block X with implicit zero tail; output has
/// X.rows() + lower_bandwidth(a) rows.
Mat toeplitz_times(const LaurentSymbol& a, const Mat& X);

/// Factored E_a T(b), T(a) E_b and the Hankel cross term.
Correction correction_times_toeplitz(const Correction& e, const LaurentSymbol& b);
Correction toeplitz_times_correction(const LaurentSymbol& a, const Correction& e);
Correction correction_times_correction(const Correction& e, const Correction& f);

/// Correction part of T(a) T(b): T(a)T(b) = T(ab) - H(a_-) H(b_+), with
/// H(a_-) = [a_{-(i+j-1)}] and H(b_+) = [b_{i+j-1}].
Correction toeplitz_product_correction(const LaurentSymbol& a, const LaurentSymbol& b, double tol);

QtMatrix add(const QtMatrix& A, const QtMatrix& B, double tol = kArithmeticTol);
QtMatrix subtract(const QtMatrix& A, const QtMatrix& B, double tol = kArithmeticTol);
QtMatrix multiply(const QtMatrix& A, const QtMatrix& B, double tol = kArithmeticTol);
QtMatrix scale(cplx s, const QtMatrix& A);
/// A - gamma I.
QtMatrix shift(const QtMatrix& A, cplx gamma);
QtMatrix adjoint(const QtMatrix& A);
/// A v for a block of semi-infinite vectors; support grows by lower_bandwidth(a).
Mat matvec(const QtMatrix& A, const Mat& v);
/// A^* v.
Mat matvec_adjoint(const QtMatrix& A, const Mat& v);

inline QtMatrix operator+(const QtMatrix& A, const QtMatrix& B) { return add(A, B); }
inline QtMatrix operator-(const QtMatrix& A, const QtMatrix& B) { return subtract(A, B); }
inline QtMatrix operator*(const QtMatrix& A, const QtMatrix& B) { return multiply(A, B); }
inline QtMatrix operator*(cplx s, const QtMatrix& A) { return scale(s, A); }

/// Leading n x n block, entry (i,j) = a_{j-i} + E_ij.
Mat finite_section(const QtMatrix& A, Eigen::Index n);
Mat finite_section(const QtMatrix& A, Eigen::Index rows, Eigen::Index cols);

/// ||a||_W + ||E||_p, an upper bound for ||A||_p.
double norm_estimate(const QtMatrix& A, Norm p);

/// Throws NotInvertible unless the symbol is bounded away from 0 on the circle
/// and has winding number zero.
void check_toeplitz_invertible(const LaurentSymbol& a);

struct SolveBlockOptions {
   double tol = 1e-12;
   Eigen::Index n_cap = Eigen::Index(1) << 18;
};

/// Adaptive finite-section solver for A x = b with exact residual certification.
/// Factorizations are cached per section size, so repeated solves with the same
/// matrix are cheap.
class SectionSolver {
public:
   explicit SectionSolver(QtMatrix A);
   ~SectionSolver();
   SectionSolver(SectionSolver&&) noexcept;
   SectionSolver& operator=(SectionSolver&&) noexcept;

   const QtMatrix& matrix() const { return A_; }

   /// x with ||A x - b||_F <= tol ||b||_F, verified by an exact residual evaluation.
   Mat solve(const Mat& b, const SolveBlockOptions& opts = {}) const;

private:
   struct Factorization;
   const Factorization& factorization(Eigen::Index n) const;

   QtMatrix A_;
   double norm_bound_ = 0.0;
   mutable std::map<Eigen::Index, std::unique_ptr<Factorization>> cache_;
};

Mat solve_block(const QtMatrix& A, const Mat& b, const SolveBlockOptions& opts = {});

/// A^{-1} = T(1/a) + E, the correction obtained by solve_block on the
/// compact defect I - A T(1/a).
QtMatrix qt_inverse(const QtMatrix& A, double tol = 1e-13);

} // namespace qtmat
