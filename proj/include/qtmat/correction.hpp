#pragma once

#include <span>
#include <tuple>
#include <vector>

#include "qtmat/symbol.hpp"
#include "qtmat/types.hpp"

namespace qtmat {

enum class Norm { two, inf };

/// Compact correction E = U V^* embedded in the top-left corner of a
/// semi-infinite matrix; E has U.rows() nonzero rows and V.rows() nonzero columns.
struct Correction {
   Mat U = Mat(0, 0);
   Mat V = Mat(0, 0);

   Correction() = default;
   Correction(Mat u, Mat v);

   /// Sum of unit-rank entries (1-based row, 1-based column, value).
   static Correction from_entries(const std::vector<std::tuple<int, int, cplx>>& entries);
   /// Factored (exactly) from a dense corner block, then compressed at tol.
   static Correction from_dense(const Mat& block, double tol = 0.0);

   Eigen::Index rank() const { return U.cols(); }
   Eigen::Index row_support() const { return U.rows(); }
   Eigen::Index col_support() const { return V.rows(); }
   bool is_zero() const { return rank() == 0 || U.rows() == 0 || V.rows() == 0; }

   Correction adjoint() const { return {V, U}; }
   /// Leading rows x cols block of E.
   Mat dense(Eigen::Index rows, Eigen::Index cols) const;
   Mat dense() const { return dense(row_support(), col_support()); }

   double frobenius_norm() const;
   double norm(Norm p) const;
};

Correction operator+(const Correction& a, const Correction& b);
Correction operator-(const Correction& a);
Correction operator-(const Correction& a, const Correction& b);
Correction operator*(cplx s, const Correction& a);

/// Singular values of U V^*, descending.
Eigen::VectorXd singular_values(const Correction& e);

/// Thin QR of both factors plus an SVD of the small core; keeps the shortest
/// prefix of singular values whose discarded tail has Frobenius mass
/// <= tol ||E||_F. Trailing rows/columns with norm <= 1e-15 ||E||_F are trimmed.
Correction compress(const Correction& e, double tol);

/// Same with an absolute Frobenius budget: ||E - compress(E)||_F <= abs_tol.
Correction compress_absolute(const Correction& e, double abs_tol);

/// Hankel block [f_{i+j-1}] from the Taylor coefficients f_1..f_d (f[0] = f_1),
/// factored by a rank-revealing SVD at machine precision.
Correction hankel_correction(std::span<const cplx> f);

enum class HankelSide { positive, negative };

/// H(a_+) (degrees >= 1) or H(a_-) (degrees <= -1) of a symbol.
Correction hankel_correction(const LaurentSymbol& a, HankelSide side);

/// H(f) H(g) in factored form without forming either Hankel block's SVD.
Correction hankel_product(std::span<const cplx> f, std::span<const cplx> g, double tol);

} // namespace qtmat
