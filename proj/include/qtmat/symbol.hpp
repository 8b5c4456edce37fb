#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "qtmat/types.hpp"

namespace qtmat {

/// Finitely supported Laurent series a(z) = sum_j a_j z^j.
///
/// Coefficients are stored for degrees min_degree() ... max_degree(). The
/// stored range is kept canonical: the first and last stored coefficients are
/// nonzero, and the zero symbol stores nothing.
class LaurentSymbol {
public:
   LaurentSymbol() = default;
   LaurentSymbol(int min_degree, std::vector<cplx> coefficients);

   static LaurentSymbol constant(cplx value);
   static LaurentSymbol monomial(int degree, cplx value = 1.0);

   bool is_zero() const { return coeffs_.empty(); }
   int min_degree() const { return min_degree_; }
   int max_degree() const { return min_degree_ + static_cast<int>(coeffs_.size()) - 1; }
   int size() const { return static_cast<int>(coeffs_.size()); }
   std::span<const cplx> coefficients() const { return coeffs_; }

   /// Coefficient of z^degree (zero outside the stored range).
   cplx operator[](int degree) const;

   /// Number of strictly negative / strictly positive degrees carried.
   int lower_bandwidth() const { return is_zero() ? 0 : std::max(0, -min_degree_); }
   int upper_bandwidth() const { return is_zero() ? 0 : std::max(0, max_degree()); }
   int bandwidth() const { return std::max(lower_bandwidth(), upper_bandwidth()); }

   cplx evaluate(cplx z) const;

   /// Symbol of T(a)^*: coefficients conj(a_{-j}).
   LaurentSymbol adjoint() const;

   /// Coefficients of degree >= 1 (sign = +1) or <= -1 (sign = -1), returned as
   /// the Taylor coefficients f_1, f_2, ... used by a Hankel block.
   std::vector<cplx> hankel_coefficients(int sign) const;

   bool real_symmetric(double tol = 0.0) const;

private:
   void canonicalize();

   int min_degree_ = 0;
   std::vector<cplx> coeffs_;
};

LaurentSymbol operator+(const LaurentSymbol& a, const LaurentSymbol& b);
LaurentSymbol operator-(const LaurentSymbol& a, const LaurentSymbol& b);
LaurentSymbol operator-(const LaurentSymbol& a);
LaurentSymbol operator*(const LaurentSymbol& a, const LaurentSymbol& b);
LaurentSymbol operator*(cplx s, const LaurentSymbol& a);
LaurentSymbol operator+(const LaurentSymbol& a, cplx s);

/// Sum of coefficient moduli.
double wiener_norm(const LaurentSymbol& a);

struct TruncationResult {
   double norm = 0.0;
   LaurentSymbol truncated;
};

/// Drops whole degree levels +-L from the outside while the removed mass
/// stays within tol * norm / 2, so ||a - truncated||_W <= tol ||a||_W.
TruncationResult wiener_norm_and_truncate(const LaurentSymbol& a, double tol);

inline LaurentSymbol truncate(const LaurentSymbol& a, double tol)
{
   return wiener_norm_and_truncate(a, tol).truncated;
}

/// Values of a function at the n-th roots of unity xi_n^j = exp(2 pi i j / n).
struct UnitCircleSamples {
   int n = 0;
   std::vector<cplx> values;
};

/// a(xi_n^j), j = 0..n-1, by one length-n FFT of the wrapped coefficients.
UnitCircleSamples sym_eval_roots(const LaurentSymbol& a, int n);

/// Winding number of a(z) around 0 along the unit circle, from n samples.
int winding_number(const LaurentSymbol& a, int n = 1024);

/// min_j |a(xi_n^j)| over n samples.
double min_modulus_on_circle(const LaurentSymbol& a, int n = 1024);

struct EvInterpOptions {
   double tol = 1e-12;
   int n_max = 1 << 20;
};

struct EvInterpResult {
   LaurentSymbol x;
   int n = 0;                     ///< final degree bound, x has degrees -n..n
   double fresh_residual = 0.0;   ///< max |a x + x b + c| on 4n fresh samples
};

/// Symbol x(z) = -c(z) / (a(z) + b(z)) by evaluation-interpolation on roots
/// of unity, doubling n until the outer-half tail mass is below tol ||x||_W.
EvInterpResult ev_interp(const LaurentSymbol& a, const LaurentSymbol& b, const LaurentSymbol& c,
                         const EvInterpOptions& opts = {});

/// 1 / a(z) by the same scheme.
EvInterpResult invert_symbol(const LaurentSymbol& a, const EvInterpOptions& opts = {});

} // namespace qtmat
