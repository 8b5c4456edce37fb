#include "qtmat/symbol.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "qtmat/errors.hpp"

namespace qtmat {

namespace {

int positive_mod(int d, int n)
{
   int r = d % n;
   return r < 0 ? r + n : r;
}

int next_pow2(int n)
{
   int p = 1;
   while (p < n) p <<= 1;
   return p;
}

// a(xi_n^j * e^{i phase}) for j = 0..n-1.
std::vector<cplx> eval_rotated(const LaurentSymbol& a, int n, double phase)
{
   std::vector<cplx> wrapped(n, cplx(0.0));
   const auto coeffs = a.coefficients();
   for (int k = 0; k < a.size(); ++k) {
      const int d = a.min_degree() + k;
      cplx c = coeffs[k];
      if (phase != 0.0) c *= std::polar(1.0, phase * d);
      wrapped[positive_mod(d, n)] += c;
   }
   std::vector<cplx> values(n);
   Eigen::FFT<double> fft;
   fft.SetFlag(Eigen::FFT<double>::Unscaled);
   fft.inv(values, wrapped);
   return values;
}

} // namespace

LaurentSymbol::LaurentSymbol(int min_degree, std::vector<cplx> coefficients)
   : min_degree_(min_degree), coeffs_(std::move(coefficients))
{
   canonicalize();
}

LaurentSymbol LaurentSymbol::constant(cplx value)
{
   return LaurentSymbol(0, {value});
}

LaurentSymbol LaurentSymbol::monomial(int degree, cplx value)
{
   return LaurentSymbol(degree, {value});
}

void LaurentSymbol::canonicalize()
{
   std::size_t first = 0;
   while (first < coeffs_.size() && coeffs_[first] == cplx(0.0)) ++first;
   if (first == coeffs_.size()) {
      coeffs_.clear();
      min_degree_ = 0;
      return;
   }
   std::size_t last = coeffs_.size();
   while (coeffs_[last - 1] == cplx(0.0)) --last;
   if (first > 0 || last < coeffs_.size()) {
      coeffs_ = std::vector<cplx>(coeffs_.begin() + first, coeffs_.begin() + last);
      min_degree_ += static_cast<int>(first);
   }
}

cplx LaurentSymbol::operator[](int degree) const
{
   const int k = degree - min_degree_;
   if (k < 0 || k >= size()) return 0.0;
   return coeffs_[k];
}

cplx LaurentSymbol::evaluate(cplx z) const
{
   if (is_zero()) return 0.0;
   cplx acc = 0.0;
   for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
   return acc * std::pow(z, min_degree_);
}

LaurentSymbol LaurentSymbol::adjoint() const
{
   std::vector<cplx> c(coeffs_.rbegin(), coeffs_.rend());
   for (auto& v : c) v = std::conj(v);
   return LaurentSymbol(-max_degree(), std::move(c));
}

std::vector<cplx> LaurentSymbol::hankel_coefficients(int sign) const
{
   std::vector<cplx> f;
   if (is_zero()) return f;
   const int reach = sign > 0 ? max_degree() : -min_degree_;
   for (int j = 1; j <= reach; ++j) f.push_back((*this)[sign > 0 ? j : -j]);
   while (!f.empty() && f.back() == cplx(0.0)) f.pop_back();
   return f;
}

bool LaurentSymbol::real_symmetric(double tol) const
{
   const double scale = tol * wiener_norm(*this);
   for (int d = min_degree_; d <= max_degree(); ++d) {
      if (std::abs((*this)[d] - std::conj((*this)[-d])) > scale) return false;
   }
   return true;
}

LaurentSymbol operator+(const LaurentSymbol& a, const LaurentSymbol& b)
{
   if (a.is_zero()) return b;
   if (b.is_zero()) return a;
   const int lo = std::min(a.min_degree(), b.min_degree());
   const int hi = std::max(a.max_degree(), b.max_degree());
   std::vector<cplx> c(hi - lo + 1);
   for (int d = lo; d <= hi; ++d) c[d - lo] = a[d] + b[d];
   return LaurentSymbol(lo, std::move(c));
}

LaurentSymbol operator-(const LaurentSymbol& a)
{
   return cplx(-1.0) * a;
}

LaurentSymbol operator-(const LaurentSymbol& a, const LaurentSymbol& b)
{
   return a + (-b);
}

LaurentSymbol operator*(const LaurentSymbol& a, const LaurentSymbol& b)
{
   if (a.is_zero() || b.is_zero()) return {};
   const auto ca = a.coefficients();
   const auto cb = b.coefficients();
   std::vector<cplx> c(ca.size() + cb.size() - 1, cplx(0.0));
   for (std::size_t i = 0; i < ca.size(); ++i) {
      if (ca[i] == cplx(0.0)) continue;
      for (std::size_t j = 0; j < cb.size(); ++j) c[i + j] += ca[i] * cb[j];
   }
   return LaurentSymbol(a.min_degree() + b.min_degree(), std::move(c));
}

LaurentSymbol operator*(cplx s, const LaurentSymbol& a)
{
   std::vector<cplx> c(a.coefficients().begin(), a.coefficients().end());
   for (auto& v : c) v *= s;
   return LaurentSymbol(a.min_degree(), std::move(c));
}

LaurentSymbol operator+(const LaurentSymbol& a, cplx s)
{
   return a + LaurentSymbol::constant(s);
}

double wiener_norm(const LaurentSymbol& a)
{
   double s = 0.0;
   for (const auto& c : a.coefficients()) s += std::abs(c);
   return s;
}

TruncationResult wiener_norm_and_truncate(const LaurentSymbol& a, double tol)
{
   TruncationResult out;
   out.norm = wiener_norm(a);
   if (a.is_zero() || tol <= 0.0) {
      out.truncated = a;
      return out;
   }
   const double budget = 0.5 * tol * out.norm;
   int level = std::max(-a.min_degree(), a.max_degree());
   double dropped = 0.0;
   while (level >= 0) {
      const double mass = level == 0 ? std::abs(a[0]) : std::abs(a[level]) + std::abs(a[-level]);
      if (dropped + mass > budget) break;
      dropped += mass;
      --level;
   }
   if (level < 0) return out;   // everything fits in the budget (tol >= 2)
   const int lo = std::max(a.min_degree(), -level);
   const int hi = std::min(a.max_degree(), level);
   std::vector<cplx> c;
   for (int d = lo; d <= hi; ++d) c.push_back(a[d]);
   out.truncated = LaurentSymbol(lo, std::move(c));
   return out;
}

UnitCircleSamples sym_eval_roots(const LaurentSymbol& a, int n)
{
   if (n < 1) throw InvalidArgument("sym_eval_roots: n must be positive");
   return {n, eval_rotated(a, n, 0.0)};
}

int winding_number(const LaurentSymbol& a, int n)
{
   n = std::max(n, 8 * a.size());
   const auto v = sym_eval_roots(a, n).values;
   double total = 0.0;
   for (int j = 0; j < n; ++j) total += std::arg(v[(j + 1) % n] / v[j]);
   return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

double min_modulus_on_circle(const LaurentSymbol& a, int n)
{
   n = std::max(n, 8 * a.size());
   const auto v = sym_eval_roots(a, n).values;
   double m = std::numeric_limits<double>::infinity();
   for (const auto& z : v) m = std::min(m, std::abs(z));
   return m;
}

EvInterpResult ev_interp(const LaurentSymbol& a, const LaurentSymbol& b, const LaurentSymbol& c,
                         const EvInterpOptions& opts)
{
   const double scale = wiener_norm(a) + wiener_norm(b);
   const double singular_threshold = 1e-12 * scale;
   Eigen::FFT<double> fft;

   for (int n = 4; n <= opts.n_max; n *= 2) {
      const int len = next_pow2(2 * n + 1);
      const auto sa = eval_rotated(a, len, 0.0);
      const auto sb = eval_rotated(b, len, 0.0);
      const auto sc = eval_rotated(c, len, 0.0);

      std::vector<cplx> v(len);
      double min_den = std::numeric_limits<double>::infinity();
      for (int j = 0; j < len; ++j) {
         const cplx den = sa[j] + sb[j];
         min_den = std::min(min_den, std::abs(den));
         v[j] = -sc[j] / den;
      }
      if (!(min_den > singular_threshold)) {
         throw SymbolSingular("ev_interp: a(z) + b(z) vanishes on the unit circle (min |a+b| = " +
                              std::to_string(min_den) + ")");
      }

      std::vector<cplx> xhat(len);
      fft.fwd(xhat, v);
      std::vector<cplx> coeffs(2 * n + 1);
      for (int d = -n; d <= n; ++d) coeffs[d + n] = xhat[positive_mod(d, len)] / double(len);

      const int half = (n + 1) / 2;
      double tail = 0.0, total = 0.0;
      for (int d = -n; d <= n; ++d) {
         const double m = std::abs(coeffs[d + n]);
         total += m;
         if (std::abs(d) > half) tail += m;
      }
      if (total == 0.0 || tail < opts.tol * total) {
         EvInterpResult out;
         out.x = LaurentSymbol(-n, std::move(coeffs));
         out.n = n;
         const int fresh = 4 * n;
         const double phase = std::numbers::pi / fresh;
         const auto fa = eval_rotated(a, fresh, phase);
         const auto fb = eval_rotated(b, fresh, phase);
         const auto fc = eval_rotated(c, fresh, phase);
         const auto fx = eval_rotated(out.x, fresh, phase);
         for (int j = 0; j < fresh; ++j) {
            out.fresh_residual = std::max(out.fresh_residual, std::abs((fa[j] + fb[j]) * fx[j] + fc[j]));
         }
         return out;
      }
   }
   throw NoConvergence("ev_interp: tail criterion not met with n <= " + std::to_string(opts.n_max));
}

EvInterpResult invert_symbol(const LaurentSymbol& a, const EvInterpOptions& opts)
{
   return ev_interp(a, LaurentSymbol{}, LaurentSymbol::constant(-1.0), opts);
}

} // namespace qtmat
