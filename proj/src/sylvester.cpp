#include "qtmat/sylvester.hpp"

#include <algorithm>
#include <cmath>

#include "qtmat/errors.hpp"

namespace qtmat {

Correction correction_rhs(const QtMatrix& A, const QtMatrix& B, const QtMatrix& C, const LaurentSymbol& x,
                          double tol)
{
   Correction e = C.correction;
   e = e + correction_times_toeplitz(A.correction, x);
   e = e + toeplitz_times_correction(x, B.correction);
   e = e + toeplitz_product_correction(A.symbol, x, 0.0);
   e = e + toeplitz_product_correction(x, B.symbol, 0.0);
   return compress(e, tol);
}

QtMatrix sylvester_residual_qt(const QtMatrix& A, const QtMatrix& B, const QtMatrix& C, const QtMatrix& X)
{
   const LaurentSymbol r = A.symbol * X.symbol + X.symbol * B.symbol + C.symbol;
   Correction e = C.correction;
   e = e + toeplitz_product_correction(A.symbol, X.symbol, 0.0);
   e = e + correction_times_toeplitz(A.correction, X.symbol);
   e = e + toeplitz_times_correction(A.symbol, X.correction);
   e = e + correction_times_correction(A.correction, X.correction);
   e = e + toeplitz_product_correction(X.symbol, B.symbol, 0.0);
   e = e + correction_times_toeplitz(X.correction, B.symbol);
   e = e + toeplitz_times_correction(X.symbol, B.correction);
   e = e + correction_times_correction(X.correction, B.correction);
   return {r, e};
}

double residual_norm(const QtMatrix& A, const QtMatrix& B, const QtMatrix& C, const QtMatrix& X, Norm p)
{
   return norm_estimate(sylvester_residual_qt(A, B, C, X), p);
}

std::optional<Enclosure> hermitian_enclosure(const QtMatrix& A)
{
   const LaurentSymbol& a = A.symbol;
   const double scale = std::max(wiener_norm(a), 1e-300);
   if (wiener_norm(a - a.adjoint()) > 1e-14 * scale) return std::nullopt;
   const Correction& E = A.correction;
   double enorm = 0.0;
   if (!E.is_zero()) {
      enorm = E.norm(Norm::two);
      const Eigen::Index n = std::max(E.row_support(), E.col_support());
      const Mat D = E.dense(n, n);
      if ((D - D.adjoint()).norm() > 1e-14 * std::max(D.norm(), 1e-300)) return std::nullopt;
   }
   const auto s = sym_eval_roots(a, std::max(1024, 8 * a.size()));
   double lo = s.values[0].real(), hi = lo;
   for (const auto& v : s.values) {
      lo = std::min(lo, v.real());
      hi = std::max(hi, v.real());
   }
   return Enclosure{lo - enorm, hi + enorm};
}

namespace {

int zolotarev_count(double a, double b, double tol)
{
   if (b <= a * (1.0 + 1e-12)) return 1;
   const double rho = zolotarev_rate(a, b);
   const int k = static_cast<int>(std::ceil(std::log(tol / 4.0) / std::log(rho)));
   return std::clamp(k, 1, 64);
}

} // namespace

PoleSequence auto_poles(const QtMatrix& A, const QtMatrix& B, const SolveOptions& opts)
{
   const auto ea = hermitian_enclosure(A);
   const auto eb = hermitian_enclosure(B);
   if (ea && eb && ea->lo > 0.0 && eb->lo > 0.0) {
      const double lo = std::min(ea->lo, eb->lo), hi = std::max(ea->hi, eb->hi);
      if (hi <= lo * (1.0 + 1e-12)) return zolotarev_poles(lo, lo * (1.0 + 1e-12), 1);
      return zolotarev_poles(lo, hi, zolotarev_count(lo, hi, opts.tol));
   }
   if (opts.method == Method::adi)
      throw InvalidArgument("ADI on a non-SPD problem needs explicit shifts");
   return extended_poles(std::max(opts.max_iter, 2));
}

CorrectionSolution adi_sylvester(const QtMatrix& A, const QtMatrix& B, const Correction& C,
                                 const PoleSequence& poles, const SolveOptions& opts, double reference_norm)
{
   const QtOperator Aop(A, opts.n_cap), Bop(B, opts.n_cap);
   ResidualHooks hooks;
   hooks.reference_norm = reference_norm;
   return adi_factored(Aop, Bop, C, poles, opts, hooks);
}

CorrectionSolution galerkin_sylvester(const QtMatrix& A, const QtMatrix& B, const Correction& C,
                                      const PoleSequence& poles, const SolveOptions& opts, double reference_norm)
{
   const QtOperator Aop(A, opts.n_cap), Bop(B, opts.n_cap);
   ResidualHooks hooks;
   hooks.reference_norm = reference_norm;
   return galerkin_factored(Aop, Bop, C, poles, opts, hooks);
}

SylvesterSolution solve_sylvester(const QtMatrix& A, const QtMatrix& B, const QtMatrix& C, const SolveOptions& opts,
                                  const std::optional<PoleSequence>& poles)
{
   if (!(opts.tol > 0.0) || opts.max_iter < 1) throw InvalidArgument("solve_sylvester: need tol > 0, max_iter >= 1");
   const double sym_tol = std::clamp(opts.tol * 1e-3, 1e-14, 1e-12);
   const LaurentSymbol x = truncate(ev_interp(A.symbol, B.symbol, C.symbol, {.tol = sym_tol}).x, sym_tol);
   const Correction chat = correction_rhs(A, B, C, x, kArithmeticTol);

   SylvesterSolution out;
   CorrectionSolution corr;
   if (chat.is_zero()) {
      corr.report.residual_history.push_back({1, 0.0});
   } else {
      const PoleSequence ps = poles ? *poles : auto_poles(A, B, opts);
      const double cref = norm_estimate(C, opts.norm);
      corr = opts.method == Method::adi ? adi_sylvester(A, B, chat, ps, opts, cref)
                                        : galerkin_sylvester(A, B, chat, ps, opts, cref);
   }
   out.X = QtMatrix(x, corr.X);
   out.report = corr.report;
   const double cnorm = norm_estimate(C, opts.norm);
   const double res = cnorm > 0.0 ? residual_norm(A, B, C, out.X, opts.norm) / cnorm : 0.0;
   out.report.residual_history.back().residual = res;
   out.report.final_rank = corr.X.rank();
   out.report.toeplitz_degree = x.bandwidth();
   out.report.status = res <= opts.tol ? Status::converged : Status::max_iter;
   return out;
}

} // namespace qtmat
