#include "qtmat/stein.hpp"

#include <algorithm>
#include <cmath>

#include "qtmat/adi.hpp"
#include "qtmat/errors.hpp"
#include "qtmat/rational_krylov.hpp"

namespace qtmat {

namespace {

Mat hcat3(const Mat& a, const Mat& b, const Mat& c)
{
   const Eigen::Index rows = std::max({a.rows(), b.rows(), c.rows()});
   Mat out(rows, a.cols() + b.cols() + c.cols());
   out << pad_rows(a, rows), pad_rows(b, rows), pad_rows(c, rows);
   return out;
}

// Pieces shared by the three methods: the Toeplitz part x = -c / (1 + m n) and
// the correction right-hand side of M E N + E + C^ = 0.
struct SteinSplit {
   LaurentSymbol x;
   Correction chat;
   double cref = 0.0;   // norm_estimate(C)
   double mnorm = 0.0;
   double nnorm = 0.0;
};

SteinSplit split(const SteinProblem& P, const SolveOptions& opts)
{
   SteinSplit s;
   const double sym_tol = std::clamp(opts.tol * 1e-3, 1e-14, 1e-12);
   s.x = truncate(ev_interp(P.M.symbol * P.N.symbol, LaurentSymbol::constant(1.0), P.C.symbol, {.tol = sym_tol}).x,
                  sym_tol);
   const QtMatrix MX = multiply(P.M, QtMatrix(s.x), 0.0);
   const QtMatrix MXN = multiply(MX, P.N, 0.0);
   s.chat = compress(MXN.correction + P.C.correction, kArithmeticTol);
   s.cref = norm_estimate(P.C, opts.norm);
   s.mnorm = norm_estimate(P.M, opts.norm);
   s.nnorm = norm_estimate(P.N, opts.norm);
   return s;
}

SteinSolution finish(const SteinProblem& P, const SteinSplit& s, CorrectionSolution corr, const SolveOptions& opts)
{
   SteinSolution out;
   out.X = QtMatrix(s.x, corr.X);
   out.report = std::move(corr.report);
   const double res =
      s.cref > 0.0 ? norm_estimate(stein_residual_qt(P.M, P.N, P.C, out.X), opts.norm) / s.cref : 0.0;
   if (out.report.residual_history.empty()) out.report.residual_history.push_back({1, res});
   out.report.residual_history.back().residual = res;
   out.report.final_rank = corr.X.rank();
   out.report.toeplitz_degree = s.x.bandwidth();
   out.report.status = res <= opts.tol ? Status::converged : Status::max_iter;
   return out;
}

ResidualHooks stein_hooks(const LinearOperator& M, const LinearOperator& N, const SteinSplit& s,
                          const SolveOptions& opts)
{
   ResidualHooks h;
   h.reference_norm = s.cref > 0.0 ? s.cref : 1.0;
   h.sensitivity = 1.0 + s.mnorm * s.nnorm;
   const double ref = h.reference_norm;
   const Norm p = opts.norm;
   h.certified = [&M, &N, &s, ref, p](const Correction& E) { return stein_residual(M, N, s.chat, E, p) / ref; };
   // The Stein residual of an ADI iterate is (I - M) R (I + N) / 2 for the
   // Cayley residual R L^*.
   h.recurrence = [&M, &N, ref, p](const Mat& R, const Mat& L) {
      const Mat U = add_padded(R, -M.apply(R));
      const Mat V = add_padded(L, N.apply_adjoint(L));
      return Correction(0.5 * U, V).norm(p) / ref;
   };
   return h;
}

// C~ = 2 (I - M)^{-1} C^ (I + N)^{-1} in factored form.
Correction cayley_rhs(const LinearOperator& M, const LinearOperator& N, const Correction& chat, double tol)
{
   if (chat.is_zero()) return {};
   const Mat U = -2.0 * M.solve_shifted(1.0, chat.U, tol);
   const Mat V = N.solve_shifted_adjoint(-1.0, chat.V, tol);
   return {U, V};
}

} // namespace

SteinProblem make_stein_problem(const QtMatrix& M, const QtMatrix& N, const QtMatrix& C, bool balance, Norm p)
{
   SteinProblem P{M, N, C, 1.0};
   if (!balance) return P;
   const double nm = norm_estimate(M, p), nn = norm_estimate(N, p);
   if (nm == 0.0 || nn == 0.0) return P;
   P.lambda = std::sqrt(nn / nm);
   P.M = scale(P.lambda, M);
   P.N = scale(1.0 / P.lambda, N);
   return P;
}

QtMatrix stein_residual_qt(const QtMatrix& M, const QtMatrix& N, const QtMatrix& C, const QtMatrix& X)
{
   const QtMatrix MXN = multiply(multiply(M, X, 0.0), N, 0.0);
   return {MXN.symbol + X.symbol + C.symbol, MXN.correction + X.correction + C.correction};
}

double stein_residual(const LinearOperator& M, const LinearOperator& N, const Correction& C, const Correction& E,
                      Norm p)
{
   if (E.is_zero()) return C.norm(p);
   return Correction(hcat3(M.apply(E.U), E.U, C.U), hcat3(N.apply_adjoint(E.V), E.V, C.V)).norm(p);
}

SteinSolution stein_fixed_point(const SteinProblem& P, const SolveOptions& opts)
{
   const SteinSplit s = split(P, opts);
   if (s.mnorm * s.nnorm >= 1.0) throw NotContractive("||M|| ||N|| >= 1");
   const QtOperator Mop(P.M, opts.n_cap), Nop(P.N, opts.n_cap);
   const ResidualHooks h = stein_hooks(Mop, Nop, s, opts);
   const double budget = opts.effective_compression_tol() * h.reference_norm / h.sensitivity / 2.0;

   CorrectionSolution corr;
   if (s.chat.is_zero()) {
      corr.report.residual_history.push_back({1, 0.0});
      return finish(P, s, corr, opts);
   }
   Correction E = -s.chat;
   for (int k = 1; k <= opts.max_iter; ++k) {
      if (opts.on_iterate) opts.on_iterate(k, E);
      const double res = h.certified(E);
      corr.report.residual_history.push_back({k, res});
      if (res <= opts.tol) {
         corr.X = E;
         return finish(P, s, corr, opts);
      }
      const Correction MEN(Mop.apply(E.U), Nop.apply_adjoint(E.V));
      E = compress_absolute(-s.chat - MEN, budget);
   }
   throw MaxIter("stein_fixed_point: " + std::to_string(opts.max_iter) + " iterations without reaching tol");
}

SteinSolution stein_adi(const SteinProblem& P, const SolveOptions& opts)
{
   const SteinSplit s = split(P, opts);
   const auto Mop = std::make_shared<QtOperator>(P.M, opts.n_cap);
   const auto Nop = std::make_shared<QtOperator>(P.N, opts.n_cap);
   const CayleyOperator A(Mop);
   const CayleyOperator B(std::make_shared<ScaledOperator>(Nop, -1.0));
   const ResidualHooks h = stein_hooks(*Mop, *Nop, s, opts);
   const Correction Ct = cayley_rhs(*Mop, *Nop, s.chat, opts.inner_tol());
   CorrectionSolution corr = adi_factored(A, B, Ct, constant_poles(1.0, -1.0, 1), opts, h);
   return finish(P, s, std::move(corr), opts);
}

SteinSolution stein_galerkin(const SteinProblem& P, const SolveOptions& opts)
{
   if (opts.norm != Norm::two) throw InvalidArgument("the Galerkin method is defined in the 2-norm only");
   const SteinSplit s = split(P, opts);
   const auto Mop = std::make_shared<QtOperator>(P.M, opts.n_cap);
   const auto Nop = std::make_shared<QtOperator>(P.N, opts.n_cap);
   const CayleyOperator A(Mop);
   const CayleyOperator B(std::make_shared<ScaledOperator>(Nop, -1.0));
   const ResidualHooks h = stein_hooks(*Mop, *Nop, s, opts);
   const Correction Ct = cayley_rhs(*Mop, *Nop, s.chat, opts.inner_tol());
   CorrectionSolution corr = galerkin_factored(A, B, Ct, constant_poles(1.0, -1.0, 1), opts, h);
   return finish(P, s, std::move(corr), opts);
}

CayleyRemap cayley_remap(const SteinProblem& P, double tol)
{
   const QtMatrix I = QtMatrix::identity();
   const QtMatrix ImM_inv = qt_inverse(subtract(I, P.M, 0.0), tol);
   const QtMatrix IpN_inv = qt_inverse(add(I, P.N, 0.0), tol);
   CayleyRemap out;
   out.A = multiply(add(P.M, I, 0.0), ImM_inv, tol);
   out.B = multiply(IpN_inv, subtract(I, P.N, 0.0), tol);
   out.C = scale(2.0, multiply(multiply(ImM_inv, P.C, tol), IpN_inv, tol));
   return out;
}

SteinSolution solve_stein(const QtMatrix& M, const QtMatrix& N, const QtMatrix& C, const std::string& method,
                          const SolveOptions& opts, bool balance)
{
   if (method != "fixedpoint" && method != "adi" && method != "galerkin")
      throw UnknownMethod("unknown Stein method '" + method + "'");
   const SteinProblem P = make_stein_problem(M, N, C, balance, opts.norm);
   if (method == "fixedpoint") return stein_fixed_point(P, opts);
   if (method == "adi") return stein_adi(P, opts);
   return stein_galerkin(P, opts);
}

} // namespace qtmat
