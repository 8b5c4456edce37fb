#include "qtmat/adi.hpp"

#include <algorithm>
#include <cmath>

#include "qtmat/block_vector.hpp"
#include "qtmat/errors.hpp"

namespace qtmat {

namespace {

Mat hcat(const std::vector<Mat>& blocks)
{
   Eigen::Index rows = 0, cols = 0;
   for (const auto& b : blocks) {
      rows = std::max(rows, b.rows());
      cols += b.cols();
   }
   Mat out = Mat::Zero(rows, cols);
   Eigen::Index c = 0;
   for (const auto& b : blocks) {
      out.block(0, c, b.rows(), b.cols()) = b;
      c += b.cols();
   }
   return out;
}

} // namespace

double sylvester_residual(const LinearOperator& A, const LinearOperator& B, const Correction& C,
                          const Correction& X, Norm p)
{
   if (X.is_zero()) return C.norm(p);
   const Mat U = hcat({A.apply(X.U), X.U, C.U});
   const Mat V = hcat({X.V, B.apply_adjoint(X.V), C.V});
   return Correction(U, V).norm(p);
}

CorrectionSolution adi_factored(const LinearOperator& A, const LinearOperator& B, const Correction& C,
                                const PoleSequence& poles, const SolveOptions& opts, const ResidualHooks& hooks)
{
   CorrectionSolution out;
   SolveReport& rep = out.report;
   const double cnorm = C.norm(opts.norm);
   if (cnorm == 0.0) {
      rep.residual_history.push_back({1, 0.0});
      rep.status = Status::converged;
      return out;
   }
   if (poles.empty()) throw InvalidArgument("ADI needs at least one shift pair");

   const double reference = hooks.reference_norm > 0.0 ? hooks.reference_norm : cnorm;
   const double sensitivity =
      hooks.sensitivity > 0.0 ? hooks.sensitivity : std::max(A.norm_bound() + B.norm_bound(), 1e-300);
   const double budget = opts.effective_compression_tol() * reference / sensitivity;
   const double step_budget = budget / (2.0 * opts.max_iter);

   auto recurrence = hooks.recurrence;
   if (!recurrence)
      recurrence = [&](const Mat& R, const Mat& L) { return Correction(R, L).norm(opts.norm) / reference; };
   auto certified = hooks.certified;
   if (!certified)
      certified = [&](const Correction& X) { return sylvester_residual(A, B, C, X, opts.norm) / reference; };

   Mat R = -C.U;
   Mat L = C.V;
   Correction X;
   const double itol = opts.inner_tol();
   for (int j = 0; j < opts.max_iter; ++j) {
      const ShiftPair& pr = poles.cycled(static_cast<std::size_t>(j));
      if (pr.alpha.infinite || pr.beta.infinite) throw InvalidArgument("ADI shifts must be finite");
      const cplx alpha = pr.alpha.value, beta = pr.beta.value;
      if (alpha == beta) throw InvalidArgument("ADI shifts need alpha != beta");

      const Mat Vj = A.solve_shifted(beta, R, itol);
      const Mat Wj = -B.solve_shifted_adjoint(-alpha, L, itol);
      R = add_padded(R, (beta - alpha) * Vj);
      L = add_padded(L, std::conj(alpha - beta) * Wj);
      X = compress_absolute(X + Correction((beta - alpha) * Vj, Wj), step_budget);
      if (opts.on_iterate) opts.on_iterate(j + 1, X);

      double res = recurrence(R, L);
      if (res <= opts.tol || j + 1 == opts.max_iter) {
         const Correction Xc = compress_absolute(X, budget / 2.0);
         res = certified(Xc);
         if (res <= opts.tol || j + 1 == opts.max_iter) {
            rep.residual_history.push_back({j + 1, res});
            out.X = Xc;
            break;
         }
      }
      rep.residual_history.push_back({j + 1, res});
   }
   rep.final_rank = out.X.rank();
   rep.status = rep.final_residual() <= opts.tol ? Status::converged : Status::max_iter;
   return out;
}

} // namespace qtmat
