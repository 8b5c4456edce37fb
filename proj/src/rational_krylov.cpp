#include "qtmat/rational_krylov.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qtmat/block_vector.hpp"
#include "qtmat/errors.hpp"

namespace qtmat {

namespace {

// Two MGS passes of the columns of V against Q (the first q columns) and each
// other; surviving columns are appended to Q. Returns how many survived.
Eigen::Index orthonormalize_into(Mat& Q, Mat V, double tol)
{
   const Eigen::Index rows = std::max(Q.rows(), V.rows());
   if (Q.rows() < rows) Q = pad_rows(Q, rows);
   V = pad_rows(V, rows);
   Eigen::Index added = 0;
   for (Eigen::Index c = 0; c < V.cols(); ++c) {
      Vec w = V.col(c);
      const double before = w.norm();
      if (before == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass)
         for (Eigen::Index k = 0; k < Q.cols(); ++k) w -= Q.col(k).dot(w) * Q.col(k);
      const double after = w.norm();
      if (after <= tol * before) continue;
      Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
      Q.col(Q.cols() - 1) = w / after;
      ++added;
   }
   return added;
}

} // namespace

RationalBasis arnoldi_start(const Mat& U, double tol)
{
   RationalBasis b;
   b.block_width = U.cols();
   b.W = Mat(U.rows(), 0);
   const Eigen::Index added = orthonormalize_into(b.W, U, tol);
   if (added == 0) throw Breakdown("start block is zero");
   b.last_start = 0;
   b.last_cols = added;
   return b;
}

Eigen::Index arnoldi_extend(const LinearOperator& A, RationalBasis& basis, const Pole& pole, double tol,
                            double solve_tol)
{
   const Mat v = basis.last_block();
   const Mat w = pole.infinite ? A.apply(v) : A.solve_shifted(pole.value, v, solve_tol);
   const Eigen::Index start = basis.W.cols();
   const Eigen::Index added = orthonormalize_into(basis.W, w, tol);
   if (added == 0) throw Breakdown("all new rational Krylov directions deflated");
   basis.poles_used.push_back(pole);
   basis.last_start = start;
   basis.last_cols = added;
   return added;
}

Mat dense_sylvester_small(const Mat& Ap, const Mat& Bp, const Mat& Cp)
{
   const Eigen::Index m = Ap.rows(), n = Bp.rows();
   if (m == 0 || n == 0) return Mat::Zero(m, n);
   Eigen::ComplexSchur<Mat> sa(Ap), sb(Bp);
   const Mat& T1 = sa.matrixT();
   const Mat& T2 = sb.matrixT();
   const Mat& Q1 = sa.matrixU();
   const Mat& Q2 = sb.matrixU();
   const Mat F = -(Q1.adjoint() * Cp * Q2);
   const double scale = Ap.norm() + Bp.norm();
   const double thresh = 1e2 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);

   Mat Yt = Mat::Zero(m, n);
   for (Eigen::Index j = 0; j < n; ++j) {
      Vec rhs = F.col(j);
      if (j > 0) rhs -= Yt.leftCols(j) * T2.col(j).head(j);
      Mat S = T1;
      S.diagonal().array() += T2(j, j);
      if (S.diagonal().cwiseAbs().minCoeff() <= thresh)
         throw SingularProjection("projected Sylvester operator is numerically singular");
      Yt.col(j) = S.triangularView<Eigen::Upper>().solve(rhs);
   }
   return Q1 * Yt * Q2.adjoint();
}

Correction lift_solution(const Mat& W, const Mat& Z, const Mat& Y)
{
   if (Y.size() == 0 || Y.isZero(0.0)) return {};
   return {W * Y, Z};
}

namespace {

Mat append_cols(const Mat& a, const Mat& b)
{
   const Eigen::Index rows = std::max(a.rows(), b.rows());
   Mat out(rows, a.cols() + b.cols());
   out << pad_rows(a, rows), pad_rows(b, rows);
   return out;
}

} // namespace

CorrectionSolution galerkin_factored(const LinearOperator& A, const LinearOperator& B, const Correction& C,
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
   if (poles.empty()) throw InvalidArgument("Galerkin needs at least one pole pair");

   const double reference = hooks.reference_norm > 0.0 ? hooks.reference_norm : cnorm;
   const double sensitivity =
      hooks.sensitivity > 0.0 ? hooks.sensitivity : std::max(A.norm_bound() + B.norm_bound(), 1e-300);
   const double budget = opts.effective_compression_tol() * reference / sensitivity;
   auto certified = hooks.certified;
   if (!certified)
      certified = [&](const Correction& X) { return sylvester_residual(A, B, C, X, opts.norm) / reference; };

   const AdjointOperator Bs(B);
   RationalBasis left = arnoldi_start(C.U);
   RationalBasis right = arnoldi_start(C.V);
   Mat AW = A.apply(left.W);
   Mat BsZ = Bs.apply(right.W);
   bool left_open = true, right_open = true;
   const bool skip_zero_poles = poles.is_extended() && !opts.residual_every_step;
   const double itol = opts.inner_tol();

   Mat Y;
   for (int j = 0; j < opts.max_iter; ++j) {
      const ShiftPair& pr = poles.cycled(static_cast<std::size_t>(j));
      if (left_open) {
         try {
            const Eigen::Index start = left.W.cols();
            arnoldi_extend(A, left, pr.beta, kDeflationTol, itol);
            AW = append_cols(AW, A.apply(left.W.rightCols(left.W.cols() - start)));
         } catch (const Breakdown&) {
            left_open = false;
         }
      }
      if (right_open) {
         const Pole rp = pr.alpha.infinite ? pr.alpha : Pole::at(-std::conj(pr.alpha.value));
         try {
            const Eigen::Index start = right.W.cols();
            arnoldi_extend(Bs, right, rp, kDeflationTol, itol);
            BsZ = append_cols(BsZ, Bs.apply(right.W.rightCols(right.W.cols() - start)));
         } catch (const Breakdown&) {
            right_open = false;
         }
      }
      const bool last = j + 1 == opts.max_iter || (!left_open && !right_open);
      if (skip_zero_poles && !pr.beta.infinite && !rep.residual_history.empty() && !last) {
         rep.residual_history.push_back({j + 1, rep.residual_history.back().residual});
         continue;
      }

      const Mat& W = left.W;
      const Mat& Z = right.W;
      const Mat Ap = inner(W, AW);
      const Mat Bp = inner(BsZ, Z);
      const Mat Cp = inner(W, C.U) * inner(Z, C.V).adjoint();
      Y = dense_sylvester_small(Ap, Bp, Cp);

      // A X + X B + C = [AW Y, W Y, U] [Z, B^* Z, V]^*
      const Mat WY = W * Y;
      const Eigen::Index ru = std::max({AW.rows(), WY.rows(), C.U.rows()});
      const Eigen::Index rv = std::max({Z.rows(), BsZ.rows(), C.V.rows()});
      Mat RU(ru, 2 * Y.cols() + C.rank()), RV(rv, 2 * Y.cols() + C.rank());
      RU << pad_rows(AW * Y, ru), pad_rows(WY, ru), pad_rows(C.U, ru);
      RV << pad_rows(Z, rv), pad_rows(BsZ, rv), pad_rows(C.V, rv);
      double res = hooks.certified ? hooks.certified(lift_solution(W, Z, Y))
                                   : Correction(RU, RV).norm(opts.norm) / reference;
      if (res <= opts.tol || last) {
         out.X = compress_absolute(lift_solution(W, Z, Y), budget);
         res = certified(out.X);
         if (res <= opts.tol || last) {
            rep.residual_history.push_back({j + 1, res});
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
