// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "qtmat/adi.hpp"
#include "qtmat/errors.hpp"
#include "qtmat/experiments.hpp"
#include "qtmat/poles.hpp"
#include "qtmat/rational_krylov.hpp"
#include "qtmat/stein.hpp"
#include "qtmat/sylvester.hpp"
#include "support.hpp"

using namespace qtmat;
using namespace qtmat::testing;

namespace {

struct Outcome {
   bool pass = false;
   std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
   char buf[256];
   std::snprintf(buf, sizeof buf, f, a, b, c);
   return buf;
}

// Error of a factored iterate against a reference correction, exact in the 2-norm.
double correction_distance(const Correction& a, const Correction& b)
{
   if (a.is_zero()) return b.norm(Norm::two);
   if (b.is_zero()) return a.norm(Norm::two);
   const Eigen::Index ru = std::max(a.U.rows(), b.U.rows()), rv = std::max(a.V.rows(), b.V.rows());
   Mat U(ru, a.rank() + b.rank()), V(rv, a.rank() + b.rank());
   U << pad_rows(a.U, ru), pad_rows(-b.U, ru);
   V << pad_rows(a.V, rv), pad_rows(b.V, rv);
   return Correction(U, V).norm(Norm::two);
}

// The contractive Stein instance: M = 0.8 Z, N = 0.8 Z^T with Z the down shift, rank-one C.
struct SteinInstance {
   QtMatrix M, N, C;
};

SteinInstance stein_instance()
{
   Mat c = Mat::Zero(4, 1), d = Mat::Zero(4, 1);
   c << 1.0, -1.0, 0.5, 0.25;
   d << 0.25, 0.5, -1.0, 1.0;
   return {QtMatrix(LaurentSymbol(-1, {0.8})), QtMatrix(LaurentSymbol(1, {0.8})),
           QtMatrix(LaurentSymbol(), Correction(c, d))};
}

// Reference solution on a dense 1024-section: M X N = 0.64 Z X Z^T is a diagonal
// shift, so the Neumann series is summed until it stalls.
Mat stein_reference(const SteinInstance& in, Eigen::Index n)
{
   const Mat Cd = finite_section(in.C, n);
   Mat X = -Cd;
   for (int it = 0; it < 400; ++it) {
      Mat Y = -Cd;
      Y.bottomRightCorner(n - 1, n - 1) -= 0.64 * X.topLeftCorner(n - 1, n - 1);
      X = Y;
   }
   return X;
}

Outcome product_identity()
{
   std::mt19937 rng(2024);
   const Eigen::Index n = 512, k = 128;
   double worst = 0.0;
   for (int t = 0; t < 50; ++t) {
      const QtMatrix A = random_qt(rng, 8, 10, 3), B = random_qt(rng, 8, 10, 3);
      const Mat P = finite_section(multiply(A, B), k);
      // Leading block of the dense section product: first k rows of A_n times first k columns of B_n.
      const Mat D = finite_section(A, k, n) * finite_section(B, n, k);
      worst = std::max(worst, (P - D).norm() / D.norm());
   }
   return {worst <= 1e-12, fmt("max relative Frobenius error %.2e over 50 pairs", worst)};
}

Outcome ev_interp_residual()
{
   const double dx = 0.05, dt = 0.01;
   const QtMatrix M = heat_step_matrix(dx, dt);
   const QtMatrix F = gaussian_source(dx, HankelOrigin::listing);
   std::mt19937 rng(7);
   std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
   double worst = 0.0;
   LaurentSymbol prev;
   for (int step = 1; step <= 3; ++step) {
      const LaurentSymbol c = cplx(-dx * dx) * prev + cplx(-dx * dx * dt) * F.symbol;
      const EvInterpResult r = ev_interp(M.symbol, M.symbol, c);
      double res = 0.0;
      for (int s = 0; s < 2048; ++s) {
         const cplx z = std::polar(1.0, angle(rng));
         const cplx a = M.symbol.evaluate(z), x = r.x.evaluate(z);
         res = std::max(res, std::abs(a * x + x * a + c.evaluate(z)));
      }
      worst = std::max(worst, res / wiener_norm(c));
      prev = r.x;
   }
   return {worst <= 1e-10, fmt("max |a x + x b + c| / ||c||_W = %.2e on 2048 random samples, 3 steps", worst)};
}

Outcome zolotarev_rate_check()
{
   const double dx = 0.05, dt = 0.01;
   const QtMatrix A = heat_step_matrix(dx, dt);
   const QtMatrix C = scale(-dx * dx * dt, gaussian_source(dx, HankelOrigin::listing));
   const auto enc = hermitian_enclosure(A);
   if (!enc) return {false, "no Hermitian enclosure"};
   const double a = enc->lo, b = enc->hi, rho = zolotarev_rate(a, b);
   const double nA = norm_estimate(A, Norm::two);

   // Relative residual ||A X_k + X_k B + C||_2 / ||X||_2: the numerator is the
   // certified upper bound, the denominator a lower bound for ||X||_2 (the larger
   // of max |x| on the circle and the norm of a finite section).
   SolveOptions ref_opts;
   ref_opts.tol = 1e-13;
   ref_opts.max_iter = 200;
   const auto ref = solve_sylvester(A, A, C, ref_opts);
   double xnorm = norm2(finite_section(ref.X, 400));
   for (cplx v : sym_eval_roots(ref.X.symbol, 4096).values) xnorm = std::max(xnorm, std::abs(v));

   double worst = 0.0, floor = 0.0;
   std::string failing;
   for (int k = 1; k <= 20; ++k) {
      SolveOptions o;
      o.tol = 1e-300;
      o.max_iter = k;
      o.compression_tol = 1e-16;
      const auto sol = solve_sylvester(A, A, C, o, zolotarev_poles(a, b, k));
      const double measured = residual_norm(A, A, C, sol.X) / xnorm;
      const double ratio = measured / (4.0 * (2.0 * nA) * std::pow(rho, k));
      worst = std::max(worst, ratio);
      if (ratio > 1.0) {
         failing += (failing.empty() ? "" : ",") + std::to_string(k);
         floor = std::max(floor, measured / (2.0 * nA));
      }
   }
   SolveOptions o;
   o.tol = 1e-8;
   o.max_iter = 30;
   const auto run = solve_sylvester(A, A, C, o);
   const bool within = run.report.converged() && run.report.final_residual() <= 1e-8;
   std::string d = fmt("rho = %.4f, max residual / bound = %.3g over k = 1..20", rho, worst);
   if (!failing.empty())
      d += "; bound exceeded at k = " + failing +
           fmt(" where 4 rho^k falls below the roundoff floor %.1e of ||R|| / ((||A|| + ||B||) ||X||)", floor);
   d += fmt("; auto poles reach %.2e in %.0f steps", run.report.final_residual(),
            static_cast<double>(run.report.residual_history.back().iteration));
   return {worst <= 1.0 && within, d};
}

Outcome convergence_table()
{
   const double hs[] = {0.5, 0.25, 0.125};
   const double expect[] = {2.4185e-1, 1.5782e-1, 8.9787e-2};
   bool ok = true;
   std::string d;
   for (int i = 0; i < 3; ++i) {
      const double e = pde_convergence_error(hs[i], {});
      const double rel = std::abs(e - expect[i]) / expect[i];
      ok = ok && rel <= 0.02;
      d += fmt("h=%g: %.5e (%.2f%%)  ", hs[i], e, 100 * rel);
   }
   return {ok, d};
}

Outcome stein_adi_bound()
{
   const SteinInstance in = stein_instance();
   const Mat Xref = stein_reference(in, 1024);
   const Eigen::Index k = 256;
   const double xnorm = norm2(Xref.topLeftCorner(k, k));
   const double rho = 0.9;
   std::vector<double> err(11, -1.0);
   SolveOptions o;
   o.tol = 1e-300;
   o.max_iter = 10;
   o.compression_tol = 1e-16;
   o.on_iterate = [&](int j, const Correction& E) {
      if (j <= 10) err[j] = norm2(E.dense(k, k) - Xref.topLeftCorner(k, k));
   };
   solve_stein(in.M, in.N, in.C, "adi", o);
   double worst = 0.0;
   for (int j = 1; j <= 10; ++j) {
      const double bound = xnorm * std::pow(rho, 2 * j + 2) / ((rho - 0.8) * (rho - 0.8));
      worst = std::max(worst, err[j] / bound);
   }
   return {worst <= 1.0, fmt("max error / bound = %.3e for k = 1..10 (error at k=10: %.2e)", worst, err[10])};
}

Outcome fixed_point_contraction()
{
   const SteinInstance in = stein_instance();
   const Mat Xref = stein_reference(in, 1024);
   const Eigen::Index k = 256;
   const double xnorm = norm2(Xref.topLeftCorner(k, k));
   std::vector<double> err;
   SolveOptions o;
   o.tol = 1e-14;
   o.max_iter = 200;
   o.compression_tol = 1e-16;
   o.on_iterate = [&](int, const Correction& E) { err.push_back(norm2(E.dense(k, k) - Xref.topLeftCorner(k, k))); };
   solve_stein(in.M, in.N, in.C, "fixedpoint", o);
   // Ratios are taken while both errors are above the roundoff level of the
   // reference, 1e-13 ||X||.
   double worst = 0.0;
   int counted = 0;
   for (std::size_t j = 1; j < err.size(); ++j) {
      if (err[j] <= 1e-13 * xnorm) break;
      worst = std::max(worst, err[j] / err[j - 1]);
      ++counted;
   }
   return {worst <= 0.69 && counted >= 10,
           fmt("max error ratio %.4f over %.0f iterations (bound 0.69)", worst, static_cast<double>(counted))};
}

Outcome galerkin_quasi_optimality()
{
   std::mt19937 rng(77);
   const Eigen::Index n = 200;
   const Mat A = hermitian_with_spectrum(rng, Eigen::VectorXd::LinSpaced(n, 1.0, 100.0));
   const Mat B = hermitian_with_spectrum(rng, Eigen::VectorXd::LinSpaced(n, 2.0, 50.0));
   const double factor = 1.0 + 100.0 + 25.0;
   const Correction C(random_mat(rng, n, 1), random_mat(rng, n, 1));
   const DenseOperator Aop(A), Bop(B);
   double worst = 0.0;
   for (int k = 1; k <= 15; ++k) {
      const PoleSequence poles = zolotarev_poles(1.0, 100.0, k);
      SolveOptions o;
      o.tol = 1e-300;
      o.max_iter = k;
      o.compression_tol = 1e-16;
      const auto g = galerkin_factored(Aop, Bop, C, poles, o);
      const auto a = adi_factored(Aop, Bop, C, poles, o);
      // Residuals checked densely, independent of the solvers' own estimates.
      const Mat Xg = g.X.dense(n, n), Xa = a.X.dense(n, n), Cd = C.dense(n, n);
      const double rg = norm2(A * Xg + Xg * B + Cd), ra = norm2(A * Xa + Xa * B + Cd);
      worst = std::max(worst, rg / (factor * ra));
   }
   return {worst <= 1.0, fmt("max Galerkin / ((1 + k(A) + k(B)) ADI) residual = %.3e for k = 1..15", worst)};
}

Outcome arnoldi_hygiene()
{
   std::mt19937 rng(5);
   Mat u = 0.3 * random_mat(rng, 4, 1);
   const QtMatrix Aq(LaurentSymbol(-1, {1.0, 3.0, 1.0}), Correction(u, u));
   const QtOperator A(Aq);
   const Mat U0 = random_mat(rng, 6, 2);
   const Pole poles[] = {Pole::infinity(), Pole::at(0.0), Pole::at(-1.5), Pole::at(cplx(2.0, 1.0))};

   RationalBasis b = arnoldi_start(U0);
   for (int j = 0; j < 40; ++j) arnoldi_extend(A, b, poles[j % 4]);
   const Mat G = b.W.adjoint() * b.W;
   const double ortho = (G - Mat::Identity(G.rows(), G.cols())).norm();

   // Dense rational Arnoldi on the 1024-section with the same continuation and deflation.
   const Eigen::Index n = 1024;
   const Mat Ad = finite_section(Aq, n);
   Mat W = pad_rows(U0, n);
   {
      Eigen::HouseholderQR<Mat> qr(W);
      W = qr.householderQ() * Mat::Identity(n, U0.cols());
   }
   Mat last = W;
   for (int j = 0; j < 40; ++j) {
      const Pole& p = poles[j % 4];
      Mat w = p.infinite ? Mat(Ad * last) : Mat((Ad - p.value * Mat::Identity(n, n)).partialPivLu().solve(last));
      Mat added(n, 0);
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
         Vec v = w.col(c);
         const double before = v.norm();
         for (int pass = 0; pass < 2; ++pass) {
            v -= W * (W.adjoint() * v);
            v -= added * (added.adjoint() * v);
         }
         if (v.norm() <= kDeflationTol * before) continue;
         added.conservativeResize(n, added.cols() + 1);
         added.col(added.cols() - 1) = v.normalized();
      }
      Mat nw(n, W.cols() + added.cols());
      nw << W, added;
      W = nw;
      last = added;
   }
   const Mat Wq = pad_rows(b.W, n);
   double sine = 1.0;
   if (Wq.cols() == W.cols())
      sine = std::max(norm2(Wq - W * (W.adjoint() * Wq)), norm2(W - Wq * (Wq.adjoint() * W)));
   return {ortho <= 1e-12 && sine <= 1e-8,
           fmt("||W*W - I||_F = %.2e, largest principal angle sine %.2e, %.0f columns", ortho, sine,
               static_cast<double>(b.size()))};
}

Outcome solve_block_certification()
{
   std::mt19937 rng(31);
   std::normal_distribution<double> g;
   double worst = 0.0;
   const double tol = 1e-12;
   for (int t = 0; t < 20; ++t) {
      std::vector<cplx> c(7);
      for (auto& v : c) v = 0.3 * cplx(g(rng), g(rng));
      c[3] += 4.0;
      const QtMatrix A(LaurentSymbol(-3, c), Correction(0.5 * random_mat(rng, 5, 2), 0.5 * random_mat(rng, 5, 2)));
      const Mat b = random_mat(rng, 12, 2);
      SolveBlockOptions o;
      o.tol = tol;
      const Mat x = solve_block(A, b, o);
      const Eigen::Index rows = x.rows() + 3;
      const Mat r = finite_section(A, rows, x.rows()) * x - pad_rows(b, rows);
      worst = std::max(worst, r.norm() / (tol * b.norm()));
   }
   const Eigen::Index n = 8192;
   const QtMatrix T(LaurentSymbol(-1, {1.0, -2.5, 1.0}));
   Vec rhs = Vec::Zero(n);
   rhs.head(3) << 1.0, -2.0, cplx(0.0, 1.0);
   const Vec oracle = thomas(1.0, -2.5, 1.0, rhs);
   const Mat x = solve_block(T, rhs.head(3));
   const double diff = (pad_rows(x, n).col(0) - oracle).norm() / oracle.norm();
   return {worst <= 1.0 && diff <= 1e-10,
           fmt("max residual / (tol ||b||) = %.3f on 20 instances, tridiagonal vs 8192 Thomas %.2e", worst, diff)};
}

Outcome stein_consistency()
{
   const SteinInstance in = stein_instance();
   const double tol = 1e-12;
   SolveOptions o;
   o.tol = tol;
   o.max_iter = 500;
   const char* names[] = {"fixedpoint", "adi", "galerkin"};
   std::vector<Mat> X;
   std::vector<SolveReport> reps;
   const Eigen::Index k = 256;
   for (const char* m : names) {
      const auto sol = solve_stein(in.M, in.N, in.C, m, o);
      if (!sol.report.converged()) return {false, std::string(m) + " did not converge"};
      X.push_back(finite_section(sol.X, k));
      reps.push_back(sol.report);
   }
   const double xnorm = norm2(X[0]);
   double worst = 0.0;
   for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) worst = std::max(worst, norm2(X[i] - X[j]) / xnorm);

   // Per-iteration decay factors of the fixed point and ADI residual histories.
   const auto& hf = reps[0].residual_history;
   const auto& ha = reps[1].residual_history;
   double rate_gap = 1.0;
   const std::size_t common = std::min(hf.size(), ha.size());
   for (std::size_t j = 1; j < common; ++j) {
      const double rf = hf[j].residual / hf[j - 1].residual, ra = ha[j].residual / ha[j - 1].residual;
      rate_gap = std::max({rate_gap, rf / ra, ra / rf});
   }
   return {worst <= 10 * tol && rate_gap <= 2.0 && common >= 5,
           fmt("max pairwise relative difference %.2e (limit %.0e), decay-rate ratio %.3f", worst, 10 * tol, rate_gap)};
}

} // namespace

int main()
{
   struct Criterion {
      int id;
      const char* name;
      double limit_s;
      std::function<Outcome()> run;
   };
   const Criterion all[] = {
      {1, "Toeplitz product identity", 10, product_identity},
      {2, "ev_interp residual", 1, ev_interp_residual},
      {3, "Zolotarev ADI rate", 60, zolotarev_rate_check},
      {4, "convergence table", 300, convergence_table},
      {5, "Stein ADI bound", 60, stein_adi_bound},
      {6, "fixed-point contraction", 30, fixed_point_contraction},
      {7, "Galerkin quasi-optimality", 60, galerkin_quasi_optimality},
      {8, "rational Arnoldi hygiene", 60, arnoldi_hygiene},
      {9, "solve_block certification", 10, solve_block_certification},
      {10, "cross-method Stein consistency", 300, stein_consistency},
   };
   int failed = 0;
   for (const auto& c : all) {
      const auto t0 = std::chrono::steady_clock::now();
      Outcome o;
      try {
         o = c.run();
      } catch (const std::exception& e) {
         o = {false, std::string("exception: ") + e.what()};
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const bool pass = o.pass && secs <= c.limit_s;
      if (!pass) ++failed;
      std::printf("%s %2d %-32s %s [%.2fs, limit %.0fs]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                  secs, c.limit_s);
      std::fflush(stdout);
   }
   return failed == 0 ? 0 : 1;
}
