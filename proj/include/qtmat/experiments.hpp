#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <tuple>
#include <vector>

#include "qtmat/qt_matrix.hpp"
#include "qtmat/solver_types.hpp"

namespace qtmat {

/// Where the sampled Gaussians of the source term start: the listing samples
/// coefficients from x = 0, interior sampling starts at the first unknown x = dx.
enum class HankelOrigin { listing, interior };

HankelOrigin parse_hankel_origin(const std::string& s);
Method parse_method(const std::string& s);

struct PdeConfig {
   double dx = 0.05;
   double dt = 0.05;
   int timesteps = 20;
   double plot_range = 2.0;
   int plot_grid = 41;
   double tol = 1e-8;
   Method method = Method::galerkin;
   HankelOrigin origin = HankelOrigin::listing;
   std::filesystem::path out_dir;   ///< no files are written when empty
};

struct PdeResult {
   QtMatrix U;                        ///< solution at the final time
   std::vector<SolveReport> reports;  ///< one per time step
};

/// dx^2 / 2 I - dt T(z^{-1} - 2 + z): the SPD coefficient of the implicit Euler step.
QtMatrix heat_step_matrix(double dx, double dt);

/// Source of the unbounded-domain example: Hankel part e^{-((i+j-2+2 delta) dx)^2}
/// plus 0.1 times the Toeplitz matrix of e^{-(k dx)^2}.
QtMatrix gaussian_source(double dx, HankelOrigin origin);

/// Implicit Euler on the positive quadrant: each step solves
/// M U + U M - dx^2 U_prev - dx^2 dt F = 0 with M = heat_step_matrix(dx, dt).
/// Writes pde_t<k>.dat and residual_step<k>.dat when cfg.out_dir is set.
PdeResult run_pde(const PdeConfig& cfg);

/// Grid file: header "# x y u", then grid^2 rows "x y u" (x fastest) at
/// x, y = i * (range / grid), values bilinear in the unknowns U_ij at (i dx, j dx)
/// with zero boundary values at x = 0 and y = 0.
void write_grid(const std::filesystem::path& path, const QtMatrix& U, double dx, double range, int grid);
void write_grid(std::ostream& os, const QtMatrix& U, double dx, double range, int grid);

/// Residual log: lines "<iter> <relative_residual>".
void write_residual_log(const std::filesystem::path& path, const SolveReport& report);

struct ConvergenceOptions {
   double t_final = 1.0;
   double tol = 1e-10;
   Method method = Method::adi;
   HankelOrigin origin = HankelOrigin::listing;
};

/// Manufactured solution u = (1 - e^{-t}) (e^{-(x-y)^2} + e^{-x-y}).
double manufactured_solution(double x, double y, double t);

/// Sup-norm error at t_final of the scheme with dt = dx = h against the
/// manufactured solution, over all interior grid points.
double pde_convergence_error(double h, const ConvergenceOptions& opts);

struct LevelSymbol {
   int min_degree = 0;
   std::vector<double> coefficients;
   std::vector<std::tuple<int, int, double>> correction;   ///< 1-based entries

   QtMatrix matrix() const;
};

struct QbdConfig {
   LevelSymbol A_minus;   ///< A_{-1}
   LevelSymbol A_zero;    ///< A_0
   LevelSymbol A_plus;    ///< A_1
   int newton_steps = 3;
   std::string method = "fixedpoint";
   double tol = 1e-12;
   Norm norm = Norm::inf;
   int max_iter = 500;
};

/// Flat "key = value" text; '#' starts a comment. Keys: Am1.min_degree,
/// Am1.coefficients, Am1.correction ("i,j,v; i,j,v"), likewise A0 and A1,
/// newton_steps, method, tol, norm (2 or inf), max_iter.
QbdConfig parse_qbd_config(std::istream& in);
QbdConfig load_qbd_config(const std::filesystem::path& path);

/// Throws InvalidArgument unless the coefficients are nonnegative and
/// a_{-1}(1) + a_0(1) + a_1(1) = 1 within 1e-12.
void check_stochastic(const QbdConfig& cfg);

struct QbdResult {
   QtMatrix X;
   std::vector<double> newton_residuals;       ///< ||F(X_k)||, k = 1..
   std::vector<SolveReport> stein_reports;     ///< one per Newton step
};

/// F(X) = A_{-1} + A_0 X + A_1 X^2 - X.
QtMatrix qbd_residual(const QbdConfig& cfg, const QtMatrix& X);

/// X_1 = (I - A_0)^{-1} A_{-1}, then Newton steps, each solving the Stein equation
/// H + K^{-1} A_1 H X_k + K^{-1} F(X_k) = 0 with K = A_0 + A_1 X_k - I.
/// Writes qbd_newton<k>.dat (Stein residual history of step k) when out_dir is set.
QbdResult run_qbd(const QbdConfig& cfg, const std::filesystem::path& out_dir = {});

} // namespace qtmat
