#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "qtmat/correction.hpp"

namespace qtmat {

enum class Method { adi, galerkin };
enum class Status { converged, max_iter };

struct SolveOptions {
   double tol = 1e-8;              ///< relative residual target
   int max_iter = 100;
   double compression_tol = 0.0;   ///< 0 selects tol / 10
   Eigen::Index n_cap = Eigen::Index(1) << 18;
   Method method = Method::adi;
   Norm norm = Norm::two;
   /// Galerkin with extended poles: evaluate the residual after every pole
   /// instead of after every second one.
   bool residual_every_step = false;
   /// Called with the correction iterate after each ADI or fixed-point step.
   std::function<void(int iteration, const Correction& iterate)> on_iterate;

   double effective_compression_tol() const { return compression_tol > 0.0 ? compression_tol : tol / 10.0; }
   /// Accuracy requested from shifted solves inside the iterations.
   double inner_tol() const { return std::max(tol / 100.0, 1e-14); }
};

struct ResidualEntry {
   int iteration = 0;
   double residual = 0.0;
};

struct SolveReport {
   std::vector<ResidualEntry> residual_history;
   Eigen::Index final_rank = 0;
   int toeplitz_degree = 0;
   Status status = Status::max_iter;

   double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back().residual; }
   bool converged() const { return status == Status::converged; }
};

/// Relative residual of a candidate correction.
using ResidualFn = std::function<double(const Correction&)>;

/// Problem-specific pieces shared by the iterative correction solvers.
struct ResidualHooks {
   /// Certified relative residual of a candidate; empty selects the Sylvester residual.
   ResidualFn certified;
   /// Relative residual from the ADI recurrence factors R L^*; empty selects ||R L^*|| / ||C||.
   std::function<double(const Mat& R, const Mat& L)> recurrence;
   /// Residual growth per unit perturbation of X (turns compression_tol into an
   /// absolute budget) and the norm residuals are relative to.
   /// Nonpositive values select ||A|| + ||B|| and ||C||.
   double sensitivity = 0.0;
   double reference_norm = 0.0;
};

} // namespace qtmat
