// qtsolve: heat equation on the quarter plane, the manufactured-solution
// convergence table and Newton steps for a quasi-Toeplitz QBD.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "qtmat/errors.hpp"
#include "qtmat/experiments.hpp"

using namespace qtmat;

int main(int argc, char** argv)
{
   CLI::App app{"Quasi-Toeplitz matrix equation solver"};
   app.require_subcommand(1);

   PdeConfig pde;
   std::string pde_method = "galerkin", pde_origin = "listing", pde_out = ".";
   auto* cmd_pde = app.add_subcommand("pde", "Implicit Euler for the heat equation on the quarter plane");
   cmd_pde->add_option("--dx", pde.dx, "Space step")->check(CLI::PositiveNumber);
   cmd_pde->add_option("--dt", pde.dt, "Time step")->check(CLI::PositiveNumber);
   cmd_pde->add_option("--steps", pde.timesteps, "Number of time steps")->check(CLI::NonNegativeNumber);
   cmd_pde->add_option("--plot-range", pde.plot_range, "Edge L of the plotted window [0,L]^2")->check(CLI::PositiveNumber);
   cmd_pde->add_option("--plot-grid", pde.plot_grid, "Samples per axis")->check(CLI::PositiveNumber);
   cmd_pde->add_option("--method", pde_method, "galerkin or adi")->check(CLI::IsMember({"galerkin", "adi"}));
   cmd_pde->add_option("--tol", pde.tol, "Relative residual tolerance per step")->check(CLI::PositiveNumber);
   cmd_pde->add_option("--out-dir", pde_out, "Output directory");
   cmd_pde->add_option("--hankel-origin", pde_origin, "listing or interior")->check(CLI::IsMember({"listing", "interior"}));

   std::vector<double> conv_steps{0.5, 0.25, 0.125};
   ConvergenceOptions conv;
   std::string conv_method = "adi", conv_origin = "listing";
   auto* cmd_conv = app.add_subcommand("pde-convergence", "Error table for the manufactured solution");
   cmd_conv->add_option("--steps", conv_steps, "Comma separated list of h = dt = dx")->delimiter(',');
   cmd_conv->add_option("--t-final", conv.t_final, "Final time")->check(CLI::PositiveNumber);
   cmd_conv->add_option("--method", conv_method, "galerkin or adi")->check(CLI::IsMember({"galerkin", "adi"}));
   cmd_conv->add_option("--tol", conv.tol, "Relative residual tolerance per step")->check(CLI::PositiveNumber);
   cmd_conv->add_option("--hankel-origin", conv_origin, "listing or interior")->check(CLI::IsMember({"listing", "interior"}));

   std::string qbd_config, qbd_method, qbd_out = ".";
   auto* cmd_qbd = app.add_subcommand("qbd", "Newton iteration for A_{-1} + A_0 X + A_1 X^2 = X");
   cmd_qbd->add_option("--config", qbd_config, "Key-value configuration file")->required()->check(CLI::ExistingFile);
   cmd_qbd->add_option("--method", qbd_method, "fixedpoint, adi or galerkin (overrides the config)")
      ->check(CLI::IsMember({"fixedpoint", "adi", "galerkin"}));
   cmd_qbd->add_option("--out-dir", qbd_out, "Output directory");

   CLI11_PARSE(app, argc, argv);

   try {
      if (cmd_pde->parsed()) {
         pde.method = parse_method(pde_method);
         pde.origin = parse_hankel_origin(pde_origin);
         pde.out_dir = pde_out;
         const PdeResult r = run_pde(pde);
         for (std::size_t k = 0; k < r.reports.size(); ++k)
            std::printf("step %zu: %zu iterations, residual %.3e, rank %ld\n", k + 1, r.reports[k].residual_history.size(),
                        r.reports[k].final_residual(), static_cast<long>(r.reports[k].final_rank));
      } else if (cmd_conv->parsed()) {
         conv.method = parse_method(conv_method);
         conv.origin = parse_hankel_origin(conv_origin);
         for (double h : conv_steps) {
            std::printf("%.15g %.15e\n", h, pde_convergence_error(h, conv));
            std::fflush(stdout);
         }
      } else if (cmd_qbd->parsed()) {
         QbdConfig cfg = load_qbd_config(qbd_config);
         if (!qbd_method.empty()) cfg.method = qbd_method;
         const QbdResult r = run_qbd(cfg, qbd_out);
         for (std::size_t k = 0; k < r.newton_residuals.size(); ++k)
            std::printf("X_%zu: ||F|| = %.6e\n", k + 1, r.newton_residuals[k]);
      }
   } catch (const Error& e) {
      std::cerr << "qtsolve: " << e.what() << '\n';
      return 1;
   } catch (const std::exception& e) {
      std::cerr << "qtsolve: " << e.what() << '\n';
      return 1;
   }
   return 0;
}
