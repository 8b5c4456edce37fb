#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qtmat/errors.hpp"
#include "qtmat/experiments.hpp"
#include "support.hpp"

using namespace qtmat;
using namespace qtmat::testing;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name)
{
   const fs::path p = fs::temp_directory_path() / ("qtmat_test_" + name);
   fs::remove_all(p);
   fs::create_directories(p);
   return p;
}

std::string slurp(const fs::path& p)
{
   std::ifstream in(p, std::ios::binary);
   std::stringstream ss;
   ss << in.rdbuf();
   return ss.str();
}

std::vector<std::string> lines_of(const std::string& s)
{
   std::vector<std::string> out;
   std::stringstream ss(s);
   std::string line;
   while (std::getline(ss, line)) out.push_back(line);
   return out;
}

QbdConfig parse(const std::string& text)
{
   std::istringstream in(text);
   return parse_qbd_config(in);
}

const char* kRandomWalk = R"(
# reflecting random walk
Am1.min_degree = 0
Am1.coefficients = 0.45
A0.min_degree = -1
A0.coefficients = 0.1, 0.15, 0.1
A0.correction = 1,1,0.1
A1.coefficients = 0.2
newton_steps = 2
)";

} // namespace

TEST_CASE("grid files")
{
   std::mt19937 rng(4);
   const QtMatrix U = random_qt(rng, 3, 8, 2);
   std::ostringstream os;
   write_grid(os, U, 0.1, 2.0, 7);
   const auto lines = lines_of(os.str());
   REQUIRE(lines.size() == 1 + 49);
   CHECK(lines[0] == "# x y u");
   for (std::size_t r = 1; r < lines.size(); ++r) {
      std::istringstream ls(lines[r]);
      double x, y, u;
      std::string extra;
      REQUIRE(static_cast<bool>(ls >> x >> y >> u));
      CHECK_FALSE(static_cast<bool>(ls >> extra));
      CHECK(std::isfinite(u));
      const std::size_t idx = r - 1;
      // Row-major in y: x varies fastest; coordinates print as the lattice i * (L / G).
      char expect[96];
      std::snprintf(expect, sizeof expect, "%.15e %.15e ", (idx % 7) * (2.0 / 7), (idx / 7) * (2.0 / 7));
      CHECK(lines[r].rfind(expect, 0) == 0);
   }
   // A lattice point carries the matrix entry exactly; the axes are zero.
   std::ostringstream one;
   write_grid(one, U, 0.1, 0.4, 2);
   const auto l = lines_of(one.str());
   double x, y, u;
   std::istringstream(l[4]) >> x >> y >> u;
   CHECK(u == doctest::Approx(finite_section(U, 3)(1, 1).real()).epsilon(1e-12));
   std::istringstream(l[1]) >> x >> y >> u;
   CHECK(u == 0.0);
}

TEST_CASE("pde with zero steps writes the zero initial state")
{
   const fs::path dir = fresh_dir("pde0");
   PdeConfig cfg;
   cfg.timesteps = 0;
   cfg.plot_grid = 10;
   cfg.out_dir = dir;
   const PdeResult r = run_pde(cfg);
   CHECK(r.reports.empty());
   CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
   const auto lines = lines_of(slurp(dir / "pde_t0.dat"));
   REQUIRE(lines.size() == 101);
   for (std::size_t i = 1; i < lines.size(); ++i) {
      double x, y, u;
      std::istringstream(lines[i]) >> x >> y >> u;
      CHECK(u == 0.0);
   }
}

TEST_CASE("pde output is deterministic and residual logs are well formed")
{
   PdeConfig cfg;
   cfg.dx = 0.2;
   cfg.dt = 0.1;
   cfg.timesteps = 2;
   cfg.plot_range = 2.0;
   cfg.plot_grid = 8;
   cfg.method = Method::adi;
   cfg.out_dir = fresh_dir("pde_a");
   run_pde(cfg);
   const fs::path first = cfg.out_dir;
   cfg.out_dir = fresh_dir("pde_b");
   run_pde(cfg);
   for (const char* f : {"pde_t0.dat", "pde_t1.dat", "pde_t2.dat", "residual_step1.dat", "residual_step2.dat"}) {
      CAPTURE(f);
      REQUIRE(fs::exists(first / f));
      CHECK(slurp(first / f) == slurp(cfg.out_dir / f));
   }
   for (const char* f : {"residual_step1.dat", "residual_step2.dat"}) {
      int prev = 0;
      for (const auto& line : lines_of(slurp(first / f))) {
         std::istringstream ls(line);
         int it;
         double r;
         std::string extra;
         REQUIRE(static_cast<bool>(ls >> it >> r));
         CHECK_FALSE(static_cast<bool>(ls >> extra));
         CHECK(it > prev);
         prev = it;
      }
   }
}

TEST_CASE("PDE steps converge with Galerkin at dx = dt = 0.05")
{
   PdeConfig cfg;
   cfg.dx = 0.05;
   cfg.dt = 0.05;
   cfg.timesteps = 3;
   cfg.tol = 1e-8;
   const PdeResult r = run_pde(cfg);
   REQUIRE(r.reports.size() == 3);
   for (const auto& rep : r.reports) {
      CHECK(rep.converged());
      CHECK(rep.final_residual() <= 1e-8);
   }
}

TEST_CASE("Hankel origin flag")
{
   CHECK(parse_hankel_origin("listing") == HankelOrigin::listing);
   CHECK(parse_hankel_origin("interior") == HankelOrigin::interior);
   CHECK_THROWS_AS(parse_hankel_origin("middle"), InvalidArgument);
   const Mat a = finite_section(gaussian_source(0.1, HankelOrigin::listing), 4);
   const Mat b = finite_section(gaussian_source(0.1, HankelOrigin::interior), 4);
   // (1,1): 0.1 from the Toeplitz diagonal plus e^0 or e^{-(0.2)^2}.
   CHECK(a(0, 0).real() == doctest::Approx(1.1).epsilon(1e-12));
   CHECK(b(0, 0).real() == doctest::Approx(0.1 + std::exp(-0.04)).epsilon(1e-12));
}

TEST_CASE("manufactured solution and the convergence table")
{
   CHECK(manufactured_solution(0.0, 0.0, 0.0) == 0.0);
   CHECK(manufactured_solution(0.3, 0.3, 1.0) == doctest::Approx((1 - std::exp(-1.0)) * (1 + std::exp(-0.6))));
   CHECK(pde_convergence_error(0.5, {}) == doctest::Approx(0.24185).epsilon(0.02));
   CHECK_THROWS_AS(pde_convergence_error(0.3, {}), InvalidArgument);
}

TEST_CASE("QBD config parsing")
{
   const QbdConfig cfg = parse(kRandomWalk);
   CHECK(cfg.A_zero.min_degree == -1);
   CHECK(cfg.A_zero.coefficients.size() == 3);
   REQUIRE(cfg.A_zero.correction.size() == 1);
   CHECK(std::get<2>(cfg.A_zero.correction[0]) == 0.1);
   CHECK(cfg.newton_steps == 2);
   CHECK_NOTHROW(check_stochastic(cfg));

   CHECK_THROWS_AS(parse("bogus = 1\n"), InvalidArgument);
   CHECK_THROWS_AS(parse("A2.coefficients = 1\n"), InvalidArgument);
   CHECK_THROWS_AS(parse("tol = abc\n"), InvalidArgument);
   CHECK_THROWS_AS(parse("A0.correction = 1,2\n"), InvalidArgument);
   CHECK_THROWS_AS(check_stochastic(parse("Am1.coefficients = 0.5\nA0.coefficients = 0.2\n")), InvalidArgument);
   CHECK_THROWS_AS(check_stochastic(parse("Am1.coefficients = 1.5\nA0.coefficients = -0.5\n")), InvalidArgument);
}

TEST_CASE("QBD with A_1 = 0 is solved by the first iterate")
{
   QbdConfig cfg = parse("Am1.coefficients = 0.5\nA0.min_degree = -1\nA0.coefficients = 0.25, 0, 0.25\nnewton_steps = 1\n");
   const QbdResult r = run_qbd(cfg, {});
   REQUIRE(r.newton_residuals.size() == 2);
   CHECK(r.newton_residuals[0] <= 1e-12);
   CHECK(r.newton_residuals[1] <= 1e-12);
   // X_1 = -(A_0 - I)^{-1} A_{-1}: check (I - A_0) X_1 = A_{-1} on a section.
   const Eigen::Index n = 300, k = 200;
   const Mat lhs = (Mat::Identity(n, n) - finite_section(cfg.A_zero.matrix(), n)) * finite_section(r.X, n);
   CHECK((lhs - finite_section(cfg.A_minus.matrix(), n)).topLeftCorner(k, k).norm() <= 1e-10);
}

TEST_CASE("QBD Newton residual decreases on the random walk")
{
   const QbdConfig cfg = parse(kRandomWalk);
   const QbdResult r = run_qbd(cfg, fresh_dir("qbd"));
   REQUIRE(r.newton_residuals.size() == 3);
   CHECK(r.newton_residuals[1] < r.newton_residuals[0]);
   CHECK(r.newton_residuals[2] < r.newton_residuals[1]);
   for (const auto& rep : r.stein_reports) CHECK(rep.converged());

   // Dense 512-section oracle: F on the leading block, bounded by the QT estimate.
   const Eigen::Index n = 512, k = 400;
   const Mat X = finite_section(r.X, n);
   const Mat F = finite_section(cfg.A_minus.matrix(), n) + finite_section(cfg.A_zero.matrix(), n) * X +
                 finite_section(cfg.A_plus.matrix(), n) * X * X - X;
   const Mat Fk = F.topLeftCorner(k, k);
   CHECK(Fk.cwiseAbs().rowwise().sum().maxCoeff() <= r.newton_residuals.back() * (1 + 1e-8) + 1e-14);
   // Entries of X are a substochastic probability matrix.
   CHECK(X.topLeftCorner(k, k).real().minCoeff() >= -1e-10);
   CHECK(X.topLeftCorner(k, k).cwiseAbs().rowwise().sum().maxCoeff() <= 1.0 + 1e-10);
}
