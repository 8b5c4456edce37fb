#include "qtmat/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "qtmat/errors.hpp"
#include "qtmat/poles.hpp"
#include "qtmat/stein.hpp"
#include "qtmat/sylvester.hpp"

namespace qtmat {

HankelOrigin parse_hankel_origin(const std::string& s)
{
   if (s == "listing") return HankelOrigin::listing;
   if (s == "interior") return HankelOrigin::interior;
   throw InvalidArgument("unknown Hankel origin '" + s + "' (expected listing or interior)");
}

Method parse_method(const std::string& s)
{
   if (s == "adi") return Method::adi;
   if (s == "galerkin") return Method::galerkin;
   throw UnknownMethod("unknown method '" + s + "' (expected adi or galerkin)");
}

QtMatrix heat_step_matrix(double dx, double dt)
{
   return QtMatrix(LaurentSymbol(-1, {-dt, dx * dx / 2 + 2 * dt, -dt}));
}

namespace {

// e^{-(k dx)^2} for k = 0, 1, ... while above sqrt(eps).
std::vector<cplx> gaussian_samples(double dx, int offset = 0)
{
   const double cut = std::sqrt(std::numeric_limits<double>::epsilon());
   std::vector<cplx> out;
   for (int k = offset;; ++k) {
      const double v = std::exp(-std::pow(k * dx, 2));
      if (v <= cut) break;
      out.push_back(v);
   }
   return out;
}

LaurentSymbol even_symbol(const std::vector<cplx>& half)
{
   const int d = static_cast<int>(half.size()) - 1;
   std::vector<cplx> c(2 * half.size() - 1);
   for (int k = -d; k <= d; ++k) c[k + d] = half[std::abs(k)];
   return LaurentSymbol(-d, c);
}

int delta(HankelOrigin o)
{
   return o == HankelOrigin::interior ? 1 : 0;
}

SolveOptions step_options(double tol, Method method)
{
   SolveOptions o;
   o.tol = tol;
   o.method = method;
   o.max_iter = 80;
   return o;
}

std::optional<PoleSequence> step_poles(Method method, const SolveOptions& o)
{
   if (method == Method::galerkin) return extended_poles(o.max_iter);
   return std::nullopt;
}

std::filesystem::path numbered(const std::filesystem::path& dir, const std::string& stem, int k)
{
   return dir / (stem + std::to_string(k) + ".dat");
}

} // namespace

QtMatrix gaussian_source(double dx, HankelOrigin origin)
{
   const std::vector<cplx> fm = gaussian_samples(dx);
   LaurentSymbol t = cplx(0.1) * even_symbol(fm);
   // Hankel entry (i, j) = e^{-((i + j - 2 + 2 delta) dx)^2}, i.e. f_m = e^{-((m - 1 + 2 delta) dx)^2}.
   const std::vector<cplx> f = gaussian_samples(dx, 2 * delta(origin));
   return QtMatrix(t, hankel_correction(f));
}

PdeResult run_pde(const PdeConfig& cfg)
{
   if (!(cfg.dx > 0.0) || !(cfg.dt > 0.0) || cfg.timesteps < 0 || cfg.plot_grid < 1 || !(cfg.plot_range > 0.0))
      throw InvalidArgument("invalid PDE configuration");
   const QtMatrix M = heat_step_matrix(cfg.dx, cfg.dt);
   const QtMatrix F = gaussian_source(cfg.dx, cfg.origin);
   const double h2 = cfg.dx * cfg.dx;
   const SolveOptions opts = step_options(cfg.tol, cfg.method);
   const auto poles = step_poles(cfg.method, opts);

   if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
   PdeResult out;
   if (!cfg.out_dir.empty()) write_grid(numbered(cfg.out_dir, "pde_t", 0), out.U, cfg.dx, cfg.plot_range, cfg.plot_grid);
   for (int k = 1; k <= cfg.timesteps; ++k) {
      const QtMatrix C = scale(-1.0, add(scale(h2, out.U), scale(h2 * cfg.dt, F)));
      SylvesterSolution sol;
      try {
         sol = solve_sylvester(M, M, C, opts, poles);
      } catch (const Error& e) {
         throw Error("time step " + std::to_string(k) + ": " + e.what());
      }
      if (!sol.report.converged())
         throw NoConvergence("time step " + std::to_string(k) + ": residual " + std::to_string(sol.report.final_residual()));
      out.U = sol.X;
      out.reports.push_back(sol.report);
      if (!cfg.out_dir.empty()) {
         write_grid(numbered(cfg.out_dir, "pde_t", k), out.U, cfg.dx, cfg.plot_range, cfg.plot_grid);
         write_residual_log(numbered(cfg.out_dir, "residual_step", k), sol.report);
      }
   }
   return out;
}

void write_grid(std::ostream& os, const QtMatrix& U, double dx, double range, int grid)
{
   const double step = range / grid;
   const auto nodes = static_cast<Eigen::Index>(std::floor(range / dx)) + 2;
   const Mat W = finite_section(U, nodes);
   // Nodal value at (p dx, q dx); zero on the boundary p = 0 or q = 0.
   auto node = [&](Eigen::Index p, Eigen::Index q) -> double {
      if (p <= 0 || q <= 0 || p > nodes || q > nodes) return 0.0;
      return W(p - 1, q - 1).real();
   };
   char buf[128];
   os << "# x y u\n";
   for (int jy = 0; jy < grid; ++jy) {
      const double y = jy * step;
      for (int ix = 0; ix < grid; ++ix) {
         const double x = ix * step;
         const double px = x / dx, py = y / dx;
         const auto p = static_cast<Eigen::Index>(std::floor(px));
         const auto q = static_cast<Eigen::Index>(std::floor(py));
         const double fx = px - p, fy = py - q;
         const double v = (1 - fx) * (1 - fy) * node(p, q) + fx * (1 - fy) * node(p + 1, q) +
                          (1 - fx) * fy * node(p, q + 1) + fx * fy * node(p + 1, q + 1);
         std::snprintf(buf, sizeof buf, "%.15e %.15e %.15e\n", x, y, v);
         os << buf;
      }
   }
}

void write_grid(const std::filesystem::path& path, const QtMatrix& U, double dx, double range, int grid)
{
   std::ofstream os(path);
   if (!os) throw InvalidArgument("cannot write " + path.string());
   write_grid(os, U, dx, range, grid);
}

void write_residual_log(const std::filesystem::path& path, const SolveReport& report)
{
   std::ofstream os(path);
   if (!os) throw InvalidArgument("cannot write " + path.string());
   char buf[64];
   for (const auto& e : report.residual_history) {
      std::snprintf(buf, sizeof buf, "%d %.15e\n", e.iteration, e.residual);
      os << buf;
   }
}

double manufactured_solution(double x, double y, double t)
{
   return (1.0 - std::exp(-t)) * (std::exp(-(x - y) * (x - y)) + std::exp(-x - y));
}

namespace {

// Samples of a decaying sequence until they drop below 1e-17 of the first.
Mat decaying_column(const std::function<double(int)>& f)
{
   std::vector<double> v;
   const double f0 = std::abs(f(1));
   for (int i = 1;; ++i) {
      const double x = f(i);
      if (std::abs(x) <= 1e-17 * f0 && i > 2) break;
      v.push_back(x);
   }
   Mat m(static_cast<Eigen::Index>(v.size()), 1);
   for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
   return m;
}

// Source of the manufactured problem at time t on the grid i h, i >= 1:
// Toeplitz part e^{-(kh)^2} (e^{-t} + 4 s (1 - 2 (kh)^2)) and the rank-one
// term (3 e^{-t} - 2) e^{-x-y}.
QtMatrix manufactured_source(double h, double t, int d)
{
   const double s = 1.0 - std::exp(-t), et = std::exp(-t);
   std::vector<cplx> half;
   for (int k = 0;; ++k) {
      const double r2 = std::pow(k * h, 2);
      const double g = std::exp(-r2);
      if (g * (1.0 + 2.0 * r2) <= 1e-17) break;
      half.push_back(g * (et + 4.0 * s * (1.0 - 2.0 * r2)));
   }
   const Mat w = decaying_column([&](int i) { return std::exp(-(i - 1 + d) * h); });
   return QtMatrix(even_symbol(half), Correction((3.0 * et - 2.0) * w, w));
}

// Dirichlet data next to the first row and column: e_1 g^T + g e_1^T.
Correction manufactured_boundary(double h, double t, int d)
{
   const Mat g = decaying_column([&](int j) { return manufactured_solution(0.0, (j - 1 + d) * h, t); });
   Mat e1 = Mat::Zero(1, 1);
   e1(0, 0) = 1.0;
   return Correction(e1, g) + Correction(g, e1);
}

} // namespace

double pde_convergence_error(double h, const ConvergenceOptions& opts)
{
   if (!(h > 0.0)) throw InvalidArgument("step must be positive");
   const long steps = std::lround(opts.t_final / h);
   if (steps < 1 || std::abs(steps * h - opts.t_final) > 1e-9 * opts.t_final)
      throw InvalidArgument("step " + std::to_string(h) + " does not divide the final time");
   const int d = delta(opts.origin);
   const double dt = h, h2 = h * h;
   const QtMatrix M = heat_step_matrix(h, dt);
   const SolveOptions so = step_options(opts.tol, opts.method);
   const auto poles = step_poles(opts.method, so);

   QtMatrix U;
   for (long n = 1; n <= steps; ++n) {
      const double t = n * dt;
      const QtMatrix F = manufactured_source(h, t, d);
      const QtMatrix B(LaurentSymbol(), manufactured_boundary(h, t, d));
      const QtMatrix C = scale(-1.0, add(add(scale(h2, U), scale(h2 * dt, F)), scale(dt, B)));
      SylvesterSolution sol;
      try {
         sol = solve_sylvester(M, M, C, so, poles);
      } catch (const Error& e) {
         throw Error("h = " + std::to_string(h) + ", step " + std::to_string(n) + ": " + e.what());
      }
      U = sol.X;
   }

   const double t = steps * dt;
   const double s = 1.0 - std::exp(-t);
   const Eigen::Index n = std::max({U.correction.row_support(), U.correction.col_support(),
                                    static_cast<Eigen::Index>(U.symbol.bandwidth())}) + 16;
   const Mat W = finite_section(U, n);
   double err = 0.0;
   for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
         err = std::max(err, std::abs(W(i, j) - manufactured_solution((i + 1) * h, (j + 1) * h, t)));
   // Far from the corner only the Toeplitz part remains.
   for (int k = U.symbol.min_degree(); k <= U.symbol.max_degree(); ++k)
      err = std::max(err, std::abs(U.symbol[k] - s * std::exp(-std::pow(k * h, 2))));
   return err;
}

QtMatrix LevelSymbol::matrix() const
{
   std::vector<cplx> c(coefficients.begin(), coefficients.end());
   std::vector<std::tuple<int, int, cplx>> e;
   for (const auto& [i, j, v] : correction) e.emplace_back(i, j, v);
   return QtMatrix(LaurentSymbol(min_degree, c), e.empty() ? Correction() : Correction::from_entries(e));
}

namespace {

std::string trim(const std::string& s)
{
   const auto a = s.find_first_not_of(" \t\r");
   if (a == std::string::npos) return {};
   const auto b = s.find_last_not_of(" \t\r");
   return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
   std::vector<std::string> out;
   std::stringstream ss(s);
   std::string item;
   while (std::getline(ss, item, sep))
      if (!trim(item).empty()) out.push_back(trim(item));
   return out;
}

double to_double(const std::string& s, const std::string& key)
{
   try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
   } catch (const std::exception&) {
      throw InvalidArgument("config key '" + key + "': not a number: " + s);
   }
}

int to_int(const std::string& s, const std::string& key)
{
   const double v = to_double(s, key);
   if (v != std::floor(v)) throw InvalidArgument("config key '" + key + "': not an integer: " + s);
   return static_cast<int>(v);
}

} // namespace

QbdConfig parse_qbd_config(std::istream& in)
{
   QbdConfig cfg;
   std::string line;
   int lineno = 0;
   while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));

      const auto dot = key.find('.');
      if (dot != std::string::npos) {
         const std::string block = key.substr(0, dot), field = key.substr(dot + 1);
         LevelSymbol* target = block == "Am1" ? &cfg.A_minus : block == "A0" ? &cfg.A_zero : block == "A1" ? &cfg.A_plus : nullptr;
         if (!target) throw InvalidArgument("config key '" + key + "': unknown block");
         if (field == "min_degree") {
            target->min_degree = to_int(value, key);
         } else if (field == "coefficients") {
            target->coefficients.clear();
            for (const auto& v : split(value, ',')) target->coefficients.push_back(to_double(v, key));
         } else if (field == "correction") {
            target->correction.clear();
            for (const auto& entry : split(value, ';')) {
               const auto parts = split(entry, ',');
               if (parts.size() != 3) throw InvalidArgument("config key '" + key + "': entries are i,j,v");
               target->correction.emplace_back(to_int(parts[0], key), to_int(parts[1], key), to_double(parts[2], key));
            }
         } else {
            throw InvalidArgument("config key '" + key + "': unknown field");
         }
      } else if (key == "newton_steps") {
         cfg.newton_steps = to_int(value, key);
      } else if (key == "method") {
         cfg.method = value;
      } else if (key == "tol") {
         cfg.tol = to_double(value, key);
      } else if (key == "max_iter") {
         cfg.max_iter = to_int(value, key);
      } else if (key == "norm") {
         if (value == "2") cfg.norm = Norm::two;
         else if (value == "inf") cfg.norm = Norm::inf;
         else throw InvalidArgument("config key 'norm': expected 2 or inf");
      } else {
         throw InvalidArgument("unknown config key '" + key + "'");
      }
   }
   return cfg;
}

QbdConfig load_qbd_config(const std::filesystem::path& path)
{
   std::ifstream in(path);
   if (!in) throw InvalidArgument("cannot read " + path.string());
   return parse_qbd_config(in);
}

void check_stochastic(const QbdConfig& cfg)
{
   double total = 0.0;
   for (const LevelSymbol* s : {&cfg.A_minus, &cfg.A_zero, &cfg.A_plus}) {
      for (double c : s->coefficients) {
         if (c < 0.0) throw InvalidArgument("QBD coefficients must be nonnegative");
         total += c;
      }
      for (const auto& [i, j, v] : s->correction)
         if (v < 0.0) throw InvalidArgument("QBD correction entries must be nonnegative");
   }
   if (std::abs(total - 1.0) > 1e-12)
      throw InvalidArgument("QBD symbols must sum to 1 at z = 1 (got " + std::to_string(total) + ")");
}

QtMatrix qbd_residual(const QbdConfig& cfg, const QtMatrix& X)
{
   const QtMatrix Am = cfg.A_minus.matrix(), A0 = cfg.A_zero.matrix(), A1 = cfg.A_plus.matrix();
   const QtMatrix XX = multiply(X, X);
   return subtract(add(add(Am, multiply(A0, X)), multiply(A1, XX)), X);
}

QbdResult run_qbd(const QbdConfig& cfg, const std::filesystem::path& out_dir)
{
   check_stochastic(cfg);
   const QtMatrix I = QtMatrix::identity();
   const QtMatrix Am = cfg.A_minus.matrix(), A0 = cfg.A_zero.matrix(), A1 = cfg.A_plus.matrix();
   SolveOptions opts;
   opts.tol = cfg.tol;
   opts.max_iter = cfg.max_iter;
   opts.norm = cfg.method == "galerkin" ? Norm::two : cfg.norm;
   if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

   QbdResult out;
   try {
      out.X = multiply(qt_inverse(subtract(I, A0)), Am);
   } catch (const Error& e) {
      throw Error(std::string("initial iterate: ") + e.what());
   }
   for (int k = 1; k <= cfg.newton_steps; ++k) {
      const QtMatrix F = qbd_residual(cfg, out.X);
      out.newton_residuals.push_back(norm_estimate(F, cfg.norm));
      try {
         const QtMatrix K = subtract(add(A0, multiply(A1, out.X)), I);
         const QtMatrix Kinv = qt_inverse(K);
         const QtMatrix Ms = multiply(Kinv, A1);
         const QtMatrix C = multiply(Kinv, F);
         const SteinSolution sol = solve_stein(Ms, out.X, C, cfg.method, opts);
         out.stein_reports.push_back(sol.report);
         if (!out_dir.empty()) write_residual_log(numbered(out_dir, "qbd_newton", k), sol.report);
         out.X = add(out.X, sol.X);
      } catch (const Error& e) {
         throw Error("Newton step " + std::to_string(k) + ": " + e.what());
      }
   }
   out.newton_residuals.push_back(norm_estimate(qbd_residual(cfg, out.X), cfg.norm));
   return out;
}

} // namespace qtmat
