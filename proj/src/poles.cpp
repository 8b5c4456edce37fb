#include "qtmat/poles.hpp"

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <cmath>
#include <numbers>

#include "qtmat/errors.hpp"

namespace qtmat {

bool PoleSequence::is_extended() const
{
   if (pairs.size() < 2) return false;
   for (std::size_t j = 0; j < pairs.size(); ++j) {
      const Pole& p = pairs[j].beta;
      const bool want_inf = (j % 2 == 0) == pairs[0].beta.infinite;
      if (want_inf != p.infinite) return false;
      if (!p.infinite && p.value != cplx(0.0)) return false;
   }
   return true;
}

namespace {

void check_interval(double a, double b, int k)
{
   if (!(a > 0.0) || !(b > a)) throw InvalidInterval("need 0 < a < b");
   if (k < 1) throw InvalidArgument("number of shifts must be positive");
}

} // namespace

PoleSequence zolotarev_poles(double a, double b, int k)
{
   check_interval(a, b, k);
   const double ratio = a / b;
   const double kappa = std::sqrt((1.0 - ratio) * (1.0 + ratio));
   const double K = boost::math::ellint_1(kappa);
   PoleSequence out;
   for (int j = 1; j <= k; ++j) {
      const double u = (2.0 * j - 1.0) * K / (2.0 * k);
      const double alpha = b * boost::math::jacobi_dn(kappa, u);
      out.pairs.push_back({Pole::at(alpha), Pole::at(-alpha)});
   }
   return out;
}

double zolotarev_rate(double a, double b)
{
   check_interval(a, b, 1);
   return std::exp(-std::numbers::pi * std::numbers::pi / std::log(4.0 * b / a));
}

PoleSequence log_spaced_poles(double a, double b, int k)
{
   check_interval(a, b, k);
   PoleSequence out;
   for (int j = 0; j < k; ++j) {
      const double t = k == 1 ? 0.5 : static_cast<double>(j) / (k - 1);
      const double alpha = a * std::pow(b / a, t);
      out.pairs.push_back({Pole::at(alpha), Pole::at(-alpha)});
   }
   return out;
}

PoleSequence constant_poles(cplx alpha, cplx beta, int k)
{
   PoleSequence out;
   out.pairs.assign(static_cast<std::size_t>(k), {Pole::at(alpha), Pole::at(beta)});
   return out;
}

PoleSequence extended_poles(int k)
{
   PoleSequence out;
   for (int j = 0; j < k; ++j) {
      const Pole p = j % 2 == 0 ? Pole::infinity() : Pole::at(0.0);
      out.pairs.push_back({p, p});
   }
   return out;
}

} // namespace qtmat
