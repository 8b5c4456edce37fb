#pragma once

#include <vector>

#include "qtmat/types.hpp"

namespace qtmat {

/// Finite complex pole or the point at infinity.
struct Pole {
   cplx value = 0.0;
   bool infinite = false;

   static Pole at(cplx v) { return {v, false}; }
   static Pole infinity() { return {0.0, true}; }
};

/// ADI parameters of one step: zero alpha of r_k, pole beta of r_k.
struct ShiftPair {
   Pole alpha;
   Pole beta;
};

struct PoleSequence {
   std::vector<ShiftPair> pairs;

   bool empty() const { return pairs.empty(); }
   std::size_t size() const { return pairs.size(); }
   /// Pair j (0-based), cycling through the sequence.
   const ShiftPair& cycled(std::size_t j) const { return pairs[j % pairs.size()]; }
   /// True when the sequence alternates infinite and zero poles.
   bool is_extended() const;
};

/// Zolotarev-optimal shifts for spectra in [a, b] and [-b, -a]:
/// alpha_j = b dn((2j - 1) K / (2k), kappa), beta_j = -alpha_j, kappa = sqrt(1 - (a/b)^2).
PoleSequence zolotarev_poles(double a, double b, int k);

/// Asymptotic ADI rate exp(-pi^2 / log(4 b / a)).
double zolotarev_rate(double a, double b);

/// Logarithmically spaced shifts in [a, b].
PoleSequence log_spaced_poles(double a, double b, int k);

/// The same pair repeated k times.
PoleSequence constant_poles(cplx alpha, cplx beta, int k);

/// Extended Krylov poles {inf, 0, inf, 0, ...}, k pairs.
PoleSequence extended_poles(int k);

} // namespace qtmat
