#pragma once

#include <vector>

#include "reinforce/score_model.hpp"

namespace reinforce {

// Exact fraction, normalized so den > 0 and gcd(|num|, den) == 1.
struct Rational {
  long long num = 0;
  long long den = 1;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

Rational make_rational(long long num, long long den);

// Average pairwise sign comparison, ties in the principal's favor:
// sum of sign(a - c) over all pairs, divided by n*m, as an exact fraction.
Rational sign_sum_utility(const std::vector<double>& principal,
                          const std::vector<double>& complement);

struct OracleResult {
  Rational best_utility;
  // Every enumerated plan achieving best_utility within budget (capped at
  // 1000 plans; ties beyond the cap are dropped, never the optimum itself).
  std::vector<ReinforcedSet> best_plans;
  // Complete assignments evaluated; cost-pruned branches are not counted.
  long long explored = 0;
};

// Ground-truth reference: enumerates every assignment of entries to
// {own score} union {complement scores at or above it} (plus any
// extra_targets), keeps the budget-feasible ones, and returns the exact
// optimum. Guarded to tiny instances: at most 6 entries and 8 distinct
// complement scores, all scores on a 1e-6 grid so costs scale to integers.
OracleResult oracle_solve(const SupportedSet& supported, const ComplementModel& model,
                          const BudgetSpec& budget,
                          const std::vector<double>& extra_targets = {});

}  // namespace reinforce
