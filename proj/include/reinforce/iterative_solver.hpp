#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "reinforce/basic_solver.hpp"
#include "reinforce/score_model.hpp"

namespace reinforce {

// One tie-break spend: `count` entries sitting at `from` were pushed to `to`,
// the top of the collinear chain containing `from`.
struct CollinearPromotion {
  double from = 0.0;
  double to = 0.0;
  long long count = 0;
};

struct ReinforcementPlan {
  ReinforcedSet assignments;
  double budget_total = 0.0;
  double budget_used = 0.0;
  // Slope whose solve produced the plan skeleton; +infinity when no slope
  // applies (zero budget / identity).
  double alpha_final = std::numeric_limits<double>::infinity();
  std::vector<double> targets;
  std::vector<CollinearScore> collinear;
  std::vector<CollinearPromotion> collinear_promotions;
  double utility_before = 0.0;
  double utility_after = 0.0;

  double slack() const { return std::max(0.0, budget_total - budget_used); }

  explicit ReinforcementPlan(ReinforcedSet a) : assignments(std::move(a)) {}
};

// Distance from a collinear score to the top of its collinear chain: walks
// segments [y, h1), [h1, h2), ... while each high end is itself collinear,
// and returns final_high - y. This is the cost quantum for promoting one
// entry off the score y. Errors when y is not collinear in the solution.
double promotion_step_size(const AlphaSolution& solution, double y);

struct KnapsackItem {
  double size = 0.0;
  long long available = 0;
};

// Counts (parallel to items, 0 <= count_i <= available_i) maximizing
// sum(count_i * size_i) subject to the sum not exceeding capacity.
// Exhaustive while the count space is small; beyond that a capacity grid of
// half the smallest size is used, so the fill is maximal up to that grid.
std::vector<long long> bounded_knapsack(double capacity, const std::vector<KnapsackItem>& items);

// Budgeted solve: brackets the slope where the fixed-slope budget crosses
// budget.total (doubling/halving, then binary search that rides next_alpha
// jumps), takes the feasible side, and spends any residual at collinear
// scores in promotion quanta. With an empirical complement and epsilon 0 the
// search terminates exactly and a dynamic-programming pass settles the
// remaining integral tie-breaks, so small instances are exactly optimal.
// epsilon: bracket width at which the slope search stops. Defaults to 0 for
// empirical complements and 1e-9 * max_density(model) for analytic ones;
// analytic laws require epsilon > 0.
ReinforcementPlan iterative_solve(const SupportedSet& supported, const ComplementModel& model,
                                  const BudgetSpec& budget,
                                  std::optional<double> epsilon = std::nullopt);

}  // namespace reinforce
