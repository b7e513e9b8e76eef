#include "reinforce/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace reinforce {
namespace {

constexpr long long kPlanCap = 1000;

// Smallest power of ten (up to 1e6) putting every value on an integer grid;
// -1 when there is none.
int grid_exponent(const std::vector<const std::vector<double>*>& groups) {
  for (int k = 0; k <= 6; ++k) {
    const double scale = std::pow(10.0, k);
    bool ok = true;
    for (const auto* g : groups) {
      for (double v : *g) {
        const double sv = v * scale;
        if (std::fabs(sv - std::llround(sv)) > 1e-9 * std::max(1.0, std::fabs(sv))) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return k;
  }
  return -1;
}

}  // namespace

Rational make_rational(long long num, long long den) {
  if (den == 0) throw std::domain_error("make_rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den == 0 ? 1 : den};
}

Rational sign_sum_utility(const std::vector<double>& principal,
                          const std::vector<double>& complement) {
  if (principal.empty() || complement.empty())
    throw std::domain_error("sign_sum_utility: inputs must be non-empty");
  long long sum = 0;
  for (double a : principal)
    for (double c : complement) sum += (a >= c) ? 1 : -1;
  return make_rational(sum, static_cast<long long>(principal.size()) *
                                static_cast<long long>(complement.size()));
}

OracleResult oracle_solve(const SupportedSet& supported, const ComplementModel& model,
                          const BudgetSpec& budget, const std::vector<double>& extra_targets) {
  const Empirical* emp = model.empirical();
  if (!emp) throw std::domain_error("oracle_solve: complement must be empirical");
  const std::vector<double>& sup = supported.scores();
  std::vector<double> comp_distinct = emp->scores();
  comp_distinct.erase(std::unique(comp_distinct.begin(), comp_distinct.end()),
                      comp_distinct.end());
  if (sup.size() > 6)
    throw std::domain_error("oracle_solve: more than 6 supported entries");
  if (comp_distinct.size() > 8)
    throw std::domain_error("oracle_solve: more than 8 distinct complement scores");
  for (double t : extra_targets)
    if (!std::isfinite(t) || t <= 0.0)
      throw std::domain_error("oracle_solve: extra targets must be positive and finite");

  const int k = grid_exponent({&sup, &comp_distinct, &extra_targets});
  if (k < 0) throw std::domain_error("oracle_solve: scores do not fit a 1e-6 integer grid");
  const double scale = std::pow(10.0, k);
  const auto to_int = [&](double v) { return std::llround(v * scale); };
  const double scaled_budget = budget.total * scale;
  const long long ibudget =
      static_cast<long long>(std::floor(scaled_budget + 1e-9 * std::max(1.0, scaled_budget)));

  // Candidate target values: distinct complement scores plus extras, with
  // their unscaled doubles kept for plan reconstruction.
  std::vector<std::pair<long long, double>> targets;
  for (double c : comp_distinct) targets.push_back({to_int(c), c});
  for (double t : extra_targets) targets.push_back({to_int(t), t});
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                targets.end());

  // Full complement multiset as integers, for exact win counting.
  std::vector<long long> comp_all;
  for (double c : emp->scores()) comp_all.push_back(to_int(c));

  struct Choice {
    long long cost = 0;
    long long sign_sum = 0;  // pairwise sign contribution of this entry
    double score = 0.0;
  };
  const long long m = static_cast<long long>(comp_all.size());
  std::vector<std::vector<Choice>> choices(sup.size());
  for (std::size_t i = 0; i < sup.size(); ++i) {
    const long long own = to_int(sup[i]);
    const auto add = [&](long long v, double d) {
      const long long wins =
          std::upper_bound(comp_all.begin(), comp_all.end(), v) - comp_all.begin();
      choices[i].push_back({v - own, 2 * wins - m, d});
    };
    add(own, sup[i]);
    for (const auto& [tv, td] : targets)
      if (tv > own) add(tv, td);
    std::sort(choices[i].begin(), choices[i].end(),
              [](const Choice& a, const Choice& b) { return a.cost < b.cost; });
  }

  OracleResult result;
  long long best = std::numeric_limits<long long>::min();
  std::vector<const Choice*> current(sup.size());
  std::vector<std::vector<const Choice*>> best_assignments;

  const auto dfs = [&](auto&& self, std::size_t i, long long spent, long long sum) -> void {
    if (i == sup.size()) {
      ++result.explored;
      if (sum > best) {
        best = sum;
        best_assignments.clear();
      }
      if (sum == best && static_cast<long long>(best_assignments.size()) < kPlanCap)
        best_assignments.push_back(
            std::vector<const Choice*>(current.begin(), current.end()));
      return;
    }
    for (const Choice& c : choices[i]) {
      if (spent + c.cost > ibudget) break;  // choices ascend in cost
      current[i] = &c;
      self(self, i + 1, spent + c.cost, sum + c.sign_sum);
    }
  };
  dfs(dfs, 0, 0, 0);

  if (best_assignments.empty())
    throw internal_error("oracle_solve: no feasible assignment (identity should always fit)");

  result.best_utility = make_rational(best, static_cast<long long>(sup.size()) * m);
  for (const auto& asg : best_assignments) {
    std::vector<Assignment> plan;
    plan.reserve(sup.size());
    for (std::size_t i = 0; i < sup.size(); ++i) plan.push_back({sup[i], asg[i]->score});
    result.best_plans.emplace_back(std::move(plan));
  }
  return result;
}

}  // namespace reinforce
