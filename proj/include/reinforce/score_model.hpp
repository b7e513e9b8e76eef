#pragma once

#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

namespace reinforce {

// Solver invariant violation. Distinct from std::invalid_argument /
// std::domain_error (bad input) so the CLI can map them to different exits.
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Multiset of the principal's entry scores. Ascending, finite, all > 0.
class SupportedSet {
 public:
  explicit SupportedSet(std::vector<double> scores);

  const std::vector<double>& scores() const { return scores_; }
  std::size_t size() const { return scores_.size(); }
  double min_score() const { return scores_.front(); }
  double max_score() const { return scores_.back(); }

 private:
  std::vector<double> scores_;
};

// One entry's score before and after reinforcement.
struct Assignment {
  double original = 0.0;
  double reinforced = 0.0;

  double cost() const { return reinforced - original; }
};

// A complete outcome: one assignment per entry, sorted by (original,
// reinforced), with reinforced >= original > 0.
class ReinforcedSet {
 public:
  explicit ReinforcedSet(std::vector<Assignment> assignments);

  // No-op reinforcement of every entry.
  static ReinforcedSet identity(const SupportedSet& supported);

  const std::vector<Assignment>& assignments() const { return assignments_; }
  std::size_t size() const { return assignments_.size(); }
  double total_cost() const;

 private:
  std::vector<Assignment> assignments_;
};

// Exact complement population: the competitors' scores themselves.
// Ascending, finite, all > 0. cdf(x) = fraction of scores <= x
// (right-continuous, so a tied entry counts as outranking).
class Empirical {
 public:
  explicit Empirical(std::vector<double> scores);

  double cdf(double x) const;
  const std::vector<double>& scores() const { return scores_; }
  std::size_t size() const { return scores_.size(); }
  double max_score() const { return scores_.back(); }
  double min_score() const { return scores_.front(); }

 private:
  std::vector<double> scores_;
};

// Exponential(lambda) complement score distribution, lambda > 0.
struct Exponential {
  double lambda = 1.0;

  explicit Exponential(double lambda);
  double cdf(double x) const;
  double pdf(double x) const;
};

// Log-normal complement score distribution: ln(score) ~ Normal(mu, sigma^2).
struct LogNormal {
  double mu = 0.0;
  double sigma = 1.0;

  LogNormal(double mu, double sigma);
  double cdf(double x) const;
  double pdf(double x) const;
};

// Piecewise-linear cdf given as knots (x, F): x strictly increasing with
// x.front() >= 0, F non-decreasing from exactly 0 to exactly 1. The density
// is the step function of segment slopes.
class PiecewiseLinearCdf {
 public:
  struct Knot {
    double x = 0.0;
    double F = 0.0;
  };

  explicit PiecewiseLinearCdf(std::vector<Knot> knots);

  double cdf(double x) const;
  double pdf(double x) const;
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::vector<Knot> knots_;
};

// The population an entry is ranked against: one concrete law.
class ComplementModel {
 public:
  using Law = std::variant<Empirical, Exponential, LogNormal, PiecewiseLinearCdf>;

  explicit ComplementModel(Law law) : law_(std::move(law)) {}

  double cdf(double x) const;
  // Density at x. The exact law has none; throws std::domain_error there.
  double pdf(double x) const;
  // True for the closed-form laws, false for the exact one.
  bool is_analytic() const;

  const Law& law() const { return law_; }
  // Shortcut for the exact law; nullptr otherwise.
  const Empirical* empirical() const { return std::get_if<Empirical>(&law_); }

 private:
  Law law_;
};

// Slope of the cdf chord between scores z and x: (cdf(x)-cdf(z))/(x-z).
// Requires 0 <= z < x. Solvers reproduce this expression bit for bit.
double chord_gradient(const ComplementModel& model, double z, double x);

// Score of maximal density (analytic laws only).
double mode_score(const ComplementModel& model);

// Supremum of the density (analytic laws only).
double max_density(const ComplementModel& model);

// Mean complement score.
double expectation(const ComplementModel& model);

// Expected rank advantage of one score against a complement draw, in [-1, 1]:
// 2*cdf(score) - 1. Ties count in the principal's favor.
double score_utility(double score, const ComplementModel& model);

// Average score_utility over the entries.
double utility(const SupportedSet& supported, const ComplementModel& model);

// Same, over the reinforced scores.
double utility(const ReinforcedSet& reinforced, const ComplementModel& model);

// Total budget the principal may distribute, in score units. Finite, >= 0.
struct BudgetSpec {
  double total = 0.0;

  explicit BudgetSpec(double total);
};

// Half-open score interval [low, high).
struct Segment {
  double low = 0.0;
  double high = 0.0;
};

}  // namespace reinforce
