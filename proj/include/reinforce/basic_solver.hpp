#pragma once

#include <limits>
#include <vector>

#include "reinforce/score_model.hpp"

namespace reinforce {

// How a score ended up exactly on a chord line: it is either a candidate
// target (complement-side) or a supported entry (principal-side).
enum class CollinearKind { Target, Source };

struct CollinearScore {
  double score = 0.0;
  CollinearKind kind = CollinearKind::Target;
};

struct BasicSolveOptions {
  // Relative tolerance for chord-vs-alpha comparisons: slopes within
  // chord_tolerance*alpha of alpha count as equal and mark collinearity.
  double chord_tolerance = 1e-9;
  // When true, next_alpha is refined past structural changes that leave the
  // budget untouched, so it reports the slope below which the budget really
  // grows. The raw sweep value is kept when false (cheaper; used internally).
  bool refine_next = true;
};

// Everything the fixed-slope solve produces for one alpha.
struct AlphaSolution {
  double alpha = 0.0;
  // Every candidate score the sweep processed, descending.
  std::vector<double> targets;
  // Reinforced intervals [low, high), descending by high; high is always a
  // member of targets; degenerate (low == high) intervals are dropped.
  std::vector<Segment> segments;
  ReinforcedSet plan;
  // Total score units the plan adds across all entries.
  double budget_used = 0.0;
  // Scores sitting exactly on a chord line, ascending. Entries there are
  // deliberately left alone here; spending budget on them is a tie-break
  // that belongs to the budgeted solver.
  std::vector<CollinearScore> collinear;
  // Largest slope below alpha at which the solution changes (see
  // BasicSolveOptions::refine_next); 0 when nothing changes below alpha.
  // Equals alpha itself in the degenerate case where alpha ties a chord.
  double next_alpha = 0.0;
  // Trace of the lowest processed target; +infinity if none was processed.
  double last_trace = std::numeric_limits<double>::infinity();

  explicit AlphaSolution(ReinforcedSet p) : plan(std::move(p)) {}
};

// Scores that can receive reinforcement at slope alpha, descending.
// Exact law: every distinct complement score (alpha-independent).
// Exponential(lambda): {ln(lambda/alpha)/lambda} when alpha < lambda, else {}.
// LogNormal: the density-equals-alpha root at or above the mode, when any.
// PiecewiseLinearCdf: right endpoints of pieces with slope >= alpha followed
// by a piece (or the flat tail) of slope <= alpha.
std::vector<double> candidate_targets(const ComplementModel& model, double alpha);

// Where the line of slope alpha through (x, cdf(x)) first meets the
// complement cdf when walking left from x: the anchor formula
// x - (x - z)*C_z^x/alpha for the highest score z < x (complement or
// supported) whose chord to x is at most alpha, the zero-level meet
// x - cdf(x)/alpha when every such chord is steeper (clamped at 0), and x
// itself when the cdf coincides with the line on a left-neighborhood.
double trace(const ComplementModel& model, const SupportedSet& supported,
             double alpha, double x, double chord_tolerance = 1e-9);

// Fixed-slope solve: sweep candidate targets from the top, reinforcing the
// entries strictly inside each [trace, target) interval up to the target.
AlphaSolution basic_solve(const SupportedSet& supported, const ComplementModel& model,
                          double alpha, const BasicSolveOptions& opts = {});

struct BudgetCurvePoint {
  double alpha = 0.0;
  double budget_used = 0.0;
  double next_alpha = 0.0;
};

// basic_solve projected over many slopes; rows sorted by alpha descending.
std::vector<BudgetCurvePoint> budget_curve(const SupportedSet& supported,
                                           const ComplementModel& model,
                                           std::vector<double> alphas,
                                           const BasicSolveOptions& opts = {});

}  // namespace reinforce
