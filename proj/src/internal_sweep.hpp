#pragma once

// Shared sweep machinery for the fixed-slope solvers. Everything here is an
// implementation detail of the library; the public surface lives in
// include/reinforce/.

#include <cstddef>
#include <limits>
#include <vector>

#include "reinforce/basic_solver.hpp"
#include "reinforce/score_model.hpp"

namespace reinforce::detail {

// Precomputed tables reused across many sweeps of one instance. The chord
// values derived from pts_cdf are bitwise-identical to chord_gradient() on
// the same scores, which the collinearity logic relies on.
struct SweepContext {
  const ComplementModel* model = nullptr;
  std::vector<double> sup;         // supported multiset, ascending
  std::vector<double> sup_prefix;  // prefix sums of sup, size n+1
  // Exact-law tables (left empty for analytic laws):
  std::vector<double> pts;      // distinct scores (complement or supported), ascending
  std::vector<double> pts_cdf;  // complement cdf at pts
  std::vector<unsigned char> pts_comp;  // pts membership: complement score
  std::vector<int> cand_pos;            // indices into pts of complement scores, ascending
};

SweepContext make_context(const SupportedSet& supported, const ComplementModel& model);

struct TraceInfo {
  double value = 0.0;
  bool collinear = false;
  CollinearKind kind = CollinearKind::Target;
  double anchor_chord = -1.0;  // accepted chord slope; < 0 when none qualified
};

// Highest index into ctx.pts, at or below start_hint, whose score is < x and
// whose chord to x is at most alpha*(1+tol); -1 when none. start_hint lets a
// descending sweep amortize the scan.
int find_anchor(const SweepContext& ctx, double alpha, double x, double tol, int start_hint);

// Exact-law trace at x. zero_fallback selects what happens when no score
// anchors the chord line: the sweep's hard floor (0) or the geometric meet
// with the cdf's zero level, max(x - cdf(x)/alpha, 0).
TraceInfo exact_trace(const SweepContext& ctx, double alpha, double x, double tol,
                      bool zero_fallback);

// Analytic-law trace at x: maximal z < x where the line of slope alpha
// through (x, cdf(x)) meets the cdf, located by bracketing the sign changes
// of line-minus-cdf between density-equals-alpha roots and knots, then
// bisecting. Returns x when the cdf coincides with the line immediately left
// of x, and 0 when the line never meets the cdf over (0, x).
TraceInfo analytic_trace(const ComplementModel& model, const std::vector<double>& sup,
                         const std::vector<double>& cands, double alpha, double x,
                         double tol);

struct SweepOutcome {
  std::vector<double> targets;
  std::vector<Segment> segments;
  std::vector<CollinearScore> collinear;
  std::vector<double> reinforced;  // parallel to ctx.sup; filled when want_plan
  double budget = 0.0;
  double raw_next = 0.0;
  double last_trace = std::numeric_limits<double>::infinity();
};

// One full descending sweep at the given slope. want_plan controls whether
// the per-entry reinforced scores are materialized (the budget is computed
// from prefix sums either way).
SweepOutcome sweep(const SweepContext& ctx, double alpha, double tol, bool want_plan);

// Budget and raw next-slope only; the cheap probe used by bracketing loops.
double sweep_budget(const SweepContext& ctx, double alpha, double tol, double* raw_next);

}  // namespace reinforce::detail
