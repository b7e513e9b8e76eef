#pragma once

#include <reinforce/iterative_solver.hpp>
#include <reinforce/score_model.hpp>

namespace reinforce {

// Shape summary of an analytic complement law whose density has one peak.
struct UnimodalProfile {
  double mode = 0.0;  // score with the maximal density; 0 for decreasing laws
  double density_at_mode = 0.0;
  const ComplementModel* model = nullptr;
};

// Profile for the exponential / log-normal families. Empirical and
// piecewise-linear models have no single-peak density to exploit; they throw
// std::domain_error pointing the caller at iterative_solve.
UnimodalProfile unimodal_profile(const ComplementModel& model);

// Closed-form water fill for a complement whose density decreases on
// [0, inf): raises the lowest m entries to the common level h that spends the
// budget exactly. The plan is the same for every decreasing law, so no model
// is taken and utility_before/utility_after are NaN; solve_unimodal fills
// them when called with a concrete law.
ReinforcementPlan solve_decreasing(const SupportedSet& supported, const BudgetSpec& budget);

// The score l below the mode where the chord from (l, F(l)) to (h, F(h)) has
// slope exactly f(h), found by bisection to 1e-10 relative, or 0 when the
// chord from the origin is already steeper than the tangent. h must lie
// strictly above the mode.
double solve_chord_tangency(const ComplementModel& model, double h);

// Largest h for which solve_chord_tangency has a positive solution; 0 for
// decreasing laws, where no h qualifies.
double chord_tangency_threshold(const ComplementModel& model);

// Single-target solver for unimodal analytic complements: finds the target
// h >= mode whose capture interval (l, h) spends the budget, raising every
// entry inside the interval to h. When l lands exactly on a supported score
// the budget may not be exactly reachable; whole promotion steps l -> h are
// bought while they fit. Decreasing laws delegate to solve_decreasing.
ReinforcementPlan solve_unimodal(const SupportedSet& supported, const ComplementModel& model,
                                 const BudgetSpec& budget);

}  // namespace reinforce
