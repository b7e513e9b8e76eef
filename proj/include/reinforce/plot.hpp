#pragma once

#include <string>

#include "reinforce/io.hpp"

namespace reinforce {

// Check that a plan belongs to an instance: the plan's pre-reinforcement
// scores must equal the instance's supported multiset, and a stored (finite)
// utility_before must agree with recomputation to 1e-12. Throws
// std::invalid_argument naming the mismatch.
void validate_plan_matches(const Instance& instance, const ReinforcementPlan& plan);

// Deterministic 960x720 SVG with two stacked panels sharing the score axis.
// Top: the complement cdf with the plan's reinforcement geometry recomputed
// at its final slope: one line of class "chord" per reinforced interval plus
// a bar of class "segment" for the interval itself. Bottom: the principal's
// own cdf before and after the plan, the moved mass shaded via rects of
// class "reinforced-area" (absent when the plan moves nothing).
std::string render_plot_svg(const Instance& instance, const ReinforcementPlan& plan);

// The same series as rows "series,x,y": the complement curve, both principal
// curves, and per-interval chord/segment/target rows.
std::string render_plot_csv(const Instance& instance, const ReinforcementPlan& plan);

}  // namespace reinforce
