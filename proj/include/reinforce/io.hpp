#pragma once

#include <optional>
#include <string>

#include "reinforce/iterative_solver.hpp"
#include "reinforce/score_model.hpp"

namespace reinforce {

// One problem statement as read from an instance file. A per-entry budget in
// the file is folded into the total here, so downstream code sees one number.
struct Instance {
  SupportedSet supported;
  ComplementModel complement;
  BudgetSpec budget;
  std::optional<double> epsilon;
};

// Which engine produced a plan; serialized into the plan document.
enum class SolverKind { Iterative, Unimodal, Oracle };

const char* solver_kind_name(SolverKind kind);

// A plan document as stored on disk: the plan plus its producing solver.
struct PlanDocument {
  ReinforcementPlan plan;
  SolverKind solver = SolverKind::Iterative;
};

// Parse an instance from JSON text. Throws std::invalid_argument with a
// message naming the offending field when the document is malformed.
Instance parse_instance(const std::string& json_text);

// parse_instance over a file's contents; unreadable paths are reported as
// std::invalid_argument too.
Instance read_instance_file(const std::string& path);

// Serialize a plan (with its producing solver) to indented JSON. Numbers are
// written with 17 significant digits so parsing the text back reproduces
// every double bit for bit; non-finite values (the identity plan's slope,
// the fast path's unset utilities) are written as null.
std::string plan_to_json(const ReinforcementPlan& plan, SolverKind solver);

// Inverse of plan_to_json, with the same diagnostic contract as
// parse_instance. null slopes come back as +infinity, null utilities as NaN.
PlanDocument parse_plan(const std::string& json_text);

PlanDocument read_plan_file(const std::string& path);

}  // namespace reinforce
