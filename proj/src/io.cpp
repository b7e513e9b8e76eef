#include "reinforce/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reinforce {
namespace {

using nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& message) { throw std::invalid_argument(message); }

ordered_json parse_text(const std::string& json_text, const char* what) {
  try {
    return ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    bad(std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void reject_unknown_fields(const ordered_json& object, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    bool known = false;
    for (const char* name : allowed) {
      if (it.key() == name) {
        known = true;
        break;
      }
    }
    if (!known) bad(where + ": unknown field '" + it.key() + "'");
  }
}

const ordered_json& require_field(const ordered_json& object, const std::string& where,
                                  const char* name) {
  auto it = object.find(name);
  if (it == object.end()) bad(where + ": missing field '" + std::string(name) + "'");
  return *it;
}

double finite_number(const ordered_json& value, const std::string& field) {
  if (!value.is_number()) bad(field + " must be a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) bad(field + " must be finite");
  return v;
}

std::vector<double> positive_score_array(const ordered_json& value, const std::string& field) {
  if (!value.is_array()) bad(field + " must be an array of scores");
  std::vector<double> scores;
  scores.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::string slot = field + "[" + std::to_string(i) + "]";
    const double v = finite_number(value[i], slot);
    if (v <= 0.0) bad(slot + " must be positive");
    scores.push_back(v);
  }
  return scores;
}

ComplementModel parse_complement(const ordered_json& value) {
  const std::string where = "complement";
  if (!value.is_object()) bad(where + " must be an object with exactly one law");
  if (value.size() != 1) bad(where + " must contain exactly one law");
  const std::string law = value.begin().key();
  const ordered_json& body = *value.begin();
  if (law == "empirical") {
    if (!body.is_array()) bad(where + ".empirical must be an array of scores");
    if (body.empty()) bad("empty complement");
    return ComplementModel{Empirical{positive_score_array(body, where + ".empirical")}};
  }
  if (law == "exponential") {
    if (!body.is_object()) bad(where + ".exponential must be an object");
    reject_unknown_fields(body, where + ".exponential", {"lambda"});
    const double lambda =
        finite_number(require_field(body, where + ".exponential", "lambda"),
                      where + ".exponential.lambda");
    if (lambda <= 0.0) bad(where + ".exponential.lambda must be positive");
    return ComplementModel{Exponential{lambda}};
  }
  if (law == "lognormal") {
    if (!body.is_object()) bad(where + ".lognormal must be an object");
    reject_unknown_fields(body, where + ".lognormal", {"mu", "sigma"});
    const double mu =
        finite_number(require_field(body, where + ".lognormal", "mu"), where + ".lognormal.mu");
    const double sigma = finite_number(require_field(body, where + ".lognormal", "sigma"),
                                       where + ".lognormal.sigma");
    if (sigma <= 0.0) bad(where + ".lognormal.sigma must be positive");
    return ComplementModel{LogNormal{mu, sigma}};
  }
  if (law == "piecewise_linear_cdf") {
    if (!body.is_object()) bad(where + ".piecewise_linear_cdf must be an object");
    reject_unknown_fields(body, where + ".piecewise_linear_cdf", {"points"});
    const ordered_json& points = require_field(body, where + ".piecewise_linear_cdf", "points");
    if (!points.is_array() || points.size() < 2)
      bad(where + ".piecewise_linear_cdf.points must be an array of at least two [x, F] pairs");
    std::vector<PiecewiseLinearCdf::Knot> knots;
    knots.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::string slot = where + ".piecewise_linear_cdf.points[" + std::to_string(i) + "]";
      const ordered_json& pair = points[i];
      if (!pair.is_array() || pair.size() != 2) bad(slot + " must be an [x, F] pair");
      knots.push_back({finite_number(pair[0], slot + "[0]"), finite_number(pair[1], slot + "[1]")});
    }
    try {
      return ComplementModel{PiecewiseLinearCdf{std::move(knots)}};
    } catch (const std::invalid_argument& e) {
      bad(where + ".piecewise_linear_cdf: " + e.what());
    }
  }
  bad(where + ": unknown law '" + law + "'");
}

BudgetSpec parse_budget(const ordered_json& value, std::size_t entry_count) {
  const std::string where = "budget";
  if (!value.is_object()) bad(where + " must be an object");
  reject_unknown_fields(value, where, {"total", "per_entry"});
  const bool has_total = value.contains("total");
  const bool has_per_entry = value.contains("per_entry");
  if (has_total == has_per_entry)
    bad(where + " must contain exactly one of 'total' and 'per_entry'");
  double total = 0.0;
  if (has_total) {
    total = finite_number(value["total"], where + ".total");
    if (total < 0.0) bad(where + ".total must be non-negative");
  } else {
    const double per_entry = finite_number(value["per_entry"], where + ".per_entry");
    if (per_entry < 0.0) bad(where + ".per_entry must be non-negative");
    total = per_entry * static_cast<double>(entry_count);
  }
  return BudgetSpec{total};
}

ordered_json json_or_null(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

double number_or_null(const ordered_json& value, const std::string& field, double when_null) {
  if (value.is_null()) return when_null;
  if (!value.is_number()) bad(field + " must be a number or null");
  return value.get<double>();
}

}  // namespace

const char* solver_kind_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Iterative:
      return "iterative";
    case SolverKind::Unimodal:
      return "unimodal";
    case SolverKind::Oracle:
      return "oracle";
  }
  throw internal_error("unhandled solver kind");
}

Instance parse_instance(const std::string& json_text) {
  const ordered_json j = parse_text(json_text, "instance");
  if (!j.is_object()) bad("instance must be a JSON object");
  reject_unknown_fields(j, "instance", {"supported", "complement", "budget", "epsilon"});

  std::vector<double> scores =
      positive_score_array(require_field(j, "instance", "supported"), "supported");
  if (scores.empty()) bad("supported must not be empty");
  SupportedSet supported{std::move(scores)};

  ComplementModel complement = parse_complement(require_field(j, "instance", "complement"));
  BudgetSpec budget = parse_budget(require_field(j, "instance", "budget"), supported.size());

  std::optional<double> epsilon;
  if (j.contains("epsilon")) {
    const double eps = finite_number(j["epsilon"], "epsilon");
    if (eps < 0.0) bad("epsilon must be non-negative");
    epsilon = eps;
  }
  return Instance{std::move(supported), std::move(complement), budget, epsilon};
}

Instance read_instance_file(const std::string& path) { return parse_instance(slurp(path)); }

std::string plan_to_json(const ReinforcementPlan& plan, SolverKind solver) {
  ordered_json j;
  ordered_json assignments = ordered_json::array();
  for (const Assignment& a : plan.assignments.assignments()) {
    assignments.push_back({{"from", a.original}, {"to", a.reinforced}});
  }
  j["assignments"] = std::move(assignments);
  j["budget_total"] = plan.budget_total;
  j["budget_used"] = plan.budget_used;
  j["slack"] = plan.slack();
  j["alpha_final"] = json_or_null(plan.alpha_final);
  j["targets"] = plan.targets;
  ordered_json collinear = ordered_json::array();
  for (const CollinearScore& c : plan.collinear) {
    collinear.push_back(
        {{"score", c.score}, {"kind", c.kind == CollinearKind::Target ? "target" : "source"}});
  }
  j["collinear"] = std::move(collinear);
  ordered_json promotions = ordered_json::array();
  for (const CollinearPromotion& p : plan.collinear_promotions) {
    promotions.push_back({{"from", p.from}, {"to", p.to}, {"count", p.count}});
  }
  j["collinear_promotions"] = std::move(promotions);
  j["utility_before"] = json_or_null(plan.utility_before);
  j["utility_after"] = json_or_null(plan.utility_after);
  j["solver"] = solver_kind_name(solver);
  return j.dump(2) + "\n";
}

PlanDocument parse_plan(const std::string& json_text) {
  const ordered_json j = parse_text(json_text, "plan");
  if (!j.is_object()) bad("plan must be a JSON object");
  reject_unknown_fields(j, "plan",
                        {"assignments", "budget_total", "budget_used", "slack", "alpha_final",
                         "targets", "collinear", "collinear_promotions", "utility_before",
                         "utility_after", "solver"});

  const ordered_json& raw_assignments = require_field(j, "plan", "assignments");
  if (!raw_assignments.is_array()) bad("assignments must be an array");
  std::vector<Assignment> assignments;
  assignments.reserve(raw_assignments.size());
  for (std::size_t i = 0; i < raw_assignments.size(); ++i) {
    const std::string slot = "assignments[" + std::to_string(i) + "]";
    const ordered_json& entry = raw_assignments[i];
    if (!entry.is_object()) bad(slot + " must be an object");
    reject_unknown_fields(entry, slot, {"from", "to"});
    const double from = finite_number(require_field(entry, slot, "from"), slot + ".from");
    const double to = finite_number(require_field(entry, slot, "to"), slot + ".to");
    if (from <= 0.0) bad(slot + ".from must be positive");
    if (to < from) bad(slot + ".to must be at least its 'from'");
    assignments.push_back({from, to});
  }

  ReinforcementPlan plan{ReinforcedSet{std::move(assignments)}};
  plan.budget_total = finite_number(require_field(j, "plan", "budget_total"), "budget_total");
  plan.budget_used = finite_number(require_field(j, "plan", "budget_used"), "budget_used");
  if (plan.budget_total < 0.0) bad("budget_total must be non-negative");
  if (plan.budget_used < 0.0) bad("budget_used must be non-negative");
  if (j.contains("slack")) finite_number(j["slack"], "slack");  // derived; value recomputed
  plan.alpha_final = number_or_null(require_field(j, "plan", "alpha_final"), "alpha_final",
                                    std::numeric_limits<double>::infinity());
  if (plan.alpha_final <= 0.0) bad("alpha_final must be positive");

  const ordered_json& raw_targets = require_field(j, "plan", "targets");
  if (!raw_targets.is_array()) bad("targets must be an array");
  for (std::size_t i = 0; i < raw_targets.size(); ++i) {
    plan.targets.push_back(finite_number(raw_targets[i], "targets[" + std::to_string(i) + "]"));
  }

  const ordered_json& raw_collinear = require_field(j, "plan", "collinear");
  if (!raw_collinear.is_array()) bad("collinear must be an array");
  for (std::size_t i = 0; i < raw_collinear.size(); ++i) {
    const std::string slot = "collinear[" + std::to_string(i) + "]";
    const ordered_json& entry = raw_collinear[i];
    if (!entry.is_object()) bad(slot + " must be an object");
    reject_unknown_fields(entry, slot, {"score", "kind"});
    const double score = finite_number(require_field(entry, slot, "score"), slot + ".score");
    const ordered_json& kind = require_field(entry, slot, "kind");
    if (!kind.is_string()) bad(slot + ".kind must be 'target' or 'source'");
    const std::string name = kind.get<std::string>();
    CollinearKind parsed = CollinearKind::Target;
    if (name == "source") {
      parsed = CollinearKind::Source;
    } else if (name != "target") {
      bad(slot + ".kind must be 'target' or 'source'");
    }
    plan.collinear.push_back({score, parsed});
  }

  if (j.contains("collinear_promotions")) {
    const ordered_json& raw = j["collinear_promotions"];
    if (!raw.is_array()) bad("collinear_promotions must be an array");
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const std::string slot = "collinear_promotions[" + std::to_string(i) + "]";
      const ordered_json& entry = raw[i];
      if (!entry.is_object()) bad(slot + " must be an object");
      reject_unknown_fields(entry, slot, {"from", "to", "count"});
      CollinearPromotion promo;
      promo.from = finite_number(require_field(entry, slot, "from"), slot + ".from");
      promo.to = finite_number(require_field(entry, slot, "to"), slot + ".to");
      const ordered_json& count = require_field(entry, slot, "count");
      if (!count.is_number_integer() || count.get<long long>() <= 0)
        bad(slot + ".count must be a positive integer");
      promo.count = count.get<long long>();
      plan.collinear_promotions.push_back(promo);
    }
  }

  plan.utility_before =
      number_or_null(require_field(j, "plan", "utility_before"), "utility_before",
                     std::numeric_limits<double>::quiet_NaN());
  plan.utility_after = number_or_null(require_field(j, "plan", "utility_after"), "utility_after",
                                      std::numeric_limits<double>::quiet_NaN());

  const ordered_json& solver = require_field(j, "plan", "solver");
  if (!solver.is_string()) bad("solver must be a string");
  const std::string name = solver.get<std::string>();
  SolverKind kind = SolverKind::Iterative;
  if (name == "unimodal") {
    kind = SolverKind::Unimodal;
  } else if (name == "oracle") {
    kind = SolverKind::Oracle;
  } else if (name != "iterative") {
    bad("solver must be one of 'iterative', 'unimodal', 'oracle'");
  }
  return PlanDocument{std::move(plan), kind};
}

PlanDocument read_plan_file(const std::string& path) { return parse_plan(slurp(path)); }

}  // namespace reinforce
