#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reinforce/basic_solver.hpp"
#include "reinforce/io.hpp"
#include "reinforce/iterative_solver.hpp"
#include "reinforce/oracle.hpp"
#include "reinforce/plot.hpp"
#include "reinforce/unimodal.hpp"

namespace {

using namespace reinforce;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Print to stdout, or write the file when a path was given.
void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + out_path);
  out << text;
  if (!out) throw std::invalid_argument("failed writing file: " + out_path);
}

std::string sibling_csv_path(const std::string& svg_path) {
  const auto dot = svg_path.find_last_of('.');
  const auto slash = svg_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return svg_path + ".csv";
  return svg_path.substr(0, dot) + ".csv";
}

int run_solve(const std::string& in_path, const std::string& out_path,
              std::optional<double> cli_epsilon, bool fastpath) {
  const Instance instance = read_instance_file(in_path);
  if (fastpath) {
    if (cli_epsilon)
      throw std::invalid_argument("--epsilon does not apply to --fastpath (it is exact)");
    const ReinforcementPlan plan =
        solve_unimodal(instance.supported, instance.complement, instance.budget);
    emit(plan_to_json(plan, SolverKind::Unimodal), out_path);
    return 0;
  }
  const std::optional<double> epsilon = cli_epsilon ? cli_epsilon : instance.epsilon;
  const ReinforcementPlan plan =
      iterative_solve(instance.supported, instance.complement, instance.budget, epsilon);
  emit(plan_to_json(plan, SolverKind::Iterative), out_path);
  return 0;
}

int run_sweep(const std::string& in_path, const std::string& out_path, double alpha_min,
              double alpha_max, int steps) {
  if (!(alpha_min > 0.0) || !std::isfinite(alpha_min))
    throw std::invalid_argument("--alpha-min must be positive");
  if (!(alpha_max > alpha_min) || !std::isfinite(alpha_max))
    throw std::invalid_argument("--alpha-max must exceed --alpha-min");
  if (steps < 2) throw std::invalid_argument("--steps must be at least 2");

  const Instance instance = read_instance_file(in_path);
  const double log_hi = std::log(alpha_max);
  const double log_lo = std::log(alpha_min);
  std::string csv = "alpha,budget_used,next_alpha,utility\n";
  for (int i = 0; i < steps; ++i) {
    double alpha = std::exp(log_hi + (log_lo - log_hi) * i / (steps - 1));
    if (i == 0) alpha = alpha_max;
    if (i == steps - 1) alpha = alpha_min;
    const AlphaSolution sol = basic_solve(instance.supported, instance.complement, alpha);
    csv += fmt(alpha) + "," + fmt(sol.budget_used) + "," + fmt(sol.next_alpha) + "," +
           fmt(utility(sol.plan, instance.complement)) + "\n";
  }
  emit(csv, out_path);
  return 0;
}

int run_plot(const std::string& in_path, const std::string& plan_path,
             const std::string& out_path) {
  const Instance instance = read_instance_file(in_path);
  const PlanDocument doc = read_plan_file(plan_path);
  validate_plan_matches(instance, doc.plan);
  emit(render_plot_svg(instance, doc.plan), out_path);
  emit(render_plot_csv(instance, doc.plan), sibling_csv_path(out_path));
  return 0;
}

int run_oracle(const std::string& in_path, const std::string& out_path) {
  const Instance instance = read_instance_file(in_path);
  const OracleResult result = oracle_solve(instance.supported, instance.complement,
                                           instance.budget);
  std::string text;
  text += "utility = " + std::to_string(result.best_utility.num) + "/" +
          std::to_string(result.best_utility.den) + "\n";
  text += "explored = " + std::to_string(result.explored) + "\n";
  text += "optimal plans = " + std::to_string(result.best_plans.size()) + "\n";
  for (std::size_t i = 0; i < result.best_plans.size(); ++i) {
    text += "plan " + std::to_string(i + 1) + ": ";
    const auto& assignments = result.best_plans[i].assignments();
    for (std::size_t k = 0; k < assignments.size(); ++k) {
      if (k) text += ", ";
      text += fmt(assignments[k].original) + " -> " + fmt(assignments[k].reinforced);
    }
    text += "\n";
  }
  emit(text, out_path);
  return 0;
}

int run_utility(const std::string& in_path, const std::string& plan_path,
                const std::string& out_path) {
  const Instance instance = read_instance_file(in_path);
  double value = 0.0;
  if (plan_path.empty()) {
    value = utility(instance.supported, instance.complement);
  } else {
    const PlanDocument doc = read_plan_file(plan_path);
    validate_plan_matches(instance, doc.plan);
    value = utility(doc.plan.assignments, instance.complement);
  }
  emit(fmt(value) + "\n", out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted score-reinforcement planner"};
  app.require_subcommand(1);

  std::string in_path, out_path, plan_path;
  double epsilon = 0.0;
  bool fastpath = false;
  double alpha_min = 0.0, alpha_max = 0.0;
  int steps = 0;

  CLI::App* solve = app.add_subcommand("solve", "Spend a budget optimally over an instance");
  solve->add_option("--in", in_path, "Instance JSON file")->required();
  solve->add_option("--out", out_path, "Write the plan JSON here instead of stdout");
  solve->add_option("--epsilon", epsilon, "Slope-bracket width to stop the search at");
  solve->add_flag("--fastpath", fastpath,
                  "Single-target solver for single-peaked complement densities");

  CLI::App* sweep = app.add_subcommand("sweep", "Tabulate the fixed-slope solve over slopes");
  sweep->add_option("--in", in_path, "Instance JSON file")->required();
  sweep->add_option("--out", out_path, "Write the CSV here instead of stdout");
  sweep->add_option("--alpha-min", alpha_min, "Smallest slope (exclusive lower end > 0)")
      ->required();
  sweep->add_option("--alpha-max", alpha_max, "Largest slope")->required();
  sweep->add_option("--steps", steps, "Number of log-spaced slopes, at least 2")->required();

  CLI::App* plot = app.add_subcommand("plot", "Render a plan against its instance as SVG + CSV");
  plot->add_option("--in", in_path, "Instance JSON file")->required();
  plot->add_option("--plan", plan_path, "Plan JSON file produced by solve")->required();
  plot->add_option("--out", out_path, "SVG output path; a .csv companion is written beside it")
      ->required();

  CLI::App* oracle = app.add_subcommand("oracle", "Exhaustive exact optimum for tiny instances");
  oracle->add_option("--in", in_path, "Instance JSON file")->required();
  oracle->add_option("--out", out_path, "Write the report here instead of stdout");

  CLI::App* util = app.add_subcommand("utility", "Average rank utility of an instance or plan");
  util->add_option("--in", in_path, "Instance JSON file")->required();
  util->add_option("--plan", plan_path, "Plan JSON file to evaluate instead of the instance");
  util->add_option("--out", out_path, "Write the value here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(solve)) {
      std::optional<double> cli_epsilon;
      if (solve->count("--epsilon") > 0) cli_epsilon = epsilon;
      return run_solve(in_path, out_path, cli_epsilon, fastpath);
    }
    if (app.got_subcommand(sweep)) return run_sweep(in_path, out_path, alpha_min, alpha_max, steps);
    if (app.got_subcommand(plot)) return run_plot(in_path, plan_path, out_path);
    if (app.got_subcommand(oracle)) return run_oracle(in_path, out_path);
    if (app.got_subcommand(util)) return run_utility(in_path, plan_path, out_path);
    throw internal_error("no subcommand dispatched");
  } catch (const internal_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
