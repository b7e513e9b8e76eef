#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "reinforce/io.hpp"
#include "reinforce/iterative_solver.hpp"
#include "reinforce/plot.hpp"
#include "reinforce/unimodal.hpp"

using namespace reinforce;
using doctest::Approx;

namespace {

const char* kMicroInstance = R"({
  "supported": [5, 12],
  "complement": {"empirical": [10, 20]},
  "budget": {"total": 13}
})";

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Run the installed CLI binary with the given arguments, capturing both
// streams; exit_code is the process exit status.
CommandResult run_cli(const std::string& args) {
  const std::string command = std::string(RF_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) result.output.append(buffer, n);
  const int status = pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "reinforce_io_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
  const auto path = scratch_dir() / name;
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
  out.close();
  return path.string();
}

std::string read_back(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

// Parse a sweep CSV body into rows of doubles, skipping the header.
std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  bool header = true;
  while (std::getline(lines, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("io: instance parsing covers every complement law") {
  SUBCASE("empirical") {
    const Instance inst = parse_instance(kMicroInstance);
    CHECK(inst.supported.scores() == std::vector<double>{5, 12});
    REQUIRE(inst.complement.empirical() != nullptr);
    CHECK(inst.complement.empirical()->scores() == std::vector<double>{10, 20});
    CHECK(inst.budget.total == 13.0);
    CHECK(!inst.epsilon.has_value());
  }
  SUBCASE("exponential with epsilon") {
    const Instance inst = parse_instance(
        R"({"supported": [2], "complement": {"exponential": {"lambda": 0.5}},
            "budget": {"total": 4}, "epsilon": 1e-7})");
    const auto* law = std::get_if<Exponential>(&inst.complement.law());
    REQUIRE(law != nullptr);
    CHECK(law->lambda == 0.5);
    REQUIRE(inst.epsilon.has_value());
    CHECK(*inst.epsilon == 1e-7);
  }
  SUBCASE("lognormal") {
    const Instance inst = parse_instance(
        R"({"supported": [1], "complement": {"lognormal": {"mu": 0.25, "sigma": 1.5}},
            "budget": {"total": 1}})");
    const auto* law = std::get_if<LogNormal>(&inst.complement.law());
    REQUIRE(law != nullptr);
    CHECK(law->mu == 0.25);
    CHECK(law->sigma == 1.5);
  }
  SUBCASE("piecewise linear cdf") {
    const Instance inst = parse_instance(
        R"({"supported": [1], "complement":
            {"piecewise_linear_cdf": {"points": [[0, 0], [40, 0.5], [80, 1]]}},
            "budget": {"total": 1}})");
    const auto* law = std::get_if<PiecewiseLinearCdf>(&inst.complement.law());
    REQUIRE(law != nullptr);
    CHECK(law->knots().size() == 3);
    CHECK(law->cdf(40.0) == 0.5);
  }
  SUBCASE("unsorted supported scores come back ascending") {
    const Instance inst = parse_instance(
        R"({"supported": [12, 5], "complement": {"empirical": [10]}, "budget": {"total": 0}})");
    CHECK(inst.supported.scores() == std::vector<double>{5, 12});
  }
}

TEST_CASE("io: diagnostics name the offending field") {
  auto message_of = [](const std::string& text) {
    try {
      parse_instance(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string("(no error)");
  };
  CHECK(message_of("{") != "(no error)");
  CHECK(message_of(R"({"complement": {"empirical": [1]}, "budget": {"total": 0}})")
            .find("supported") != std::string::npos);
  CHECK(message_of(R"({"supported": [1], "budget": {"total": 0}})").find("complement") !=
        std::string::npos);
  CHECK(message_of(R"({"supported": [1], "complement": {"empirical": [1]}})").find("budget") !=
        std::string::npos);
  CHECK(message_of(
            R"({"supported": [1, -2], "complement": {"empirical": [1]}, "budget": {"total": 0}})")
            .find("supported[1]") != std::string::npos);
  CHECK(message_of(
            R"({"supported": [1], "complement": {"empirical": [1]}, "budget": {"total": -1}})")
            .find("budget.total") != std::string::npos);
  CHECK(message_of(R"({"supported": [1], "complement": {"empirical": [1]},
                       "budget": {"total": 1, "per_entry": 1}})")
            .find("exactly one") != std::string::npos);
  CHECK(message_of(R"({"supported": [1], "complement": {"empirical": [1]}, "budget": {}})")
            .find("exactly one") != std::string::npos);
  CHECK(message_of(R"({"supported": [1], "complement": {"squiggle": [1]}, "budget": {"total": 0}})")
            .find("squiggle") != std::string::npos);
  CHECK(message_of(R"({"supported": [1], "complement": {"exponential": {"lambda": 0}},
                       "budget": {"total": 0}})")
            .find("lambda") != std::string::npos);
  CHECK(message_of(R"({"supported": [1], "complement": {"empirical": [1]},
                       "budget": {"total": 0}, "extra": 1})")
            .find("extra") != std::string::npos);
  CHECK(message_of(R"({"supported": [1], "complement": {"empirical": [1]},
                       "budget": {"total": 0}, "epsilon": -1})")
            .find("epsilon") != std::string::npos);

  // An empty empirical array has its own fixed wording.
  CHECK(message_of(R"({"supported": [1], "complement": {"empirical": []}, "budget": {"total": 1}})")
        == "empty complement");
}

TEST_CASE("io: per-entry budget equals the scaled total") {
  const Instance by_total = parse_instance(kMicroInstance);
  const Instance by_entry = parse_instance(
      R"({"supported": [5, 12], "complement": {"empirical": [10, 20]},
          "budget": {"per_entry": 6.5}})");
  CHECK(by_entry.budget.total == by_total.budget.total);
  const ReinforcementPlan a =
      iterative_solve(by_total.supported, by_total.complement, by_total.budget);
  const ReinforcementPlan b =
      iterative_solve(by_entry.supported, by_entry.complement, by_entry.budget);
  REQUIRE(a.assignments.size() == b.assignments.size());
  for (std::size_t i = 0; i < a.assignments.size(); ++i) {
    CHECK(a.assignments.assignments()[i].reinforced == b.assignments.assignments()[i].reinforced);
  }
}

TEST_CASE("io: plan documents round trip bit for bit") {
  const Instance inst = parse_instance(kMicroInstance);
  const ReinforcementPlan plan = iterative_solve(inst.supported, inst.complement, inst.budget);
  const std::string text = plan_to_json(plan, SolverKind::Iterative);
  const PlanDocument doc = parse_plan(text);
  CHECK(doc.solver == SolverKind::Iterative);
  CHECK(doc.plan.budget_total == plan.budget_total);
  CHECK(doc.plan.budget_used == plan.budget_used);
  CHECK(doc.plan.alpha_final == plan.alpha_final);
  CHECK(doc.plan.utility_before == plan.utility_before);
  CHECK(doc.plan.utility_after == plan.utility_after);
  CHECK(doc.plan.targets == plan.targets);
  REQUIRE(doc.plan.assignments.size() == plan.assignments.size());
  for (std::size_t i = 0; i < plan.assignments.size(); ++i) {
    CHECK(doc.plan.assignments.assignments()[i].original ==
          plan.assignments.assignments()[i].original);
    CHECK(doc.plan.assignments.assignments()[i].reinforced ==
          plan.assignments.assignments()[i].reinforced);
  }
  REQUIRE(doc.plan.collinear.size() == plan.collinear.size());
  for (std::size_t i = 0; i < plan.collinear.size(); ++i) {
    CHECK(doc.plan.collinear[i].score == plan.collinear[i].score);
    CHECK((doc.plan.collinear[i].kind == plan.collinear[i].kind));
  }

  // Serializing the parsed document again reproduces the text exactly.
  CHECK(plan_to_json(doc.plan, doc.solver) == text);

  SUBCASE("identity plans store a null slope and recover infinity") {
    const ReinforcementPlan none =
        iterative_solve(inst.supported, inst.complement, BudgetSpec{0.0});
    const std::string none_text = plan_to_json(none, SolverKind::Iterative);
    CHECK(none_text.find("\"alpha_final\": null") != std::string::npos);
    const PlanDocument parsed = parse_plan(none_text);
    CHECK(std::isinf(parsed.plan.alpha_final));
  }
  SUBCASE("plan diagnostics name the offending field") {
    CHECK_THROWS_WITH_AS(parse_plan("{}"), doctest::Contains("assignments"),
                         std::invalid_argument);
    std::string broken = text;
    const auto pos = broken.find("\"solver\": \"iterative\"");
    REQUIRE(pos != std::string::npos);
    broken.replace(pos, std::string("\"solver\": \"iterative\"").size(),
                   "\"solver\": \"psychic\"");
    CHECK_THROWS_WITH_AS(parse_plan(broken), doctest::Contains("solver"), std::invalid_argument);
  }
}

TEST_CASE("cli: solve writes a plan and honors the fast path") {
  const std::string micro = write_scratch("micro.json", kMicroInstance);

  SUBCASE("iterative plan on stdout") {
    const CommandResult r = run_cli("solve --in " + micro);
    CHECK(r.exit_code == 0);
    const PlanDocument doc = parse_plan(r.output);
    CHECK(doc.solver == SolverKind::Iterative);
    CHECK(doc.plan.budget_used == 13.0);
    CHECK(doc.plan.assignments.assignments()[0].reinforced == 10.0);
    CHECK(doc.plan.assignments.assignments()[1].reinforced == 20.0);
    CHECK(doc.plan.utility_after == 0.5);
  }
  SUBCASE("exponential water fill through --fastpath") {
    const std::string path = write_scratch("waterfill.json",
                                           R"({"supported": [100, 500, 700, 3000, 6000],
          "complement": {"exponential": {"lambda": 0.8}},
          "budget": {"total": 10000}})");
    const CommandResult r = run_cli("solve --fastpath --in " + path);
    CHECK(r.exit_code == 0);
    const PlanDocument doc = parse_plan(r.output);
    CHECK(doc.solver == SolverKind::Unimodal);
    CHECK(doc.plan.targets == std::vector<double>{3575.0});
    CHECK(doc.plan.budget_used == 10000.0);
    // The lowest four entries rise to the common water line.
    for (int i = 0; i < 4; ++i) CHECK(doc.plan.assignments.assignments()[i].reinforced == 3575.0);
    CHECK(doc.plan.assignments.assignments()[4].reinforced == 6000.0);
  }
  SUBCASE("fast path rejects an empirical complement") {
    const CommandResult r = run_cli("solve --fastpath --in " + micro);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("iterative") != std::string::npos);
  }
  SUBCASE("malformed JSON exits 2") {
    const std::string path = write_scratch("broken.json", "{\"supported\": [5");
    const CommandResult r = run_cli("solve --in " + path);
    CHECK(r.exit_code == 2);
  }
  SUBCASE("missing file exits 2") {
    const CommandResult r = run_cli("solve --in " + (scratch_dir() / "nope.json").string());
    CHECK(r.exit_code == 2);
  }
  SUBCASE("missing required option exits 2, help exits 0") {
    CHECK(run_cli("solve").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
  }
}

TEST_CASE("cli: solving again at the spent budget reproduces the plan") {
  // Budget 14 leaves slack 1 over the 13-unit plan; feeding budget_used back
  // in as the whole budget must land on the same assignments.
  const std::string first = write_scratch("idem14.json",
                                          R"({"supported": [5, 12],
        "complement": {"empirical": [10, 20]}, "budget": {"total": 14}})");
  const CommandResult r1 = run_cli("solve --in " + first);
  REQUIRE(r1.exit_code == 0);
  const PlanDocument doc1 = parse_plan(r1.output);
  CHECK(doc1.plan.budget_used == 13.0);
  CHECK(doc1.plan.slack() == 1.0);

  const std::string second = write_scratch("idem13.json",
                                           R"({"supported": [5, 12],
        "complement": {"empirical": [10, 20]}, "budget": {"total": 13}})");
  const CommandResult r2 = run_cli("solve --in " + second);
  REQUIRE(r2.exit_code == 0);
  const PlanDocument doc2 = parse_plan(r2.output);
  REQUIRE(doc1.plan.assignments.size() == doc2.plan.assignments.size());
  for (std::size_t i = 0; i < doc1.plan.assignments.size(); ++i) {
    CHECK(doc1.plan.assignments.assignments()[i].reinforced ==
          doc2.plan.assignments.assignments()[i].reinforced);
  }
  CHECK(doc1.plan.utility_after == doc2.plan.utility_after);
}

TEST_CASE("cli: sweep tabulates descending slopes with growing budgets") {
  const std::string micro = write_scratch("micro.json", kMicroInstance);

  SUBCASE("three-step table over [0.04, 0.06]") {
    const CommandResult r = run_cli("sweep --in " + micro +
                                    " --alpha-min 0.04 --alpha-max 0.06 --steps 3");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.rfind("alpha,budget_used,next_alpha,utility\n", 0) == 0);
    const auto rows = parse_csv_rows(r.output);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == 0.06);
    CHECK(rows[2][0] == 0.04);
    CHECK(rows[0][0] > rows[1][0]);
    CHECK(rows[1][0] > rows[2][0]);
    // Budget grows (weakly) as the slope falls.
    CHECK(rows[0][1] == 13.0);
    CHECK(rows[1][1] == 23.0);
    CHECK(rows[2][1] == 23.0);
    for (const auto& row : rows) REQUIRE(row.size() == 4);
    CHECK(rows[0][3] == 0.5);
    CHECK(rows[2][3] == 1.0);
  }
  SUBCASE("steps=2 gives exactly the endpoints") {
    const CommandResult r =
        run_cli("sweep --in " + micro + " --alpha-min 0.01 --alpha-max 0.2 --steps 2");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv_rows(r.output);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == 0.2);
    CHECK(rows[1][0] == 0.01);
  }
  SUBCASE("validation failures exit 2") {
    CHECK(run_cli("sweep --in " + micro + " --alpha-min 0 --alpha-max 0.1 --steps 3").exit_code ==
          2);
    CHECK(run_cli("sweep --in " + micro + " --alpha-min 0.2 --alpha-max 0.1 --steps 3")
              .exit_code == 2);
    CHECK(run_cli("sweep --in " + micro + " --alpha-min 0.01 --alpha-max 0.1 --steps 1")
              .exit_code == 2);
  }
}

TEST_CASE("cli: plot renders chords, segments, and the moved mass") {
  const std::string micro = write_scratch("micro.json", kMicroInstance);
  const std::string plan_path = (scratch_dir() / "micro_plan.json").string();
  REQUIRE(run_cli("solve --in " + micro + " --out " + plan_path).exit_code == 0);

  SUBCASE("micro plan draws one chord per target") {
    const std::string svg_path = (scratch_dir() / "micro_plot.svg").string();
    const CommandResult r =
        run_cli("plot --in " + micro + " --plan " + plan_path + " --out " + svg_path);
    REQUIRE(r.exit_code == 0);
    const std::string svg = read_back(svg_path);
    const PlanDocument doc = parse_plan(read_back(plan_path));
    CHECK(count_occurrences(svg, "class=\"chord\"") == doc.plan.targets.size());
    CHECK(count_occurrences(svg, "class=\"segment\"") == doc.plan.targets.size());
    CHECK(count_occurrences(svg, "class=\"reinforced-area\"") > 0);
    CHECK(svg.find("<svg") == 0);

    const std::string csv = read_back((scratch_dir() / "micro_plot.csv").string());
    CHECK(csv.rfind("series,x,y\n", 0) == 0);
    CHECK(csv.find("complement_cdf,") != std::string::npos);
    CHECK(csv.find("before_cdf,") != std::string::npos);
    CHECK(csv.find("after_cdf,") != std::string::npos);
    CHECK(csv.find("chord_1,") != std::string::npos);
    CHECK(csv.find("chord_2,") != std::string::npos);
  }
  SUBCASE("identity plan draws no chords and no shading") {
    const std::string zero = write_scratch("micro0.json",
                                           R"({"supported": [5, 12],
          "complement": {"empirical": [10, 20]}, "budget": {"total": 0}})");
    const std::string zero_plan = (scratch_dir() / "micro0_plan.json").string();
    REQUIRE(run_cli("solve --in " + zero + " --out " + zero_plan).exit_code == 0);
    const std::string svg_path = (scratch_dir() / "micro0_plot.svg").string();
    REQUIRE(run_cli("plot --in " + zero + " --plan " + zero_plan + " --out " + svg_path)
                .exit_code == 0);
    const std::string svg = read_back(svg_path);
    CHECK(count_occurrences(svg, "class=\"chord\"") == 0);
    CHECK(count_occurrences(svg, "class=\"reinforced-area\"") == 0);
    CHECK(count_occurrences(svg, "class=\"before-cdf\"") == 1);
    CHECK(count_occurrences(svg, "class=\"after-cdf\"") == 1);
  }
  SUBCASE("a wide plan draws every reinforced interval, spent or not") {
    // Budget 181 here buys three intervals at the final slope; the topmost
    // captures no entry but still belongs to the geometry.
    const std::string wide = write_scratch("wide.json",
                                           R"({"supported": [10, 15, 40, 114],
          "complement": {"empirical": [10, 24, 35, 60, 80, 100, 120, 220]},
          "budget": {"total": 181}})");
    const std::string wide_plan = (scratch_dir() / "wide_plan.json").string();
    REQUIRE(run_cli("solve --in " + wide + " --out " + wide_plan).exit_code == 0);
    const std::string svg_path = (scratch_dir() / "wide_plot.svg").string();
    REQUIRE(run_cli("plot --in " + wide + " --plan " + wide_plan + " --out " + svg_path)
                .exit_code == 0);
    const std::string svg = read_back(svg_path);
    CHECK(count_occurrences(svg, "class=\"segment\"") == 3);
    CHECK(count_occurrences(svg, "class=\"chord\"") == 3);
  }
  SUBCASE("a plan from a different instance exits 2") {
    const std::string other = write_scratch("other.json",
                                            R"({"supported": [5, 13],
          "complement": {"empirical": [10, 20]}, "budget": {"total": 13}})");
    const std::string svg_path = (scratch_dir() / "mismatch.svg").string();
    const CommandResult r =
        run_cli("plot --in " + other + " --plan " + plan_path + " --out " + svg_path);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("does not match") != std::string::npos);
  }
  SUBCASE("--out is required") {
    CHECK(run_cli("plot --in " + micro + " --plan " + plan_path).exit_code == 2);
  }
}

TEST_CASE("cli: oracle reports the exact optimum as a fraction") {
  const std::string micro = write_scratch("micro.json", kMicroInstance);

  SUBCASE("micro instance") {
    const CommandResult r = run_cli("oracle --in " + micro);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("utility = 1/2") != std::string::npos);
    CHECK(r.output.find("5 -> 10") != std::string::npos);
    CHECK(r.output.find("12 -> 20") != std::string::npos);
  }
  SUBCASE("zero budget reports the identity utility") {
    const std::string zero = write_scratch("micro0.json",
                                           R"({"supported": [5, 12],
          "complement": {"empirical": [10, 20]}, "budget": {"total": 0}})");
    const CommandResult r = run_cli("oracle --in " + zero);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("utility = -1/2") != std::string::npos);
  }
  SUBCASE("analytic complements exit 2") {
    const std::string exp_path = write_scratch("exp.json",
                                               R"({"supported": [1],
          "complement": {"exponential": {"lambda": 1}}, "budget": {"total": 1}})");
    CHECK(run_cli("oracle --in " + exp_path).exit_code == 2);
  }
  SUBCASE("oversize instances exit 2") {
    const std::string big = write_scratch("big.json",
                                          R"({"supported": [1, 2, 3, 4, 5, 6, 7],
          "complement": {"empirical": [10, 20]}, "budget": {"total": 5}})");
    CHECK(run_cli("oracle --in " + big).exit_code == 2);
  }
}

TEST_CASE("cli: utility matches the library computation") {
  const std::string micro = write_scratch("micro.json", kMicroInstance);
  const Instance inst = parse_instance(kMicroInstance);

  const CommandResult r = run_cli("utility --in " + micro);
  REQUIRE(r.exit_code == 0);
  const double printed = std::strtod(r.output.c_str(), nullptr);
  CHECK(printed == Approx(utility(inst.supported, inst.complement)).epsilon(1e-12));

  const std::string plan_path = (scratch_dir() / "micro_plan.json").string();
  REQUIRE(run_cli("solve --in " + micro + " --out " + plan_path).exit_code == 0);
  const CommandResult rp = run_cli("utility --in " + micro + " --plan " + plan_path);
  REQUIRE(rp.exit_code == 0);
  const double printed_plan = std::strtod(rp.output.c_str(), nullptr);

  // The stored utility fields agree with recomputation from the assignments.
  const PlanDocument doc = parse_plan(read_back(plan_path));
  const double recomputed = utility(doc.plan.assignments, inst.complement);
  CHECK(printed_plan == Approx(recomputed).epsilon(1e-12));
  CHECK(std::fabs(doc.plan.utility_after - recomputed) <= 1e-12);
  CHECK(std::fabs(doc.plan.utility_before - utility(inst.supported, inst.complement)) <= 1e-12);
}
