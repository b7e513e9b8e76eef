#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "reinforce/score_model.hpp"

using namespace reinforce;

namespace {

ComplementModel table_model() {
  return ComplementModel(Empirical({10, 24, 35, 60, 80, 100, 200, 220}));
}

// Pairwise comparison count: +1 per complement score beaten or tied, -1 per
// score lost to. Reference definition used to cross-check utility().
long long sign_sum(const std::vector<double>& entries, const std::vector<double>& comp) {
  long long sum = 0;
  for (double a : entries)
    for (double c : comp) sum += (a >= c) ? 1 : -1;
  return sum;
}

}  // namespace

TEST_CASE("empirical cdf is the right-continuous step function") {
  auto m = table_model();
  CHECK(m.cdf(9.99) == 0.0);
  CHECK(m.cdf(10.0) == 0.125);
  CHECK(m.cdf(50.0) == 0.375);
  CHECK(m.cdf(80.0) == 0.625);
  CHECK(m.cdf(219.0) == 0.875);
  CHECK(m.cdf(220.0) == 1.0);
  CHECK(m.cdf(1e9) == 1.0);
  CHECK_FALSE(m.is_analytic());
  CHECK(m.empirical() != nullptr);
  CHECK_THROWS_AS(m.pdf(10.0), std::domain_error);
  CHECK_THROWS_AS(mode_score(m), std::domain_error);
  CHECK(expectation(m) == doctest::Approx(729.0 / 8.0).epsilon(1e-15));
}

TEST_CASE("chord gradient of the empirical cdf") {
  auto m = table_model();
  CHECK(chord_gradient(m, 80.0, 100.0) == 0.00625);
  CHECK(chord_gradient(m, 35.0, 80.0) == doctest::Approx(0.25 / 45.0).epsilon(1e-15));
  // Flat stretch of the cdf: zero slope.
  CHECK(chord_gradient(m, 100.0, 199.0) == 0.0);
  CHECK_THROWS_AS(chord_gradient(m, 10.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(chord_gradient(m, 20.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(chord_gradient(m, -1.0, 10.0), std::invalid_argument);
}

TEST_CASE("utility averages pairwise outcomes, ties won") {
  auto m = table_model();
  SupportedSet a({10, 15, 40, 114});
  CHECK(utility(a, m) == -0.3125);  // sign sum -10 over 4*8 comparisons

  CHECK(utility(SupportedSet({3}), ComplementModel(Empirical({1, 2}))) == 1.0);
  CHECK(utility(SupportedSet({5}), ComplementModel(Empirical({5}))) == 1.0);
  CHECK(utility(SupportedSet({4}), ComplementModel(Empirical({5}))) == -1.0);
}

TEST_CASE("utility equals normalized sign sum on random integer instances") {
  std::mt19937 rng(20260819);
  std::uniform_int_distribution<int> score(1, 40);
  std::uniform_int_distribution<int> n_dist(1, 8), m_dist(1, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(n_dist(rng)), c(m_dist(rng));
    for (auto& v : a) v = score(rng);
    for (auto& v : c) v = score(rng);
    SupportedSet sup(a);
    ComplementModel m{Empirical(c)};
    const double expect = static_cast<double>(sign_sum(a, c)) /
                          static_cast<double>(a.size() * c.size());
    CHECK(utility(sup, m) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("reinforced set bookkeeping") {
  SupportedSet sup({5, 12});
  auto id = ReinforcedSet::identity(sup);
  CHECK(id.total_cost() == 0.0);
  CHECK(id.assignments()[0].original == 5.0);
  CHECK(id.assignments()[0].reinforced == 5.0);

  ReinforcedSet r({{12, 20}, {5, 10}});
  CHECK(r.assignments()[0].original == 5.0);  // sorted by original
  CHECK(r.total_cost() == 13.0);
  ComplementModel m{Empirical({10, 20})};
  CHECK(utility(r, m) == 0.5);
  CHECK(utility(sup, m) == -0.5);

  CHECK_THROWS_AS(ReinforcedSet({{5, 4}}), std::invalid_argument);
  CHECK_THROWS_AS(ReinforcedSet({{-5, 4}}), std::invalid_argument);
  CHECK_THROWS_AS(ReinforcedSet({}), std::invalid_argument);
}

TEST_CASE("exponential law") {
  Exponential e(1.0);
  CHECK(e.cdf(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e.cdf(0.0) == 0.0);
  CHECK(e.cdf(-3.0) == 0.0);
  CHECK(e.pdf(0.0) == 1.0);
  CHECK(e.pdf(2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

  ComplementModel m{Exponential(0.8)};
  CHECK(m.is_analytic());
  CHECK(mode_score(m) == 0.0);
  CHECK(max_density(m) == 0.8);
  CHECK(expectation(m) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK_THROWS_AS(Exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Exponential(-1.0), std::invalid_argument);
}

TEST_CASE("log-normal law") {
  ComplementModel m{LogNormal(0.0, 1.0)};
  CHECK(m.cdf(1.0) == 0.5);  // median at exp(mu)
  CHECK(m.cdf(0.0) == 0.0);
  CHECK(m.cdf(-1.0) == 0.0);
  const double mode = mode_score(m);
  CHECK(mode == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(max_density(m) == m.pdf(mode));
  CHECK(m.pdf(mode) > m.pdf(mode * 1.01));
  CHECK(m.pdf(mode) > m.pdf(mode * 0.99));
  CHECK(expectation(m) == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(LogNormal(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("piecewise-linear cdf law") {
  PiecewiseLinearCdf pl({{0, 0}, {10, 0.25}, {20, 1}});
  CHECK(pl.cdf(-1.0) == 0.0);
  CHECK(pl.cdf(0.0) == 0.0);
  CHECK(pl.cdf(5.0) == 0.125);
  CHECK(pl.cdf(10.0) == 0.25);
  CHECK(pl.cdf(15.0) == 0.625);
  CHECK(pl.cdf(20.0) == 1.0);
  CHECK(pl.cdf(25.0) == 1.0);
  CHECK(pl.pdf(5.0) == 0.025);
  CHECK(pl.pdf(15.0) == 0.075);
  CHECK(pl.pdf(20.0) == 0.0);
  CHECK(pl.pdf(-1.0) == 0.0);

  ComplementModel m{pl};
  CHECK(mode_score(m) == 10.0);
  CHECK(max_density(m) == 0.075);
  CHECK(expectation(m) == doctest::Approx(12.5).epsilon(1e-15));

  using K = PiecewiseLinearCdf::Knot;
  CHECK_THROWS_AS(PiecewiseLinearCdf(std::vector<K>{{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearCdf({{0, 0.1}, {10, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearCdf({{0, 0}, {10, 0.9}}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearCdf({{0, 0}, {10, 0.5}, {10, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearCdf({{0, 0}, {10, 0.5}, {5, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearCdf({{0, 0}, {10, 0.6}, {20, 0.5}, {30, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearCdf({{-1, 0}, {10, 1}}), std::invalid_argument);
}

TEST_CASE("input validation on score sets") {
  CHECK_THROWS_AS(SupportedSet({}), std::invalid_argument);
  CHECK_THROWS_AS(SupportedSet({0.0}), std::invalid_argument);
  CHECK_THROWS_AS(SupportedSet({-2.0, 5.0}), std::invalid_argument);
  CHECK_THROWS_AS(SupportedSet({std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(Empirical({}), std::invalid_argument);
  CHECK_THROWS_AS(BudgetSpec(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(BudgetSpec(std::nan("")), std::invalid_argument);

  SupportedSet s({7, 3, 5});
  CHECK(s.scores() == std::vector<double>{3, 5, 7});  // ctor sorts
  CHECK(s.min_score() == 3.0);
  CHECK(s.max_score() == 7.0);
}
