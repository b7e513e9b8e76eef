#include "reinforce/score_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace reinforce {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Standard normal cdf via erfc; keeps full precision in both tails.
double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

std::vector<double> checked_scores(std::vector<double> scores, const char* who) {
  if (scores.empty()) throw std::invalid_argument(std::string(who) + ": no scores");
  for (double s : scores) {
    if (!std::isfinite(s) || s <= 0.0)
      throw std::invalid_argument(std::string(who) + ": scores must be finite and > 0");
  }
  std::sort(scores.begin(), scores.end());
  return scores;
}

}  // namespace

SupportedSet::SupportedSet(std::vector<double> scores)
    : scores_(checked_scores(std::move(scores), "SupportedSet")) {}

ReinforcedSet::ReinforcedSet(std::vector<Assignment> assignments)
    : assignments_(std::move(assignments)) {
  require(!assignments_.empty(), "ReinforcedSet: no assignments");
  for (const Assignment& a : assignments_) {
    require(std::isfinite(a.original) && std::isfinite(a.reinforced),
            "ReinforcedSet: scores must be finite");
    require(a.original > 0.0, "ReinforcedSet: original scores must be > 0");
    require(a.reinforced >= a.original, "ReinforcedSet: reinforced < original");
  }
  std::sort(assignments_.begin(), assignments_.end(),
            [](const Assignment& l, const Assignment& r) {
              return l.original != r.original ? l.original < r.original
                                              : l.reinforced < r.reinforced;
            });
}

ReinforcedSet ReinforcedSet::identity(const SupportedSet& supported) {
  std::vector<Assignment> out;
  out.reserve(supported.size());
  for (double s : supported.scores()) out.push_back({s, s});
  return ReinforcedSet(std::move(out));
}

double ReinforcedSet::total_cost() const {
  double sum = 0.0;
  for (const Assignment& a : assignments_) sum += a.cost();
  return sum;
}

Empirical::Empirical(std::vector<double> scores)
    : scores_(checked_scores(std::move(scores), "Empirical")) {}

double Empirical::cdf(double x) const {
  auto it = std::upper_bound(scores_.begin(), scores_.end(), x);
  return static_cast<double>(it - scores_.begin()) / static_cast<double>(scores_.size());
}

Exponential::Exponential(double lambda_in) : lambda(lambda_in) {
  require(std::isfinite(lambda) && lambda > 0.0, "Exponential: lambda must be > 0");
}

double Exponential::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-lambda * x);
}

double Exponential::pdf(double x) const {
  if (x < 0.0) return 0.0;
  return lambda * std::exp(-lambda * x);
}

LogNormal::LogNormal(double mu_in, double sigma_in) : mu(mu_in), sigma(sigma_in) {
  require(std::isfinite(mu), "LogNormal: mu must be finite");
  require(std::isfinite(sigma) && sigma > 0.0, "LogNormal: sigma must be > 0");
}

double LogNormal::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  return normal_cdf((std::log(x) - mu) / sigma);
}

double LogNormal::pdf(double x) const {
  if (x <= 0.0) return 0.0;
  const double t = (std::log(x) - mu) / sigma;
  constexpr double root_two_pi = 2.50662827463100050240;
  return std::exp(-0.5 * t * t) / (x * sigma * root_two_pi);
}

PiecewiseLinearCdf::PiecewiseLinearCdf(std::vector<Knot> knots) : knots_(std::move(knots)) {
  require(knots_.size() >= 2, "PiecewiseLinearCdf: need at least two knots");
  for (const Knot& k : knots_)
    require(std::isfinite(k.x) && std::isfinite(k.F), "PiecewiseLinearCdf: knots must be finite");
  require(knots_.front().x >= 0.0, "PiecewiseLinearCdf: knots must have x >= 0");
  require(knots_.front().F == 0.0, "PiecewiseLinearCdf: first knot must have F = 0");
  require(knots_.back().F == 1.0, "PiecewiseLinearCdf: last knot must have F = 1");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    require(knots_[i - 1].x < knots_[i].x, "PiecewiseLinearCdf: x must be strictly increasing");
    require(knots_[i - 1].F <= knots_[i].F, "PiecewiseLinearCdf: F must be non-decreasing");
  }
}

double PiecewiseLinearCdf::cdf(double x) const {
  if (x <= knots_.front().x) return 0.0;
  if (x >= knots_.back().x) return 1.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const Knot& k) { return v < k.x; });
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  return lo.F + (hi.F - lo.F) * (x - lo.x) / (hi.x - lo.x);
}

double PiecewiseLinearCdf::pdf(double x) const {
  if (x < knots_.front().x || x >= knots_.back().x) return 0.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const Knot& k) { return v < k.x; });
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  return (hi.F - lo.F) / (hi.x - lo.x);
}

double ComplementModel::cdf(double x) const {
  return std::visit([x](const auto& law) { return law.cdf(x); }, law_);
}

double ComplementModel::pdf(double x) const {
  return std::visit(
      [x](const auto& law) -> double {
        if constexpr (requires { law.pdf(x); }) {
          return law.pdf(x);
        } else {
          throw std::domain_error("pdf: exact model has no density");
        }
      },
      law_);
}

bool ComplementModel::is_analytic() const {
  return !std::holds_alternative<Empirical>(law_);
}

double chord_gradient(const ComplementModel& model, double z, double x) {
  require(std::isfinite(z) && std::isfinite(x), "chord_gradient: scores must be finite");
  require(z >= 0.0, "chord_gradient: z must be >= 0");
  require(z < x, "chord_gradient: requires z < x");
  return (model.cdf(x) - model.cdf(z)) / (x - z);
}

double mode_score(const ComplementModel& model) {
  if (std::holds_alternative<Exponential>(model.law())) return 0.0;
  if (const auto* l = std::get_if<LogNormal>(&model.law()))
    return std::exp(l->mu - l->sigma * l->sigma);
  if (const auto* p = std::get_if<PiecewiseLinearCdf>(&model.law())) {
    const auto& ks = p->knots();
    double best_slope = -1.0;
    double best_x = ks.front().x;
    for (std::size_t i = 1; i < ks.size(); ++i) {
      const double slope = (ks[i].F - ks[i - 1].F) / (ks[i].x - ks[i - 1].x);
      if (slope > best_slope) {
        best_slope = slope;
        best_x = ks[i - 1].x;
      }
    }
    return best_x;
  }
  throw std::domain_error("mode_score: exact model has no density");
}

double max_density(const ComplementModel& model) {
  if (const auto* e = std::get_if<Exponential>(&model.law())) return e->lambda;
  if (const auto* l = std::get_if<LogNormal>(&model.law()))
    return l->pdf(std::exp(l->mu - l->sigma * l->sigma));
  if (const auto* p = std::get_if<PiecewiseLinearCdf>(&model.law())) {
    const auto& ks = p->knots();
    double best = 0.0;
    for (std::size_t i = 1; i < ks.size(); ++i)
      best = std::max(best, (ks[i].F - ks[i - 1].F) / (ks[i].x - ks[i - 1].x));
    return best;
  }
  throw std::domain_error("max_density: exact model has no density");
}

double expectation(const ComplementModel& model) {
  if (const auto* e = std::get_if<Empirical>(&model.law())) {
    const auto& s = e->scores();
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  }
  if (const auto* e = std::get_if<Exponential>(&model.law())) return 1.0 / e->lambda;
  if (const auto* l = std::get_if<LogNormal>(&model.law()))
    return std::exp(l->mu + 0.5 * l->sigma * l->sigma);
  const auto& ks = std::get<PiecewiseLinearCdf>(model.law()).knots();
  double mean = 0.0;
  for (std::size_t i = 1; i < ks.size(); ++i) {
    const double slope = (ks[i].F - ks[i - 1].F) / (ks[i].x - ks[i - 1].x);
    mean += slope * (ks[i].x * ks[i].x - ks[i - 1].x * ks[i - 1].x) / 2.0;
  }
  return mean;
}

double score_utility(double score, const ComplementModel& model) {
  return 2.0 * model.cdf(score) - 1.0;
}

double utility(const SupportedSet& supported, const ComplementModel& model) {
  double sum = 0.0;
  for (double s : supported.scores()) sum += score_utility(s, model);
  return sum / static_cast<double>(supported.size());
}

double utility(const ReinforcedSet& reinforced, const ComplementModel& model) {
  double sum = 0.0;
  for (const Assignment& a : reinforced.assignments()) sum += score_utility(a.reinforced, model);
  return sum / static_cast<double>(reinforced.size());
}

BudgetSpec::BudgetSpec(double total_in) : total(total_in) {
  require(std::isfinite(total) && total >= 0.0, "BudgetSpec: total must be finite and >= 0");
}

}  // namespace reinforce
