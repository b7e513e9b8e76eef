#include <reinforce/unimodal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

namespace reinforce {
namespace {

double budget_tol(double b) { return 1e-9 * std::max(1.0, b); }

ReinforcementPlan identity_plan(const SupportedSet& supported) {
  return ReinforcementPlan{ReinforcedSet::identity(supported)};
}

// Capture geometry for one candidate target: the tangency trace l, the cost
// of raising every entry in (l, h) to h, and the captured index range.
struct Capture {
  double l = 0.0;
  double cost = 0.0;
  std::size_t first = 0;  // first captured index in the sorted scores
  std::size_t last = 0;   // one past the last captured index
  double sum = 0.0;       // sum of captured scores
};

Capture capture_at(const ComplementModel& model, const std::vector<double>& r, double mode,
                   double h) {
  Capture c;
  c.l = h > mode ? solve_chord_tangency(model, h) : mode;
  c.first = std::upper_bound(r.begin(), r.end(), c.l) - r.begin();
  c.last = std::lower_bound(r.begin(), r.end(), h) - r.begin();
  if (c.last < c.first) c.last = c.first;  // h at the mode: empty capture
  for (std::size_t i = c.first; i < c.last; ++i) {
    c.cost += h - r[i];
    c.sum += r[i];
  }
  return c;
}

}  // namespace

UnimodalProfile unimodal_profile(const ComplementModel& model) {
  UnimodalProfile prof;
  prof.model = &model;
  if (const auto* e = std::get_if<Exponential>(&model.law())) {
    prof.mode = 0.0;
    prof.density_at_mode = e->lambda;
    return prof;
  }
  if (const auto* ln = std::get_if<LogNormal>(&model.law())) {
    prof.mode = std::exp(ln->mu - ln->sigma * ln->sigma);
    prof.density_at_mode = model.pdf(prof.mode);
    return prof;
  }
  throw std::domain_error(
      "unimodal_profile: model has no single-peak density; use iterative_solve");
}

ReinforcementPlan solve_decreasing(const SupportedSet& supported, const BudgetSpec& budget) {
  const std::vector<double>& r = supported.scores();
  const double B = budget.total;
  if (B == 0.0) {
    ReinforcementPlan plan = identity_plan(supported);
    plan.utility_before = std::numeric_limits<double>::quiet_NaN();
    plan.utility_after = std::numeric_limits<double>::quiet_NaN();
    return plan;
  }

  // Water level over the m lowest entries: h = (B + sum of those entries)/m.
  // The first m for which h does not spill past the next entry is the answer.
  const std::size_t n = r.size();
  double prefix = 0.0;
  double h = 0.0;
  std::size_t m = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    prefix += r[k - 1];
    h = (B + prefix) / static_cast<double>(k);
    m = k;
    if (k == n || h <= r[k]) break;
  }

  std::vector<Assignment> asg;
  asg.reserve(n);
  double used = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = i < m ? std::max(h, r[i]) : r[i];
    used += target - r[i];
    asg.push_back({r[i], target});
  }

  ReinforcementPlan plan{ReinforcedSet(std::move(asg))};
  plan.budget_total = B;
  plan.budget_used = used;
  plan.targets = {h};
  plan.utility_before = std::numeric_limits<double>::quiet_NaN();
  plan.utility_after = std::numeric_limits<double>::quiet_NaN();
  return plan;
}

double solve_chord_tangency(const ComplementModel& model, double h) {
  const UnimodalProfile prof = unimodal_profile(model);
  const double mode = prof.mode;
  if (!(h > mode)) throw std::domain_error("solve_chord_tangency: h must exceed the density mode");
  if (mode <= 0.0) return 0.0;  // decreasing law: concave cdf, the chord never re-meets it

  const double fh = model.pdf(h);
  const double Fh = model.cdf(h);
  // Same sign as (chord slope from l to h) - f(h); the positive root below
  // the mode is the tangency trace.
  const auto g = [&](double l) { return (Fh - model.cdf(l)) - fh * (h - l); };

  if (g(0.0) >= 0.0) return 0.0;
  double lo = 0.0;
  double hi = mode;
  if (!(g(hi) > 0.0)) {
    // h is so close to the mode that g(mode) ~ (h-mode)^3 drowns in rounding;
    // the locally-parabolic density puts the tangency at mode - 2(h - mode).
    return std::max(0.0, mode - 2.0 * (h - mode));
  }
  for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double chord_tangency_threshold(const ComplementModel& model) {
  const UnimodalProfile prof = unimodal_profile(model);
  const double mode = prof.mode;
  if (mode <= 0.0) return 0.0;

  // A positive tangency exists iff F(h) < h f(h); the gap F(h) - h f(h) is
  // increasing above the mode, so its sign change is the threshold.
  const auto gap = [&](double h) { return model.cdf(h) - h * model.pdf(h); };
  if (gap(mode) >= 0.0) return mode;
  double lo = mode;
  double hi = std::max(2.0 * mode, 1.0);
  for (int it = 0; it < 200 && gap(hi) < 0.0; ++it) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ReinforcementPlan solve_unimodal(const SupportedSet& supported, const ComplementModel& model,
                                 const BudgetSpec& budget) {
  const UnimodalProfile prof = unimodal_profile(model);
  const double B = budget.total;
  const double u_before = utility(supported, model);

  if (B == 0.0) {
    ReinforcementPlan plan = identity_plan(supported);
    plan.utility_before = u_before;
    plan.utility_after = u_before;
    return plan;
  }

  if (prof.mode <= 0.0) {
    ReinforcementPlan plan = solve_decreasing(supported, budget);
    double af = model.pdf(plan.targets.front());
    if (!(af > 0.0)) af = std::numeric_limits<double>::min();
    plan.alpha_final = af;
    plan.utility_before = u_before;
    plan.utility_after = utility(plan.assignments, model);
    if (plan.utility_after < u_before - 1e-12)
      throw internal_error("solve_unimodal: plan decreased the utility");
    return plan;
  }

  const std::vector<double>& r = supported.scores();
  const double mode = prof.mode;

  // The capture cost grows with h, continuously except where the trace l
  // crosses a supported score; bracket the budget and bisect on h.
  double lo = mode;
  double hi = mode + B + supported.max_score();
  for (int it = 0; it < 200 && capture_at(model, r, mode, hi).cost < B; ++it)
    hi = mode + 2.0 * (hi - mode);
  for (int it = 0; it < 400 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double c = capture_at(model, r, mode, mid).cost;
    if (c == B) {
      lo = mid;
      break;
    }
    (c <= B ? lo : hi) = mid;
  }

  double h = lo;
  Capture cap = capture_at(model, r, mode, h);

  const bool snapped = cap.first > 0 && cap.l - r[cap.first - 1] <= 1e-9 * std::max(1.0, cap.l);
  const std::size_t cnt = cap.last - cap.first;
  if (!snapped && cnt > 0) {
    // Exact-budget polish: the level that spends B on the same captured set,
    // accepted only when it does not change the capture geometry.
    const double he = (B + cap.sum) / static_cast<double>(cnt);
    if (he > mode) {
      const Capture ce = capture_at(model, r, mode, he);
      const bool same_cell = ce.first == cap.first && ce.last == cap.last &&
                             !(ce.first > 0 &&
                               ce.l - r[ce.first - 1] <= 1e-9 * std::max(1.0, ce.l));
      if (same_cell) {
        h = he;
        cap = ce;
      }
    }
  }

  std::vector<Assignment> asg;
  asg.reserve(r.size());
  double used = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double target = i >= cap.first && i < cap.last ? h : r[i];
    used += target - r[i];
    asg.push_back({r[i], target});
  }

  std::vector<CollinearScore> col;
  std::vector<CollinearPromotion> promos;
  if (snapped) {
    const double l = r[cap.first - 1];
    col.push_back({l, CollinearKind::Source});
    // Entries sitting exactly on the tangency trace: whole steps l -> h are
    // utility-rate neutral, buy as many as the leftover allows.
    const double step = h - l;
    long long avail = 0;
    for (std::size_t i = cap.first; i-- > 0 && r[i] == l;) ++avail;
    const double residual = B - used;
    if (step > 0.0 && avail > 0 && residual > 0.0) {
      long long k = static_cast<long long>(std::floor(residual / step));
      k = std::min(k, avail);
      while (k > 0 && static_cast<double>(k) * step > residual) --k;
      if (k > 0) {
        long long done = 0;
        for (Assignment& a : asg) {
          if (done == k) break;
          if (a.original == l && a.reinforced == l) {
            a.reinforced = h;
            ++done;
          }
        }
        used += static_cast<double>(k) * step;
        promos.push_back({l, h, k});
      }
    }
  }

  ReinforcementPlan plan{ReinforcedSet(std::move(asg))};
  plan.budget_total = B;
  plan.budget_used = used;
  double af = model.pdf(h);
  if (!(af > 0.0)) af = std::numeric_limits<double>::min();
  plan.alpha_final = af;
  plan.targets = {h};
  plan.collinear = std::move(col);
  plan.collinear_promotions = std::move(promos);
  plan.utility_before = u_before;
  plan.utility_after = utility(plan.assignments, model);
  if (plan.budget_used > B + budget_tol(B))
    throw internal_error("solve_unimodal: plan exceeds the budget");
  if (plan.utility_after < u_before - 1e-12)
    throw internal_error("solve_unimodal: plan decreased the utility");
  return plan;
}

}  // namespace reinforce
