#include "reinforce/basic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "internal_sweep.hpp"

namespace reinforce {
namespace detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double snap_window(double tol, double score) { return tol * std::max(1.0, std::fabs(score)); }

// Sign-change bisection for the analytic trace: g has opposite (or zero)
// signs at lo and hi; returns the crossing to absolute tolerance scaled by x.
template <typename G>
double bisect_crossing(G&& g, double lo, double hi, double g_lo, double x) {
  const double tol = 1e-12 * std::max(1.0, x);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Density-equals-alpha roots of an analytic law, ascending. Used as scan
// boundaries: between consecutive boundaries line-minus-cdf is monotone.
std::vector<double> density_roots(const ComplementModel& model, double alpha) {
  std::vector<double> roots;
  if (const auto* e = std::get_if<Exponential>(&model.law())) {
    if (alpha < e->lambda) roots.push_back(std::log(e->lambda / alpha) / e->lambda);
    return roots;
  }
  if (const auto* l = std::get_if<LogNormal>(&model.law())) {
    const double mu = l->mu;
    const double s2 = l->sigma * l->sigma;
    const double root_two_pi = 2.50662827463100050240;
    double disc = (mu - s2) * (mu - s2) - mu * mu -
                  2.0 * s2 * std::log(alpha * l->sigma * root_two_pi);
    if (disc < 0.0) return roots;
    disc = std::sqrt(disc);
    roots.push_back(std::exp((mu - s2) - disc));
    if (disc > 0.0) roots.push_back(std::exp((mu - s2) + disc));
    return roots;
  }
  if (const auto* p = std::get_if<PiecewiseLinearCdf>(&model.law())) {
    for (const auto& k : p->knots()) roots.push_back(k.x);
    return roots;
  }
  return roots;
}

}  // namespace

SweepContext make_context(const SupportedSet& supported, const ComplementModel& model) {
  SweepContext ctx;
  ctx.model = &model;
  ctx.sup = supported.scores();
  ctx.sup_prefix.assign(ctx.sup.size() + 1, 0.0);
  for (std::size_t i = 0; i < ctx.sup.size(); ++i)
    ctx.sup_prefix[i + 1] = ctx.sup_prefix[i] + ctx.sup[i];
  if (model.is_analytic()) return ctx;

  const Empirical& emp = *model.empirical();
  ctx.pts.reserve(emp.size() + ctx.sup.size());
  ctx.pts.insert(ctx.pts.end(), emp.scores().begin(), emp.scores().end());
  ctx.pts.insert(ctx.pts.end(), ctx.sup.begin(), ctx.sup.end());
  std::sort(ctx.pts.begin(), ctx.pts.end());
  ctx.pts.erase(std::unique(ctx.pts.begin(), ctx.pts.end()), ctx.pts.end());
  ctx.pts_cdf.resize(ctx.pts.size());
  ctx.pts_comp.assign(ctx.pts.size(), 0);
  for (std::size_t i = 0; i < ctx.pts.size(); ++i) {
    ctx.pts_cdf[i] = emp.cdf(ctx.pts[i]);
    ctx.pts_comp[i] = std::binary_search(emp.scores().begin(), emp.scores().end(), ctx.pts[i]);
    if (ctx.pts_comp[i]) ctx.cand_pos.push_back(static_cast<int>(i));
  }
  return ctx;
}

int find_anchor(const SweepContext& ctx, double alpha, double x, double tol, int start_hint) {
  int k = std::min<int>(start_hint, static_cast<int>(ctx.pts.size()) - 1);
  while (k >= 0 && ctx.pts[k] >= x) --k;
  const double fx = ctx.model->cdf(x);
  for (; k >= 0; --k) {
    const double c = (fx - ctx.pts_cdf[k]) / (x - ctx.pts[k]);
    if (c <= alpha * (1.0 + tol)) return k;
  }
  return -1;
}

TraceInfo exact_trace(const SweepContext& ctx, double alpha, double x, double tol,
                      bool zero_fallback) {
  TraceInfo out;
  const double fx = ctx.model->cdf(x);
  const int k = find_anchor(ctx, alpha, x, tol, static_cast<int>(ctx.pts.size()) - 1);
  if (k < 0) {
    out.value = zero_fallback ? 0.0 : std::max(x - fx / alpha, 0.0);
    return out;
  }
  const double z = ctx.pts[k];
  const double c = (fx - ctx.pts_cdf[k]) / (x - z);
  out.anchor_chord = c;
  // One-sided tie test: the anchor search already capped c at alpha*(1+tol),
  // and the two bounds must not round apart or an accepted anchor with c just
  // above alpha would push the trace a hair below z and swallow candidate z.
  if (c >= alpha * (1.0 - tol)) {
    out.value = z;
    out.collinear = true;
    out.kind = ctx.pts_comp[k] ? CollinearKind::Target : CollinearKind::Source;
    return out;
  }
  out.value = x - (x - z) * c / alpha;
  // A supported entry sitting exactly on the chord line just above the trace
  // is a tie as well: snap the trace onto it.
  auto it = std::lower_bound(ctx.sup.begin(), ctx.sup.end(), out.value);
  if (it != ctx.sup.end() && *it < x) {
    const double s = *it;
    const double cs = (fx - ctx.model->cdf(s)) / (x - s);
    if (std::fabs(cs - alpha) <= tol * alpha) {
      out.value = s;
      out.collinear = true;
      out.kind = CollinearKind::Source;
    }
  }
  return out;
}

TraceInfo analytic_trace(const ComplementModel& model, const std::vector<double>& sup,
                         const std::vector<double>& cands, double alpha, double x,
                         double tol) {
  TraceInfo out;
  const double fx = model.cdf(x);
  const auto g = [&](double z) { return fx + alpha * (z - x) - model.cdf(z); };

  std::vector<double> scan = density_roots(model, alpha);
  scan.push_back(0.0);
  std::sort(scan.begin(), scan.end(), std::greater<double>());
  scan.erase(std::unique(scan.begin(), scan.end()), scan.end());

  double prev_p = x;
  double prev_g = 0.0;
  bool first = true;
  double root = -1.0;
  for (double p : scan) {
    // When alpha equals pdf(x) the upper density root is x itself; its float
    // image can land a hair below x where g is pure cancellation noise, so
    // skip the whole snap window rather than just p >= x.
    if (p >= x - snap_window(tol, x)) continue;
    const double gp = g(p);
    if (first && gp == 0.0 && prev_g == 0.0) {
      // cdf runs along the line immediately left of x: empty interval.
      out.value = x;
      return out;
    }
    if ((prev_g > 0.0 && gp <= 0.0) || (prev_g < 0.0 && gp >= 0.0)) {
      root = (gp == 0.0) ? p : bisect_crossing(g, p, prev_p, gp, x);
      break;
    }
    if (prev_g == 0.0 && gp != 0.0 && !first) {
      // Left end of a coincident flat: the maximal meet is its upper edge.
      root = prev_p;
      break;
    }
    prev_p = p;
    prev_g = gp;
    first = false;
  }
  if (root < 0.0) {
    out.value = 0.0;
    return out;
  }

  out.value = root;
  for (double c : cands) {
    if (c < x && std::fabs(root - c) <= snap_window(tol, c)) {
      out.value = c;
      out.collinear = true;
      out.kind = CollinearKind::Target;
      return out;
    }
  }
  auto it = std::lower_bound(sup.begin(), sup.end(), root - snap_window(tol, root));
  if (it != sup.end() && *it < x && std::fabs(root - *it) <= snap_window(tol, *it)) {
    out.value = *it;
    out.collinear = true;
    out.kind = CollinearKind::Source;
  }
  return out;
}

SweepOutcome sweep(const SweepContext& ctx, double alpha, double tol, bool want_plan) {
  SweepOutcome r;
  if (want_plan) r.reinforced = ctx.sup;

  const auto reinforce_range = [&](double lo, double hi) {
    // Entries with original score strictly inside (lo, hi) move to hi.
    const auto b = std::upper_bound(ctx.sup.begin(), ctx.sup.end(), lo);
    const auto e = std::lower_bound(ctx.sup.begin(), ctx.sup.end(), hi);
    const auto bi = static_cast<std::size_t>(b - ctx.sup.begin());
    const auto ei = static_cast<std::size_t>(e - ctx.sup.begin());
    r.budget += static_cast<double>(ei - bi) * hi - (ctx.sup_prefix[ei] - ctx.sup_prefix[bi]);
    if (want_plan)
      for (std::size_t i = bi; i < ei; ++i) r.reinforced[i] = hi;
  };

  if (!ctx.model->is_analytic()) {
    double ltr = kInf;
    int hint = static_cast<int>(ctx.pts.size()) - 1;
    for (int ci = static_cast<int>(ctx.cand_pos.size()) - 1; ci >= 0; --ci) {
      const int xi = ctx.cand_pos[ci];
      const double x = ctx.pts[xi];
      if (x > ltr) continue;
      const double fx = ctx.pts_cdf[xi];
      r.targets.push_back(x);

      double tr = 0.0;
      const int k = find_anchor(ctx, alpha, x, tol, hint);
      if (k >= 0) {
        hint = k;
        const double z = ctx.pts[k];
        const double c = (fx - ctx.pts_cdf[k]) / (x - z);
        r.raw_next = std::max(r.raw_next, std::min(c, alpha));
        // One-sided, mirroring exact_trace: anchored and c >= alpha means tie.
        if (c >= alpha * (1.0 - tol)) {
          tr = z;
          r.collinear.push_back({z, ctx.pts_comp[k] ? CollinearKind::Target
                                                    : CollinearKind::Source});
        } else {
          tr = x - (x - z) * c / alpha;
          const auto it = std::lower_bound(ctx.sup.begin(), ctx.sup.end(), tr);
          if (it != ctx.sup.end() && *it < x) {
            const double s = *it;
            const double cs = (fx - ctx.model->cdf(s)) / (x - s);
            if (std::fabs(cs - alpha) <= tol * alpha) {
              tr = s;
              r.collinear.push_back({s, CollinearKind::Source});
            }
          }
        }
      }
      if (tr < x) {
        r.segments.push_back({tr, x});
        reinforce_range(tr, x);
      }
      r.last_trace = tr;
      ltr = tr;
      if (ltr <= 0.0) break;
    }
  } else {
    const std::vector<double> cands = candidate_targets(*ctx.model, alpha);
    double ltr = kInf;
    for (double x : cands) {
      if (x > ltr) continue;
      r.targets.push_back(x);
      const TraceInfo ti = analytic_trace(*ctx.model, ctx.sup, cands, alpha, x, tol);
      if (ti.collinear) r.collinear.push_back({ti.value, ti.kind});
      if (ti.value < x) {
        r.segments.push_back({ti.value, x});
        reinforce_range(ti.value, x);
      }
      r.last_trace = ti.value;
      ltr = ti.value;
      if (ltr <= 0.0) break;
    }
  }
  std::sort(r.collinear.begin(), r.collinear.end(),
            [](const CollinearScore& a, const CollinearScore& b) { return a.score < b.score; });
  return r;
}

double sweep_budget(const SweepContext& ctx, double alpha, double tol, double* raw_next) {
  const SweepOutcome r = sweep(ctx, alpha, tol, false);
  if (raw_next) *raw_next = r.raw_next;
  return r.budget;
}

}  // namespace detail

std::vector<double> candidate_targets(const ComplementModel& model, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::domain_error("candidate_targets: alpha must be positive and finite");
  std::vector<double> out;
  if (const auto* e = model.empirical()) {
    out = e->scores();
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::reverse(out.begin(), out.end());
    return out;
  }
  if (const auto* e = std::get_if<Exponential>(&model.law())) {
    if (alpha < e->lambda) out.push_back(std::log(e->lambda / alpha) / e->lambda);
    return out;
  }
  if (const auto* l = std::get_if<LogNormal>(&model.law())) {
    if (alpha <= max_density(model)) {
      const double mu = l->mu;
      const double s2 = l->sigma * l->sigma;
      const double root_two_pi = 2.50662827463100050240;
      double disc = (mu - s2) * (mu - s2) - mu * mu -
                    2.0 * s2 * std::log(alpha * l->sigma * root_two_pi);
      disc = std::sqrt(std::max(disc, 0.0));
      out.push_back(std::exp((mu - s2) + disc));
    }
    return out;
  }
  const auto& pl = std::get<PiecewiseLinearCdf>(model.law());
  const auto& kn = pl.knots();
  for (std::size_t i = 0; i + 1 < kn.size(); ++i) {
    const double slope = (kn[i + 1].F - kn[i].F) / (kn[i + 1].x - kn[i].x);
    if (slope < alpha) continue;
    const double next_slope =
        (i + 2 < kn.size()) ? (kn[i + 2].F - kn[i + 1].F) / (kn[i + 2].x - kn[i + 1].x) : 0.0;
    if (next_slope <= alpha) out.push_back(kn[i + 1].x);
  }
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

double trace(const ComplementModel& model, const SupportedSet& supported, double alpha,
             double x, double chord_tolerance) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::domain_error("trace: alpha must be positive and finite");
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("trace: x must be positive and finite");
  if (model.is_analytic()) {
    const std::vector<double> cands = candidate_targets(model, alpha);
    return detail::analytic_trace(model, supported.scores(), cands, alpha, x, chord_tolerance)
        .value;
  }
  const detail::SweepContext ctx = detail::make_context(supported, model);
  return detail::exact_trace(ctx, alpha, x, chord_tolerance, false).value;
}

AlphaSolution basic_solve(const SupportedSet& supported, const ComplementModel& model,
                          double alpha, const BasicSolveOptions& opts) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::domain_error("basic_solve: alpha must be positive and finite");

  const detail::SweepContext ctx = detail::make_context(supported, model);
  detail::SweepOutcome out = detail::sweep(ctx, alpha, opts.chord_tolerance, true);

  std::vector<Assignment> plan;
  plan.reserve(ctx.sup.size());
  for (std::size_t i = 0; i < ctx.sup.size(); ++i) plan.push_back({ctx.sup[i], out.reinforced[i]});

  AlphaSolution sol{ReinforcedSet(std::move(plan))};
  sol.alpha = alpha;
  sol.targets = std::move(out.targets);
  sol.segments = std::move(out.segments);
  sol.budget_used = out.budget;
  sol.collinear = std::move(out.collinear);
  sol.last_trace = out.last_trace;

  if (model.is_analytic()) {
    const bool saturated = sol.segments.size() == 1 && sol.segments[0].low == 0.0 &&
                           model.cdf(sol.segments[0].high) >= 1.0;
    sol.next_alpha = saturated ? 0.0 : alpha;
    return sol;
  }

  sol.next_alpha = out.raw_next;
  if (opts.refine_next) {
    // Walk past slopes where only the geometry (not the budget) changes, so
    // next_alpha reports where spending actually starts to grow.
    for (int it = 0; it < 64 && sol.next_alpha > 0.0; ++it) {
      const double probe = sol.next_alpha * (1.0 - 1e-6);
      double probe_next = 0.0;
      const double b = detail::sweep_budget(ctx, probe, opts.chord_tolerance, &probe_next);
      if (std::fabs(b - sol.budget_used) > 1e-12 * std::max(1.0, sol.budget_used)) break;
      sol.next_alpha = probe_next;
    }
  }
  return sol;
}

std::vector<BudgetCurvePoint> budget_curve(const SupportedSet& supported,
                                           const ComplementModel& model,
                                           std::vector<double> alphas,
                                           const BasicSolveOptions& opts) {
  if (alphas.empty()) throw std::domain_error("budget_curve: alphas must be non-empty");
  for (double a : alphas)
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::domain_error("budget_curve: alphas must be positive and finite");
  std::sort(alphas.begin(), alphas.end(), std::greater<double>());
  std::vector<BudgetCurvePoint> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    const AlphaSolution s = basic_solve(supported, model, a, opts);
    out.push_back({a, s.budget_used, s.next_alpha});
  }
  return out;
}

}  // namespace reinforce
