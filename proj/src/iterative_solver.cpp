#include "reinforce/iterative_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "internal_sweep.hpp"

namespace reinforce {

namespace {

constexpr double kChordTol = 1e-9;

double budget_tol(double b) { return 1e-12 * std::max(1.0, b); }

bool is_collinear_score(const AlphaSolution& sol, double s) {
  for (const CollinearScore& c : sol.collinear)
    if (c.score == s) return true;
  return false;
}

// Top of the collinear chain starting at y: follow segment [y, h1), then
// [h1, h2), ... while the high end stays collinear.
double collinear_chain_top(const AlphaSolution& sol, double y) {
  double cur = y;
  for (std::size_t guard = 0; guard <= sol.segments.size(); ++guard) {
    const Segment* seg = nullptr;
    for (const Segment& s : sol.segments) {
      if (s.low == cur) {
        seg = &s;
        break;
      }
    }
    if (seg == nullptr) throw internal_error("collinear chain: no segment starts at a collinear score");
    cur = seg->high;
    if (!is_collinear_score(sol, cur)) return cur;
  }
  throw internal_error("collinear chain does not terminate");
}

// ---- exact-mode finishers ------------------------------------------------

// Smallest k in 0..6 such that every value times 10^k is an integer (1e-9
// relative tolerance); -1 when none is.
int grid_exponent_of(const std::vector<double>& vals) {
  double scale = 1.0;
  for (int k = 0; k <= 6; ++k, scale *= 10.0) {
    bool ok = true;
    for (double v : vals) {
      const double s = v * scale;
      if (std::fabs(s - std::llround(s)) > 1e-9 * std::max(1.0, std::fabs(s))) {
        ok = false;
        break;
      }
    }
    if (ok) return k;
  }
  return -1;
}

// Exact tail optimization over an integer grid: per entry, keep the current
// score or raise it to a distinct complement score, maximizing (wins, -cost)
// lexicographically under the budget. Returns false when the instance has no
// common grid or the table would be too large; true once the DP ran (whether
// or not it improved on the incoming plan). On a strict improvement the
// assignments are replaced by the canonical optimum (each entry takes the
// lowest target compatible with some optimal completion).
bool dp_finish(std::vector<Assignment>& asg, const std::vector<double>& comp, double B,
               double& used) {
  std::vector<double> vals;
  vals.reserve(asg.size() + comp.size());
  for (const Assignment& a : asg) vals.push_back(a.original);
  for (double c : comp) vals.push_back(c);
  const int k = grid_exponent_of(vals);
  if (k < 0) return false;
  double scale = 1.0;
  for (int i = 0; i < k; ++i) scale *= 10.0;
  const auto to_int = [&](double v) { return std::llround(v * scale); };

  const double bs = B * scale;
  const long long bu = static_cast<long long>(std::floor(bs + 1e-9 * std::max(1.0, bs)));
  if (bu < 0) return false;
  const std::size_t n = asg.size();

  std::vector<long long> comp_i;
  comp_i.reserve(comp.size());
  for (double c : comp) comp_i.push_back(to_int(c));
  std::vector<std::pair<long long, double>> targets;  // distinct, ascending
  for (std::size_t i = 0; i < comp.size(); ++i)
    if (targets.empty() || targets.back().first != comp_i[i]) targets.push_back({comp_i[i], comp[i]});

  if (static_cast<double>(n) * static_cast<double>(targets.size() + 1) *
          static_cast<double>(bu + 1) >
      2e7)
    return false;
  if (static_cast<double>(n + 1) * static_cast<double>(bu + 1) > 4e6) return false;

  const auto wins = [&](long long t) {
    return static_cast<long long>(std::upper_bound(comp_i.begin(), comp_i.end(), t) -
                                  comp_i.begin());
  };

  // Lexicographic (wins, -cost) encoded as wins*BIG - cost with cost <= bu.
  const long long BIG = bu + 1;
  struct Opt {
    long long cost;
    long long val;
    double score;
  };
  std::vector<std::vector<Opt>> opts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long long own = to_int(asg[i].original);
    opts[i].push_back({0, wins(own) * BIG, asg[i].original});
    for (const auto& [ti, td] : targets)
      if (ti > own) opts[i].push_back({ti - own, wins(ti) * BIG - (ti - own), td});
  }

  std::vector<std::vector<long long>> suf(n + 1,
                                          std::vector<long long>(static_cast<std::size_t>(bu) + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (long long b = 0; b <= bu; ++b) {
      long long best = std::numeric_limits<long long>::min();
      for (const Opt& o : opts[i]) {
        if (o.cost > b) break;  // options ascend in target, hence in cost
        best = std::max(best, o.val + suf[i + 1][static_cast<std::size_t>(b - o.cost)]);
      }
      suf[i][static_cast<std::size_t>(b)] = best;
    }
  }

  const long long vdp = suf[0][static_cast<std::size_t>(bu)];
  const long long w_dp = (vdp + BIG - 1) / BIG;
  const long long cost_dp = w_dp * BIG - vdp;
  long long w_pipe = 0, cost_pipe = 0;
  for (const Assignment& a : asg) {
    const long long r = to_int(a.reinforced);
    w_pipe += wins(r);
    cost_pipe += r - to_int(a.original);
  }
  if (!(w_dp > w_pipe || (w_dp == w_pipe && cost_dp < cost_pipe))) return true;

  long long b = bu;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Opt& o : opts[i]) {
      if (o.cost <= b &&
          o.val + suf[i + 1][static_cast<std::size_t>(b - o.cost)] ==
              suf[i][static_cast<std::size_t>(b)]) {
        asg[i].reinforced = o.score;
        b -= o.cost;
        break;
      }
    }
  }
  used = 0.0;
  for (const Assignment& a : asg) used += a.reinforced - a.original;
  return true;
}

// Budget-bounded best-effort pass for instances beyond the DP's reach: repeat
// the cheapest available raise-to-next-distinct-complement-score step (every
// such step gains wins) while it fits in the remaining slack.
void greedy_finish(std::vector<Assignment>& asg, const std::vector<double>& comp, double B,
                   double& used) {
  std::vector<double> distinct;
  distinct.reserve(comp.size());
  for (double c : comp)
    if (distinct.empty() || distinct.back() != c) distinct.push_back(c);

  double slack = B - used;
  using Up = std::pair<double, std::size_t>;  // (cost, entry)
  std::priority_queue<Up, std::vector<Up>, std::greater<Up>> heap;
  std::vector<std::size_t> next_idx(asg.size(), 0);
  const auto seed = [&](std::size_t e) {
    const auto it = std::upper_bound(distinct.begin(), distinct.end(), asg[e].reinforced);
    if (it == distinct.end()) return;
    next_idx[e] = static_cast<std::size_t>(it - distinct.begin());
    heap.push({*it - asg[e].reinforced, e});
  };
  for (std::size_t e = 0; e < asg.size(); ++e) seed(e);

  for (long long pops = 0; !heap.empty() && pops < 400000; ++pops) {
    const auto [cost, e] = heap.top();
    heap.pop();
    if (cost > slack) break;  // cheapest step unaffordable: nothing else fits
    asg[e].reinforced = distinct[next_idx[e]];
    used += cost;
    slack -= cost;
    seed(e);
  }
}

// ---- slope-space search (empirical and piecewise-linear laws) -------------

struct ProbeOut {
  double budget = 0.0;
  double next = 0.0;  // slope the search may jump to; 0 marks saturation
};

ReinforcementPlan solve_alpha_space(const SupportedSet& supported, const ComplementModel& model,
                                    const BudgetSpec& budget, double eps) {
  const double B = budget.total;
  const bool exact = !model.is_analytic();
  const double tolB = budget_tol(B);
  const detail::SweepContext ctx = detail::make_context(supported, model);

  const auto probe = [&](double a) -> ProbeOut {
    if (exact) {
      ProbeOut p;
      p.budget = detail::sweep_budget(ctx, a, kChordTol, &p.next);
      return p;
    }
    const detail::SweepOutcome out = detail::sweep(ctx, a, kChordTol, false);
    const bool saturated = out.segments.size() == 1 && out.segments.front().low == 0.0 &&
                           model.cdf(out.segments.front().high) >= 1.0;
    return {out.budget, saturated ? 0.0 : a};
  };
  const auto fits_exactly = [&](const ProbeOut& p) {
    return p.budget <= B && B - p.budget <= tolB;
  };

  double alpha0;
  if (exact) {
    const Empirical& emp = *model.empirical();
    const double range = std::max(supported.max_score(), emp.max_score()) -
                         std::min(supported.min_score(), emp.min_score());
    alpha0 = range > 0.0 ? 1.0 / range : 1.0;
  } else {
    alpha0 = max_density(model) / 2.0;
  }

  // Bracket: lo spends at least B, hi spends less than B.
  double lo = 0.0, hi = 0.0;
  bool settled = false;
  double final_alpha = 0.0;

  ProbeOut p0 = probe(alpha0);
  if (fits_exactly(p0)) {
    settled = true;
    final_alpha = alpha0;
  } else if (p0.budget < B) {
    hi = alpha0;
    double a = alpha0;
    for (int it = 0;; ++it) {
      if (it > 1200) throw internal_error("iterative_solve: slope halving did not bracket the budget");
      if (p0.next == 0.0) {
        // Saturated below the budget: nothing more can ever be spent.
        settled = true;
        final_alpha = a;
        break;
      }
      a /= 2.0;
      p0 = probe(a);
      if (fits_exactly(p0)) {
        settled = true;
        final_alpha = a;
        break;
      }
      if (p0.budget >= B) {
        lo = a;
        break;
      }
      hi = a;
    }
  } else {
    lo = alpha0;
    double a = alpha0;
    for (int it = 0;; ++it) {
      if (it > 1200 || !std::isfinite(a))
        throw internal_error("iterative_solve: slope doubling did not bracket the budget");
      a *= 2.0;
      const ProbeOut p = probe(a);
      if (fits_exactly(p)) {
        settled = true;
        final_alpha = a;
        break;
      }
      if (p.budget < B) {
        hi = a;
        break;
      }
      lo = a;
    }
  }

  int guard = 0;
  while (!settled && hi - lo > eps) {
    if (++guard > 400) throw internal_error("iterative_solve: slope search failed to converge");
    const double m = 0.5 * (lo + hi);
    if (m <= lo || m >= hi) break;  // double precision exhausted
    const ProbeOut p = probe(m);
    if (fits_exactly(p)) {
      settled = true;
      final_alpha = m;
      break;
    }
    if (p.budget < B) {
      // The spend below m changes next at p.next; everything in (p.next, m]
      // costs the same, so the crossing cannot sit in that span.
      hi = (p.next > 0.0 && p.next <= m && p.next >= lo) ? p.next : m;
    } else {
      lo = m;
    }
  }
  if (!settled) final_alpha = hi;

  BasicSolveOptions opts;
  opts.chord_tolerance = kChordTol;
  opts.refine_next = false;
  AlphaSolution sol = basic_solve(supported, model, final_alpha, opts);
  if (sol.budget_used > B + 1e-9 * std::max(1.0, B))
    throw internal_error("iterative_solve: landed on an infeasible slope");

  std::vector<Assignment> asg = sol.plan.assignments();
  double used = sol.budget_used;
  std::vector<CollinearPromotion> promos;

  // Tie-break spending: entries parked at collinear scores may be promoted to
  // the top of their chain in whole quanta without changing the slope story.
  if (B - used > tolB && !sol.collinear.empty()) {
    struct Item {
      double y = 0.0;
      double top = 0.0;
      double step = 0.0;
      long long avail = 0;
    };
    std::vector<Item> items;
    for (const CollinearScore& c : sol.collinear) {
      const double top = collinear_chain_top(sol, c.score);
      if (!(top > c.score)) continue;
      long long avail = 0;
      for (const Assignment& a : asg) avail += a.reinforced == c.score ? 1 : 0;
      if (avail > 0) items.push_back({c.score, top, top - c.score, avail});
    }
    const double residual = B - used;
    std::vector<long long> take(items.size(), 0);
    if (items.size() == 1) {
      long long k = static_cast<long long>(std::floor(residual / items[0].step));
      k = std::min(k, items[0].avail);
      while (k > 0 && static_cast<double>(k) * items[0].step > residual) --k;
      take[0] = k;
    } else if (items.size() > 1) {
      std::vector<KnapsackItem> ki;
      ki.reserve(items.size());
      for (const Item& it : items) ki.push_back({it.step, it.avail});
      take = bounded_knapsack(residual, ki);
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (take[i] <= 0) continue;
      long long done = 0;
      for (Assignment& a : asg) {
        if (done == take[i]) break;
        if (a.reinforced == items[i].y) {
          a.reinforced = items[i].top;
          ++done;
        }
      }
      used += static_cast<double>(take[i]) * items[i].step;
      promos.push_back({items[i].y, items[i].top, take[i]});
    }
  }

  // With an exact law and exact termination, settle the leftover integral
  // slack optimally (small instances) or greedily (large ones).
  if (exact && eps == 0.0 && B - used > tolB) {
    const double u_now = utility(ReinforcedSet(asg), model);
    if (u_now < 1.0 - 1e-12) {
      const std::vector<double>& comp = model.empirical()->scores();
      const std::vector<Assignment> before = asg;
      if (dp_finish(asg, comp, B, used)) {
        bool same = asg.size() == before.size();
        for (std::size_t i = 0; same && i < asg.size(); ++i)
          same = asg[i].original == before[i].original && asg[i].reinforced == before[i].reinforced;
        if (!same) promos.clear();  // the plan was rebuilt from scratch
      } else {
        greedy_finish(asg, comp, B, used);
      }
    }
  }

  ReinforcementPlan plan{ReinforcedSet(std::move(asg))};
  plan.budget_total = B;
  plan.budget_used = used;
  plan.alpha_final = final_alpha;
  plan.targets = std::move(sol.targets);
  plan.collinear = std::move(sol.collinear);
  plan.collinear_promotions = std::move(promos);
  return plan;
}

// ---- height-space search (smooth laws) ------------------------------------

// For exponential and log-normal complements every slope admits at most one
// target, so the search runs directly over the target height h: spend is the
// total lift of entries strictly between the trace and h, which grows
// monotonically in h.
ReinforcementPlan solve_smooth(const SupportedSet& supported, const ComplementModel& model,
                               const BudgetSpec& budget, double eps) {
  const double B = budget.total;
  const double tolB = budget_tol(B);
  const std::vector<double>& sup = supported.scores();
  std::vector<double> pre(sup.size() + 1, 0.0);
  for (std::size_t i = 0; i < sup.size(); ++i) pre[i + 1] = pre[i] + sup[i];
  const double M = mode_score(model);

  struct Geom {
    double budget = 0.0;
    double l = 0.0;
    bool snapped = false;
    std::size_t lo_idx = 0, hi_idx = 0;  // entries [lo_idx, hi_idx) get raised to h
  };
  const auto geom = [&](double h) -> Geom {
    Geom g;
    if (!(h > 0.0) || h <= M) {
      g.l = h;
      return g;
    }
    const double a = model.pdf(h);
    detail::TraceInfo ti;
    // Density underflow leaves a flat line: everything below h is reinforced.
    if (a > 0.0) ti = detail::analytic_trace(model, sup, {h}, a, h, kChordTol);
    g.l = ti.value;
    g.snapped = ti.collinear && ti.kind == CollinearKind::Source;
    g.lo_idx = static_cast<std::size_t>(std::upper_bound(sup.begin(), sup.end(), g.l) - sup.begin());
    g.hi_idx = static_cast<std::size_t>(std::lower_bound(sup.begin(), sup.end(), h) - sup.begin());
    if (g.hi_idx > g.lo_idx)
      g.budget = static_cast<double>(g.hi_idx - g.lo_idx) * h - (pre[g.hi_idx] - pre[g.lo_idx]);
    return g;
  };
  const auto fits_exactly = [&](const Geom& g) { return g.budget <= B && B - g.budget <= tolB; };

  double lo_h = std::max(M, 0.0);
  double hi_h = lo_h + B + sup.back();
  Geom gh = geom(hi_h);
  for (int it = 0; gh.budget < B; ++it) {
    if (it > 200 || !std::isfinite(hi_h))
      throw internal_error("iterative_solve: height bracket extension failed");
    hi_h *= 2.0;
    gh = geom(hi_h);
  }

  bool settled = false;
  double h_final = 0.0;
  Geom gf;
  if (fits_exactly(gh)) {
    settled = true;
    h_final = hi_h;
    gf = gh;
  }
  int guard = 0;
  while (!settled) {
    if (++guard > 400) throw internal_error("iterative_solve: height search failed to converge");
    const bool h_done = hi_h - lo_h <= 1e-12 * std::max(1.0, hi_h);
    // Underflowed densities make the slope gap meaningless; fall through to
    // the height-resolution test instead.
    const double pdf_lo = model.pdf(lo_h);
    const bool a_done = pdf_lo > 0.0 && pdf_lo - model.pdf(hi_h) <= eps;
    if (h_done || a_done) {
      h_final = lo_h;
      gf = geom(lo_h);
      break;
    }
    const double m = 0.5 * (lo_h + hi_h);
    if (m <= lo_h || m >= hi_h) {
      h_final = lo_h;
      gf = geom(lo_h);
      break;
    }
    const Geom gm = geom(m);
    if (fits_exactly(gm)) {
      settled = true;
      h_final = m;
      gf = gm;
      break;
    }
    if (gm.budget < B) {
      lo_h = m;
    } else {
      hi_h = m;
    }
  }

  // Exact-budget polish: when the waterline is in open terrain (trace not
  // pinned to an entry) the height with spend exactly B is closed-form;
  // accept it if it keeps the same entries under the line.
  if (!settled && !gf.snapped && gf.hi_idx > gf.lo_idx) {
    const double cnt = static_cast<double>(gf.hi_idx - gf.lo_idx);
    const double sum = pre[gf.hi_idx] - pre[gf.lo_idx];
    const double he = (B + sum) / cnt;
    if (std::isfinite(he) && he > M) {
      const Geom ge = geom(he);
      if (!ge.snapped && ge.lo_idx == gf.lo_idx && ge.hi_idx == gf.hi_idx) {
        h_final = he;
        gf = ge;
      }
    }
  }

  std::vector<Assignment> asg;
  asg.reserve(sup.size());
  for (std::size_t i = 0; i < sup.size(); ++i) {
    const bool raised = i >= gf.lo_idx && i < gf.hi_idx;
    asg.push_back({sup[i], raised ? h_final : sup[i]});
  }
  double used = gf.budget;
  std::vector<CollinearPromotion> promos;
  std::vector<CollinearScore> col;
  if (gf.snapped) col.push_back({gf.l, CollinearKind::Source});

  // Trace pinned to an entry score: spend the residual by lifting entries off
  // that score one full step at a time.
  if (gf.snapped && B - used > tolB) {
    const double step = h_final - gf.l;
    long long avail = 0;
    for (const Assignment& a : asg) avail += a.reinforced == gf.l ? 1 : 0;
    if (step > 0.0 && avail > 0) {
      const double residual = B - used;
      long long k = static_cast<long long>(std::floor(residual / step));
      k = std::min(k, avail);
      while (k > 0 && static_cast<double>(k) * step > residual) --k;
      if (k > 0) {
        long long done = 0;
        for (Assignment& a : asg) {
          if (done == k) break;
          if (a.reinforced == gf.l) {
            a.reinforced = h_final;
            ++done;
          }
        }
        used += static_cast<double>(k) * step;
        promos.push_back({gf.l, h_final, k});
      }
    }
  }

  ReinforcementPlan plan{ReinforcedSet(std::move(asg))};
  plan.budget_total = B;
  plan.budget_used = used;
  double af = model.pdf(h_final);
  if (!(af > 0.0)) af = std::numeric_limits<double>::min();
  plan.alpha_final = af;
  plan.targets = {h_final};
  plan.collinear = std::move(col);
  plan.collinear_promotions = std::move(promos);
  return plan;
}

}  // namespace

double promotion_step_size(const AlphaSolution& solution, double y) {
  if (!is_collinear_score(solution, y))
    throw std::domain_error("promotion_step_size: score is not collinear in this solution");
  return collinear_chain_top(solution, y) - y;
}

std::vector<long long> bounded_knapsack(double capacity, const std::vector<KnapsackItem>& items) {
  if (!std::isfinite(capacity) || capacity < 0.0)
    throw std::invalid_argument("bounded_knapsack: capacity must be finite and >= 0");
  for (const KnapsackItem& it : items) {
    if (!std::isfinite(it.size) || !(it.size > 0.0))
      throw std::invalid_argument("bounded_knapsack: item sizes must be finite and > 0");
    if (it.available < 0)
      throw std::invalid_argument("bounded_knapsack: item availability must be >= 0");
  }
  const std::size_t n = items.size();
  std::vector<long long> counts(n, 0);
  if (n == 0 || capacity == 0.0) return counts;
  const double tol = 1e-9 * std::max(1.0, capacity);

  std::vector<long long> cap_counts(n);
  double space = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto by_cap = static_cast<long long>(std::floor((capacity + tol) / items[i].size));
    cap_counts[i] = std::min(items[i].available, by_cap);
    space *= static_cast<double>(cap_counts[i]) + 1.0;
  }

  if (space <= 1e6) {
    // Exhaustive; counts iterate downward so the first optimum found is the
    // one using the most of the earliest items.
    std::vector<long long> cur(n, 0);
    double best = -1.0;
    const std::function<void(std::size_t, double)> rec = [&](std::size_t i, double fill) {
      if (i == n) {
        if (fill > best) {
          best = fill;
          counts = cur;
        }
        return;
      }
      for (long long c = cap_counts[i]; c >= 0; --c) {
        const double nf = fill + static_cast<double>(c) * items[i].size;
        if (nf <= capacity + tol) {
          cur[i] = c;
          rec(i + 1, nf);
        }
      }
      cur[i] = 0;
    };
    rec(0, 0.0);
    return counts;
  }

  // Grid DP at half the smallest size, counts split into binary bundles.
  double min_size = items[0].size;
  for (const KnapsackItem& it : items) min_size = std::min(min_size, it.size);
  double unit = min_size / 2.0;
  if ((capacity + tol) / unit > 2e7) unit = capacity / 2e7;
  const auto u_cap = static_cast<long long>(std::floor((capacity + tol) / unit));

  struct Bundle {
    std::size_t item;
    long long mult;
    long long w;
    double fill;
  };
  std::vector<Bundle> bundles;
  for (std::size_t i = 0; i < n; ++i) {
    const long long w = std::max<long long>(1, std::llround(items[i].size / unit));
    long long rem = cap_counts[i];
    for (long long p = 1; rem > 0; p *= 2) {
      const long long take = std::min(p, rem);
      bundles.push_back({i, take, take * w, static_cast<double>(take) * items[i].size});
      rem -= take;
    }
  }

  if (static_cast<double>(bundles.size()) * (static_cast<double>(u_cap) + 1.0) <= 8e6) {
    std::vector<double> dp(static_cast<std::size_t>(u_cap) + 1, 0.0);
    std::vector<std::vector<unsigned char>> chose(
        bundles.size(), std::vector<unsigned char>(static_cast<std::size_t>(u_cap) + 1, 0));
    for (std::size_t k = 0; k < bundles.size(); ++k) {
      const Bundle& bd = bundles[k];
      for (long long b = u_cap; b >= bd.w; --b) {
        const auto bi = static_cast<std::size_t>(b);
        const double cand = dp[static_cast<std::size_t>(b - bd.w)] + bd.fill;
        if (cand > dp[bi] && cand <= capacity + tol) {
          dp[bi] = cand;
          chose[k][bi] = 1;
        }
      }
    }
    long long b = u_cap;
    for (std::size_t k = bundles.size(); k-- > 0;) {
      if (chose[k][static_cast<std::size_t>(b)]) {
        counts[bundles[k].item] += bundles[k].mult;
        b -= bundles[k].w;
      }
    }
  } else {
    // Too large even for the grid: largest-first greedy fill.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return items[a].size > items[b].size; });
    double left = capacity + tol;
    for (std::size_t i : order) {
      const auto k = std::min(cap_counts[i],
                              static_cast<long long>(std::floor(left / items[i].size)));
      counts[i] = std::max<long long>(0, k);
      left -= static_cast<double>(counts[i]) * items[i].size;
    }
  }

  // The grid can over-admit by a rounding hair; trim until the real fill fits.
  double fill = 0.0;
  for (std::size_t i = 0; i < n; ++i) fill += static_cast<double>(counts[i]) * items[i].size;
  while (fill > capacity + tol) {
    std::size_t worst = n;
    for (std::size_t i = 0; i < n; ++i)
      if (counts[i] > 0 && (worst == n || items[i].size > items[worst].size)) worst = i;
    if (worst == n) break;
    --counts[worst];
    fill -= items[worst].size;
  }
  return counts;
}

ReinforcementPlan iterative_solve(const SupportedSet& supported, const ComplementModel& model,
                                  const BudgetSpec& budget, std::optional<double> epsilon) {
  const bool analytic = model.is_analytic();
  double eps;
  if (epsilon.has_value()) {
    eps = *epsilon;
    if (!std::isfinite(eps) || eps < 0.0)
      throw std::invalid_argument("iterative_solve: epsilon must be finite and >= 0");
  } else {
    eps = analytic ? 1e-9 * max_density(model) : 0.0;
  }
  if (analytic && eps == 0.0)
    throw std::domain_error("iterative_solve: epsilon must be > 0 for analytic complement laws");

  const double u_before = utility(supported, model);
  if (budget.total == 0.0) {
    ReinforcementPlan plan{ReinforcedSet::identity(supported)};
    plan.utility_before = u_before;
    plan.utility_after = u_before;
    return plan;
  }

  const bool smooth = std::holds_alternative<Exponential>(model.law()) ||
                      std::holds_alternative<LogNormal>(model.law());
  ReinforcementPlan plan =
      smooth ? solve_smooth(supported, model, budget, eps)
             : solve_alpha_space(supported, model, budget, eps);
  plan.utility_before = u_before;
  plan.utility_after = utility(plan.assignments, model);
  if (plan.budget_used > budget.total + 1e-9 * std::max(1.0, budget.total))
    throw internal_error("iterative_solve: plan exceeds the budget");
  if (plan.utility_after < u_before - 1e-12)
    throw internal_error("iterative_solve: plan decreased the utility");
  return plan;
}

}  // namespace reinforce
