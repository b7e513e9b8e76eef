#include "reinforce/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "reinforce/basic_solver.hpp"

namespace reinforce {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

using Point = std::pair<double, double>;

struct ShadeRect {
  double x0 = 0.0, x1 = 0.0, f_low = 0.0, f_high = 0.0;
};

struct PlotData {
  std::vector<Point> complement;
  std::vector<Point> before;
  std::vector<Point> after;
  std::vector<Segment> segments;
  std::vector<double> targets;
  std::vector<ShadeRect> moved;
  double xmax = 1.0;
};

// Rightmost score the drawing should cover: everything the plan touches plus
// enough of an analytic tail that the cdf visibly reaches 1.
double plot_extent(const Instance& instance, const ReinforcementPlan& plan) {
  double extent = instance.supported.max_score();
  for (const Assignment& a : plan.assignments.assignments()) extent = std::max(extent, a.reinforced);
  for (double t : plan.targets) extent = std::max(extent, t);
  const ComplementModel& model = instance.complement;
  if (const Empirical* e = model.empirical()) {
    extent = std::max(extent, e->max_score());
  } else if (const auto* exp = std::get_if<Exponential>(&model.law())) {
    extent = std::max(extent, -std::log(1e-3) / exp->lambda);
  } else if (const auto* ln = std::get_if<LogNormal>(&model.law())) {
    extent = std::max(extent, std::exp(ln->mu + 3.1 * ln->sigma));
  } else if (const auto* pl = std::get_if<PiecewiseLinearCdf>(&model.law())) {
    extent = std::max(extent, pl->knots().back().x);
  }
  return 1.05 * extent;
}

std::vector<Point> complement_curve(const ComplementModel& model, double xmax) {
  std::vector<Point> pts;
  if (const Empirical* e = model.empirical()) {
    pts.emplace_back(0.0, 0.0);
    double prev = 0.0;
    for (std::size_t i = 0; i < e->scores().size(); ++i) {
      const double s = e->scores()[i];
      if (i + 1 < e->scores().size() && e->scores()[i + 1] == s) continue;
      const double f = e->cdf(s);
      pts.emplace_back(s, prev);
      pts.emplace_back(s, f);
      prev = f;
    }
    pts.emplace_back(xmax, 1.0);
  } else if (const auto* pl = std::get_if<PiecewiseLinearCdf>(&model.law())) {
    if (pl->knots().front().x > 0.0) pts.emplace_back(0.0, 0.0);
    for (const auto& k : pl->knots()) pts.emplace_back(k.x, k.F);
    if (pl->knots().back().x < xmax) pts.emplace_back(xmax, 1.0);
  } else {
    constexpr int kSamples = 256;
    for (int i = 0; i <= kSamples; ++i) {
      const double x = xmax * static_cast<double>(i) / kSamples;
      pts.emplace_back(x, model.cdf(x));
    }
  }
  return pts;
}

// Step polyline of the empirical cdf of `scores` (ascending), out to xmax.
std::vector<Point> step_curve(const std::vector<double>& scores, double xmax) {
  std::vector<Point> pts;
  const double n = static_cast<double>(scores.size());
  pts.emplace_back(0.0, 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i + 1 < scores.size() && scores[i + 1] == scores[i]) continue;
    const double f = static_cast<double>(i + 1) / n;
    pts.emplace_back(scores[i], pts.back().second);
    pts.emplace_back(scores[i], f);
  }
  pts.emplace_back(xmax, 1.0);
  return pts;
}

double step_cdf(const std::vector<double>& scores, double x) {
  const auto it = std::upper_bound(scores.begin(), scores.end(), x);
  return static_cast<double>(it - scores.begin()) / static_cast<double>(scores.size());
}

PlotData build_plot_data(const Instance& instance, const ReinforcementPlan& plan) {
  PlotData data;
  data.xmax = plot_extent(instance, plan);
  data.complement = complement_curve(instance.complement, data.xmax);

  const std::vector<double>& before = instance.supported.scores();
  std::vector<double> after;
  after.reserve(plan.assignments.size());
  for (const Assignment& a : plan.assignments.assignments()) after.push_back(a.reinforced);
  std::sort(after.begin(), after.end());
  data.before = step_curve(before, data.xmax);
  data.after = step_curve(after, data.xmax);

  // The area between the two principal cdfs, cut at every step of either.
  std::vector<double> cuts = before;
  cuts.insert(cuts.end(), after.begin(), after.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double fb = step_cdf(before, cuts[i]);
    const double fa = step_cdf(after, cuts[i]);
    if (fb > fa) data.moved.push_back({cuts[i], cuts[i + 1], fa, fb});
  }

  if (std::isfinite(plan.alpha_final)) {
    BasicSolveOptions opts;
    opts.refine_next = false;
    const AlphaSolution sol =
        basic_solve(instance.supported, instance.complement, plan.alpha_final, opts);
    data.segments = sol.segments;
    data.targets = sol.targets;
  }
  return data;
}

// 960x720 canvas: the top panel's plot area spans y [40, 330], the bottom
// panel's [390, 680]; both share x in [70, 940].
constexpr double kLeft = 70.0, kRight = 940.0;
constexpr double kTop1 = 40.0, kBottom1 = 330.0;
constexpr double kTop2 = 390.0, kBottom2 = 680.0;

struct Mapper {
  double xmax;
  double sx(double x) const { return kLeft + (x / xmax) * (kRight - kLeft); }
  static double sy(double f, double top, double bottom) { return bottom - f * (bottom - top); }
};

void append_polyline(std::string& svg, const char* cls, const std::vector<Point>& pts,
                     const Mapper& m, double top, double bottom) {
  svg += "<polyline class=\"";
  svg += cls;
  svg += "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) svg += ' ';
    svg += fmt("%.2f", m.sx(pts[i].first));
    svg += ',';
    svg += fmt("%.2f", Mapper::sy(pts[i].second, top, bottom));
  }
  svg += "\"/>\n";
}

void append_axes(std::string& svg, const Mapper& m, double top, double bottom) {
  svg += "<line class=\"axis\" x1=\"" + fmt("%.0f", kLeft) + "\" y1=\"" + fmt("%.0f", bottom) +
         "\" x2=\"" + fmt("%.0f", kRight) + "\" y2=\"" + fmt("%.0f", bottom) + "\"/>\n";
  svg += "<line class=\"axis\" x1=\"" + fmt("%.0f", kLeft) + "\" y1=\"" + fmt("%.0f", top) +
         "\" x2=\"" + fmt("%.0f", kLeft) + "\" y2=\"" + fmt("%.0f", bottom) + "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = m.xmax * i / 4.0;
    const double px = m.sx(x);
    svg += "<line class=\"axis\" x1=\"" + fmt("%.2f", px) + "\" y1=\"" + fmt("%.0f", bottom) +
           "\" x2=\"" + fmt("%.2f", px) + "\" y2=\"" + fmt("%.0f", bottom + 5) + "\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", px) + "\" y=\"" + fmt("%.0f", bottom + 18) +
           "\" text-anchor=\"middle\">" + fmt("%.4g", x) + "</text>\n";
  }
  for (int i = 0; i <= 2; ++i) {
    const double f = i / 2.0;
    const double py = Mapper::sy(f, top, bottom);
    svg += "<line class=\"grid\" x1=\"" + fmt("%.0f", kLeft) + "\" y1=\"" + fmt("%.2f", py) +
           "\" x2=\"" + fmt("%.0f", kRight) + "\" y2=\"" + fmt("%.2f", py) + "\"/>\n";
    svg += "<text x=\"" + fmt("%.0f", kLeft - 8) + "\" y=\"" + fmt("%.2f", py + 4) +
           "\" text-anchor=\"end\">" + fmt("%.1f", f) + "</text>\n";
  }
}

}  // namespace

void validate_plan_matches(const Instance& instance, const ReinforcementPlan& plan) {
  const std::vector<double>& expected = instance.supported.scores();
  const std::vector<Assignment>& got = plan.assignments.assignments();
  if (got.size() != expected.size())
    throw std::invalid_argument("plan does not match instance: it has " +
                                std::to_string(got.size()) + " assignments for " +
                                std::to_string(expected.size()) + " supported scores");
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].original != expected[i])
      throw std::invalid_argument(
          "plan does not match instance: assignment 'from' scores are not the supported set");
  }
  if (std::isfinite(plan.utility_before)) {
    const double recomputed = utility(instance.supported, instance.complement);
    if (std::fabs(plan.utility_before - recomputed) > 1e-12)
      throw std::invalid_argument(
          "plan does not match instance: utility_before disagrees with recomputation");
  }
}

std::string render_plot_svg(const Instance& instance, const ReinforcementPlan& plan) {
  const PlotData data = build_plot_data(instance, plan);
  const Mapper m{data.xmax};
  const ComplementModel& model = instance.complement;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"720\" "
         "viewBox=\"0 0 960 720\">\n";
  svg += "<style>\n"
         "text { font: 13px sans-serif; fill: #222222; }\n"
         ".axis { stroke: #444444; stroke-width: 1; fill: none; }\n"
         ".grid { stroke: #dddddd; stroke-width: 1; }\n"
         ".complement-cdf { fill: none; stroke: #1f77b4; stroke-width: 2; }\n"
         ".chord { stroke: #d62728; stroke-width: 1.5; }\n"
         ".segment { fill: #d62728; fill-opacity: 0.25; stroke: none; }\n"
         ".target { stroke: #d62728; stroke-width: 1; stroke-dasharray: 3 2; }\n"
         ".before-cdf { fill: none; stroke: #7f7f7f; stroke-width: 2; }\n"
         ".after-cdf { fill: none; stroke: #2ca02c; stroke-width: 2; }\n"
         ".reinforced-area { fill: #2ca02c; fill-opacity: 0.3; stroke: none; }\n"
         "</style>\n";
  svg += "<rect width=\"960\" height=\"720\" fill=\"#ffffff\"/>\n";

  svg += "<text x=\"70\" y=\"26\">complement cdf with reinforcement chords</text>\n";
  append_axes(svg, m, kTop1, kBottom1);
  for (double t : data.targets) {
    const double px = m.sx(t);
    svg += "<line class=\"target\" x1=\"" + fmt("%.2f", px) + "\" y1=\"" + fmt("%.0f", kTop1) +
           "\" x2=\"" + fmt("%.2f", px) + "\" y2=\"" + fmt("%.0f", kBottom1) + "\"/>\n";
  }
  for (const Segment& s : data.segments) {
    const double x0 = m.sx(s.low), x1 = m.sx(s.high);
    svg += "<rect class=\"segment\" x=\"" + fmt("%.2f", x0) + "\" y=\"" +
           fmt("%.0f", kBottom1 - 12) + "\" width=\"" + fmt("%.2f", x1 - x0) +
           "\" height=\"12\"/>\n";
  }
  append_polyline(svg, "complement-cdf", data.complement, m, kTop1, kBottom1);
  for (const Segment& s : data.segments) {
    svg += "<line class=\"chord\" x1=\"" + fmt("%.2f", m.sx(s.low)) + "\" y1=\"" +
           fmt("%.2f", Mapper::sy(model.cdf(s.low), kTop1, kBottom1)) + "\" x2=\"" +
           fmt("%.2f", m.sx(s.high)) + "\" y2=\"" +
           fmt("%.2f", Mapper::sy(model.cdf(s.high), kTop1, kBottom1)) + "\"/>\n";
  }

  svg += "<text x=\"70\" y=\"376\">principal cdf before and after reinforcement</text>\n";
  append_axes(svg, m, kTop2, kBottom2);
  for (const ShadeRect& r : data.moved) {
    const double x0 = m.sx(r.x0), x1 = m.sx(r.x1);
    const double y1 = Mapper::sy(r.f_high, kTop2, kBottom2);
    const double y0 = Mapper::sy(r.f_low, kTop2, kBottom2);
    svg += "<rect class=\"reinforced-area\" x=\"" + fmt("%.2f", x0) + "\" y=\"" +
           fmt("%.2f", y1) + "\" width=\"" + fmt("%.2f", x1 - x0) + "\" height=\"" +
           fmt("%.2f", y0 - y1) + "\"/>\n";
  }
  append_polyline(svg, "before-cdf", data.before, m, kTop2, kBottom2);
  append_polyline(svg, "after-cdf", data.after, m, kTop2, kBottom2);

  svg += "</svg>\n";
  return svg;
}

std::string render_plot_csv(const Instance& instance, const ReinforcementPlan& plan) {
  const PlotData data = build_plot_data(instance, plan);
  const ComplementModel& model = instance.complement;
  std::string csv = "series,x,y\n";
  auto row = [&csv](const std::string& series, double x, double y) {
    csv += series;
    csv += ',';
    csv += fmt("%.17g", x);
    csv += ',';
    csv += fmt("%.17g", y);
    csv += '\n';
  };
  for (const Point& p : data.complement) row("complement_cdf", p.first, p.second);
  for (const Point& p : data.before) row("before_cdf", p.first, p.second);
  for (const Point& p : data.after) row("after_cdf", p.first, p.second);
  for (std::size_t i = 0; i < data.segments.size(); ++i) {
    const Segment& s = data.segments[i];
    const std::string chord = "chord_" + std::to_string(i + 1);
    row(chord, s.low, model.cdf(s.low));
    row(chord, s.high, model.cdf(s.high));
    const std::string segment = "segment_" + std::to_string(i + 1);
    row(segment, s.low, static_cast<double>(i + 1));
    row(segment, s.high, static_cast<double>(i + 1));
  }
  for (std::size_t i = 0; i < data.targets.size(); ++i) {
    row("target_" + std::to_string(i + 1), data.targets[i], model.cdf(data.targets[i]));
  }
  return csv;
}

}  // namespace reinforce
