#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbed/csv.hpp"
#include "rbed/harness.hpp"
#include "rbed/metrics.hpp"

namespace rbed::svg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Series {
  std::string label;
  std::string color;
  std::vector<Point> points;
};

struct ReferenceLine {
  double y = 0.0;
  std::string label;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<ReferenceLine> references;
  std::optional<double> y_min;
  std::optional<double> y_max;
};

inline constexpr const char* palette[] = {"#d62728", "#7f7f7f", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};

inline std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

/// Tick positions on a 1-2-5 grid covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) ticks.push_back(t);
  return ticks;
}

inline std::string tick_label(double v) {
  char buf[32];
  if (std::abs(v - std::round(v)) < 1e-9)
    std::snprintf(buf, sizeof buf, "%.0f", std::round(v) == 0.0 ? 0.0 : v);
  else
    std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string render(const LineChart& chart) {
  constexpr double width = 820, height = 480;
  constexpr double left = 70, right = 170, top = 40, bottom = 60;
  constexpr double plot_w = width - left - right, plot_h = height - top - bottom;

  double x_lo = 1, x_hi = 1, y_lo = 0, y_hi = 1;
  bool any = false;
  for (const auto& s : chart.series)
    for (const auto& p : s.points) {
      if (!any) {
        x_lo = x_hi = p.x;
        y_lo = y_hi = p.y;
        any = true;
      }
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.y);
      y_hi = std::max(y_hi, p.y);
    }
  for (const auto& r : chart.references) {
    y_lo = std::min(y_lo, r.y);
    y_hi = std::max(y_hi, r.y);
  }
  if (chart.y_min) y_lo = *chart.y_min;
  if (chart.y_max) y_hi = *chart.y_max;
  if (x_hi <= x_lo) x_hi = x_lo + 1;
  if (y_hi <= y_lo) y_hi = y_lo + 1;

  auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
  o += "<text class=\"title\" x=\"" + num(left + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       escape(chart.title) + "</text>\n";

  o += "<g class=\"grid\" stroke=\"#e0e0e0\" stroke-width=\"1\">\n";
  const auto xt = nice_ticks(x_lo, x_hi);
  const auto yt = nice_ticks(y_lo, y_hi);
  for (double t : xt)
    o += "<line x1=\"" + num(sx(t)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(sx(t)) + "\" y2=\"" +
         num(top + plot_h) + "\"/>\n";
  for (double t : yt)
    o += "<line x1=\"" + num(left) + "\" y1=\"" + num(sy(t)) + "\" x2=\"" + num(left + plot_w) + "\" y2=\"" +
         num(sy(t)) + "\"/>\n";
  o += "</g>\n";

  o += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  o += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(left + plot_w) + "\" y2=\"" +
       num(top + plot_h) + "\"/>\n";
  o += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" +
       num(top + plot_h) + "\"/>\n";
  o += "</g>\n";

  o += "<g class=\"ticks\">\n";
  for (double t : xt)
    o += "<text x=\"" + num(sx(t)) + "\" y=\"" + num(top + plot_h + 16) + "\" text-anchor=\"middle\">" +
         tick_label(t) + "</text>\n";
  for (double t : yt)
    o += "<text x=\"" + num(left - 6) + "\" y=\"" + num(sy(t) + 4) + "\" text-anchor=\"end\">" + tick_label(t) +
         "</text>\n";
  o += "</g>\n";

  o += "<text class=\"x-label\" x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 18) +
       "\" text-anchor=\"middle\">" + escape(chart.x_label) + "</text>\n";
  o += "<text class=\"y-label\" x=\"18\" y=\"" + num(top + plot_h / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + num(top + plot_h / 2) + ")\">" +
       escape(chart.y_label) + "</text>\n";

  for (const auto& r : chart.references) {
    o += "<line class=\"reference\" x1=\"" + num(left) + "\" y1=\"" + num(sy(r.y)) + "\" x2=\"" +
         num(left + plot_w) + "\" y2=\"" + num(sy(r.y)) +
         "\" stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
    o += "<text x=\"" + num(left + plot_w - 4) + "\" y=\"" + num(sy(r.y) - 4) + "\" text-anchor=\"end\">" +
         escape(r.label) + "</text>\n";
  }

  for (const auto& s : chart.series) {
    o += "<polyline class=\"series\" data-label=\"" + escape(s.label) + "\" fill=\"none\" stroke=\"" +
         escape(s.color) + "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& p : s.points) {
      if (!first) o += ' ';
      first = false;
      o += format_double(sx(p.x)) + "," + format_double(sy(p.y));
    }
    o += "\"/>\n";
  }

  o += "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const double y = top + 10 + 20.0 * static_cast<double>(i);
    const double x = left + plot_w + 15;
    o += "<line x1=\"" + num(x) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x + 24) + "\" y2=\"" + num(y) +
         "\" stroke=\"" + escape(chart.series[i].color) + "\" stroke-width=\"3\"/>\n";
    o += "<text x=\"" + num(x + 30) + "\" y=\"" + num(y + 4) + "\">" + escape(chart.series[i].label) + "</text>\n";
  }
  o += "</g>\n";
  o += "</svg>\n";
  return o;
}

}  // namespace rbed::svg

namespace rbed {

/// One labelled set of aggregate curves to draw.
struct PlotSeries {
  std::string label;
  AggregateCurves curves;
};

inline constexpr const char* reward_svg_name = "reward.svg";
inline constexpr const char* rolling_svg_name = "rolling100.svg";
inline constexpr const char* epsilon_svg_name = "epsilon.svg";

/// Reward per episode, trailing-100 mean with the solve line, and epsilon
/// per episode; one polyline per input series in each chart.
inline std::vector<svg::LineChart> comparison_charts(std::span<const PlotSeries> series) {
  if (series.empty()) throw std::invalid_argument("emit_svg: nothing to plot");
  for (const auto& s : series)
    if (s.curves.episodes() == 0) throw std::invalid_argument("emit_svg: series '" + s.label + "' is empty");

  svg::LineChart reward{"Mean reward per episode", "Episode", "Reward", {}, {}, 0.0, std::nullopt};
  svg::LineChart rolling{"Mean reward over last 100 episodes", "Episode", "Rolling mean reward", {}, {}, 0.0,
                         std::nullopt};
  rolling.references.push_back({solve_threshold, "solved (195)"});
  svg::LineChart epsilon{"Epsilon per episode", "Episode", "Epsilon", {}, {}, 0.0, 1.0};

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& c = series[i].curves;
    const std::string color = svg::palette[i % std::size(svg::palette)];
    svg::Series r{series[i].label, color, {}}, m{series[i].label, color, {}}, e{series[i].label, color, {}};
    for (std::size_t k = 0; k < c.episodes(); ++k) {
      const auto x = static_cast<double>(k + 1);
      r.points.push_back({x, c.mean_reward[k]});
      if (c.mean_rolling[k]) m.points.push_back({x, *c.mean_rolling[k]});
      e.points.push_back({x, c.mean_epsilon[k]});
    }
    reward.series.push_back(std::move(r));
    rolling.series.push_back(std::move(m));
    epsilon.series.push_back(std::move(e));
  }
  return {std::move(reward), std::move(rolling), std::move(epsilon)};
}

inline std::vector<std::filesystem::path> emit_svg(std::span<const PlotSeries> series,
                                                   const std::filesystem::path& dir) {
  const auto charts = comparison_charts(series);
  std::filesystem::create_directories(dir);
  const char* names[] = {reward_svg_name, rolling_svg_name, epsilon_svg_name};
  std::vector<std::filesystem::path> written;
  for (std::size_t i = 0; i < charts.size(); ++i) {
    auto p = dir / names[i];
    detail::write_file(p, svg::render(charts[i]));
    written.push_back(std::move(p));
  }
  return written;
}

inline std::vector<std::filesystem::path> emit_svg(const ComparisonReport& report,
                                                   const std::filesystem::path& dir) {
  const std::vector<PlotSeries> series{{report.a.label, report.a.curves}, {report.b.label, report.b.curves}};
  return emit_svg(series, dir);
}

}  // namespace rbed
