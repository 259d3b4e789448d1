// Copyright 2026 The qvrp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qvrp_cli/plot.h"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <limits>
#include <map>

#include "qvrp/io.h"

namespace qvrp::cli {
namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 60, kRight = 20, kTop = 30, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double parse_cell(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(t.path + ": row " + std::to_string(row + 1) + ": '" + s + "' is not a number");
}

class Canvas {
 public:
  Canvas(const std::string& title, const std::string& x_label, const std::string& y_label, double x0, double x1,
         double y0, double y1)
      : x0_(x0), x1_(x1 > x0 ? x1 : x0 + 1), y0_(y0), y1_(y1 > y0 ? y1 : y0 + 1) {
    body_ += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + title +
             "</text>\n";
    body_ += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"" + fmt(kHeight - 10) +
             "\" text-anchor=\"middle\" font-size=\"12\">" + x_label + "</text>\n";
    body_ += "<text x=\"15\" y=\"" + fmt(kHeight / 2) +
             "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 " + fmt(kHeight / 2) + ")\">" +
             y_label + "</text>\n";
    body_ += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kWidth - kLeft - kRight) +
             "\" height=\"" + fmt(kHeight - kTop - kBottom) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double fx = x0_ + (x1_ - x0_) * i / 4.0;
      const double fy = y0_ + (y1_ - y0_) * i / 4.0;
      body_ += "<text x=\"" + fmt(px(fx)) + "\" y=\"" + fmt(kHeight - kBottom + 15) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + fmt(fx) + "</text>\n";
      body_ += "<text x=\"" + fmt(kLeft - 5) + "\" y=\"" + fmt(py(fy) + 3) +
               "\" text-anchor=\"end\" font-size=\"10\">" + fmt(fy) + "</text>\n";
    }
  }

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    if (pts.empty()) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ += " ";
      body_ += fmt(px(pts[i].first)) + "," + fmt(py(pts[i].second));
    }
    body_ += "\"/>\n";
  }

  void dot(double x, double y, const std::string& color, bool filled) {
    body_ += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"3\" stroke=\"" + color +
             "\" fill=\"" + (filled ? color : std::string("none")) + "\"/>\n";
  }

  void legend(std::size_t slot, const std::string& label, const std::string& color) {
    const double y = kTop + 15 + 14 * static_cast<double>(slot);
    body_ += "<rect x=\"" + fmt(kWidth - kRight - 150) + "\" y=\"" + fmt(y - 8) +
             "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    body_ += "<text x=\"" + fmt(kWidth - kRight - 135) + "\" y=\"" + fmt(y) + "\" font-size=\"10\">" + label +
             "</text>\n";
  }

  std::string finish() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
           "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ +
           "</svg>\n";
  }

 private:
  double x0_, x1_, y0_, y1_;
  std::string body_;
};

const char* color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

// Uses c_norm when the run had a usable range, raw cost otherwise.
std::pair<std::size_t, std::string> value_column(const CsvTable& t, const std::string& normalized_label,
                                                 const std::string& raw_label) {
  const std::size_t c = t.column("c_norm");
  if (!t.rows.front()[c].empty()) return {c, normalized_label};
  return {t.column("cost"), raw_label};
}

}  // namespace

std::string convergence_svg(const CsvTable& t) {
  const std::size_t it_col = t.column("iteration");
  const std::size_t start_col = t.column("start_id");
  const auto [value_col, y_label] = value_column(t, "best C_norm", "best cost");
  std::map<long, std::vector<std::pair<double, double>>> series;
  double x_max = 0.0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double x = parse_cell(t, r, it_col);
    const double v = parse_cell(t, r, value_col);
    auto& s = series[static_cast<long>(parse_cell(t, r, start_col))];
    const double best = s.empty() ? v : std::min(s.back().second, v);
    s.emplace_back(x, best);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, best);
    y_max = std::max(y_max, best);
  }
  Canvas c("Convergence", "iteration", y_label, 0.0, x_max, std::min(y_min, 0.0), y_max);
  std::size_t i = 0;
  for (const auto& [start, pts] : series) c.polyline(pts, color(i++));
  return c.finish();
}

std::string cumulative_svg(const CsvTable& t) {
  const std::size_t src_col = t.column("source");
  const std::size_t x_col = t.column("c_norm");
  const std::size_t y_col = t.column("cdf");
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
  double x_min = 0.0;
  double x_max = 1.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string& src = t.rows[r][src_col];
    if (series.empty() || series.back().first != src) series.emplace_back(src, std::vector<std::pair<double, double>>{});
    const double x = parse_cell(t, r, x_col);
    const double y = parse_cell(t, r, y_col);
    auto& pts = series.back().second;
    // Hold the previous level up to the new value, then step.
    pts.emplace_back(x, pts.empty() ? 0.0 : pts.back().second);
    pts.emplace_back(x, y);
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
  }
  Canvas c("Cumulative distribution", "C_norm", "fraction of solutions", x_min, x_max, 0.0, 1.0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    c.polyline(series[i].second, color(i));
    c.legend(i, series[i].first, color(i));
  }
  return c.finish();
}

std::string solutions_svg(const CsvTable& t) {
  const std::size_t start_col = t.column("start_id");
  const std::size_t feas_col = t.column("feasible");
  const auto [value_col, y_label] = value_column(t, "C_norm", "cost");
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 1.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    x_max = std::max(x_max, parse_cell(t, r, start_col));
    const double v = parse_cell(t, r, value_col);
    y_min = std::min(y_min, v);
    y_max = std::max(y_max, v);
  }
  Canvas c("Sampled solutions", "start", y_label, 0.0, x_max, y_min, y_max);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const bool feasible = t.rows[r][feas_col] == "1";
    c.dot(parse_cell(t, r, start_col), parse_cell(t, r, value_col), feasible ? color(2) : color(3), feasible);
  }
  c.legend(0, "feasible", color(2));
  c.legend(1, "infeasible", color(3));
  return c.finish();
}

}  // namespace qvrp::cli
