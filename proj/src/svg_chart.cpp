// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The qoebf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qoebf/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qoebf::svg {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;
constexpr int kTicks = 5;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Widens to a "nice" step grid; a degenerate range gets unit width.
  double nice() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double raw = (hi - lo) / kTicks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
      step = m * mag;
      if (step >= raw) break;
    }
    lo = std::floor(lo / step) * step;
    hi = std::ceil(hi / step) * step;
    return step;
  }
};

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::string line_chart(const ChartLabels& labels, const std::vector<Series>& series) {
  Range xr, yr;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xr.add(s.x[i]);
      const double e = i < s.error.size() && std::isfinite(s.error[i]) ? s.error[i] : 0.0;
      yr.add(s.y[i] - e);
      yr.add(s.y[i] + e);
    }
  }
  const double xstep = xr.nice();
  const double ystep = yr.nice();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(labels.title) << "</text>\n";

  for (int i = 0; i <= kTicks * 4; ++i) {
    const double y = yr.lo + i * ystep;
    if (y > yr.hi + 1e-9 * ystep) break;
    o << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(py(y))
      << "\" y2=\"" << num(py(y)) << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(y) + 4)
      << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
  }
  for (int i = 0; i <= kTicks * 4; ++i) {
    const double x = xr.lo + i * xstep;
    if (x > xr.hi + 1e-9 * xstep) break;
    o << "<line x1=\"" << num(px(x)) << "\" x2=\"" << num(px(x)) << "\" y1=\"" << num(kTop + ph)
      << "\" y2=\"" << num(kTop + ph + 4) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + ph + 18)
      << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
  }
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 14)
    << "\" text-anchor=\"middle\">" << escape(labels.x_axis) << "</text>\n";
  o << "<text transform=\"translate(16," << num(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(labels.y_axis) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!points.empty()) points += ' ';
      points += num(px(s.x[i])) + "," + num(py(s.y[i]));
      o << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      if (i < s.error.size() && std::isfinite(s.error[i]) && s.error[i] > 0.0) {
        o << "<line x1=\"" << num(px(s.x[i])) << "\" x2=\"" << num(px(s.x[i])) << "\" y1=\""
          << num(py(s.y[i] - s.error[i])) << "\" y2=\"" << num(py(s.y[i] + s.error[i]))
          << "\" stroke=\"" << color << "\"/>\n";
      }
    }
    if (!points.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
        << points << "\"/>\n";
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << num(kLeft + pw + 12) << "\" x2=\"" << num(kLeft + pw + 32) << "\" y1=\""
      << num(ly) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(kLeft + pw + 38) << "\" y=\"" << num(ly + 4) << "\">"
      << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace qoebf::svg
