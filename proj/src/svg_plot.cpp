// Copyright 2026 The dpopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpopt/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dpopt/errors.hpp"

namespace dpopt {
namespace {

constexpr double kWidth = 760;
constexpr double kHeight = 460;
constexpr double kLeft = 80;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1 : f < 3 ? 2 : f < 7 ? 5 : 10;
  return nice * mag;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  const double inf = std::numeric_limits<double>::infinity();
  auto usable = [&](double y) { return std::isfinite(y) && (!spec.log_y || y > 0.0); };

  double x0 = inf, x1 = -inf, y0 = inf, y1 = -inf;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      if (usable(s.y[i])) {
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
      if (!s.hi.empty() && usable(s.hi[i])) y1 = std::max(y1, s.hi[i]);
      if (!s.lo.empty() && usable(s.lo[i])) y0 = std::min(y0, s.lo[i]);
    }
  }
  if (!(x0 < x1)) {
    x0 = std::isfinite(x0) ? x0 - 1 : 0;
    x1 = x0 + 2;
  }
  if (!(y0 <= y1)) {
    y0 = spec.log_y ? 1 : 0;
    y1 = spec.log_y ? 10 : 1;
  }
  if (spec.log_y) {
    y0 = std::floor(std::log10(y0));
    y1 = std::ceil(std::log10(y1));
    if (y1 <= y0) y1 = y0 + 1;
  } else if (y1 - y0 < 1e-300) {
    y0 -= 0.5;
    y1 += 0.5;
  } else {
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) {
    const double t = spec.log_y ? std::log10(y) : y;
    return kTop + ph - (t - y0) / (y1 - y0) * ph;
  };
  auto clamp_y = [&](double y) {
    if (spec.log_y) return std::clamp(y, std::pow(10.0, y0), std::pow(10.0, y1));
    return std::clamp(y, y0, y1);
  };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"15\">" << escape(spec.title) << "</text>\n";

  o << "<g font-family=\"sans-serif\" font-size=\"11\" stroke=\"#ccc\">\n";
  const double xs = nice_step(x1 - x0, 6);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    o << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(t))
      << "\" y2=\"" << num(kTop + ph) << "\"/>"
      << "<text stroke=\"none\" fill=\"black\" x=\"" << num(px(t)) << "\" y=\""
      << num(kTop + ph + 16) << "\" text-anchor=\"middle\">" << label(t) << "</text>\n";
  }
  if (spec.log_y) {
    const int step = std::max(1, static_cast<int>(std::ceil((y1 - y0) / 8)));
    for (double e = y0; e <= y1 + 1e-9; e += step) {
      const double y = std::pow(10.0, e);
      o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(y)) << "\" x2=\""
        << num(kLeft + pw) << "\" y2=\"" << num(py(y)) << "\"/>"
        << "<text stroke=\"none\" fill=\"black\" x=\"" << num(kLeft - 6) << "\" y=\""
        << num(py(y) + 4) << "\" text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
    }
  } else {
    const double ys = nice_step(y1 - y0, 6);
    for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
      o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(t)) << "\" x2=\""
        << num(kLeft + pw) << "\" y2=\"" << num(py(t)) << "\"/>"
        << "<text stroke=\"none\" fill=\"black\" x=\"" << num(kLeft - 6) << "\" y=\""
        << num(py(t) + 4) << "\" text-anchor=\"end\">" << label(t) << "</text>\n";
    }
  }
  o << "</g>\n"
    << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n"
    << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
    << escape(spec.x_label) << "</text>\n"
    << "<text transform=\"translate(18," << num(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
    << escape(spec.y_label) << "</text>\n";

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    const char* color = kColors[si % std::size(kColors)];
    if (!s.lo.empty() && !s.hi.empty()) {
      std::ostringstream pts;
      std::size_t n = 0;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.hi[i]) || !std::isfinite(s.x[i])) continue;
        pts << num(px(s.x[i])) << ',' << num(py(clamp_y(s.hi[i]))) << ' ';
        ++n;
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        if (!std::isfinite(s.hi[i]) || !std::isfinite(s.x[i])) continue;
        const double lo = std::isfinite(s.lo[i]) ? s.lo[i] : -inf;
        pts << num(px(s.x[i])) << ',' << num(py(clamp_y(lo))) << ' ';
      }
      if (n > 1) {
        o << "<polygon points=\"" << pts.str() << "\" fill=\"" << color
          << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      }
    }
    std::vector<std::string> segments;
    std::ostringstream seg;
    std::size_t run = 0;
    auto flush = [&] {
      if (run > 1) segments.push_back(seg.str());
      seg.str("");
      run = 0;
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.y[i]) || !std::isfinite(s.x[i])) {
        flush();
        continue;
      }
      seg << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
      ++run;
    }
    flush();
    for (const auto& pts : segments) {
      o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(si);
    o << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
      << num(kLeft + pw + 36) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>"
      << "<text x=\"" << num(kLeft + pw + 42) << "\" y=\"" << num(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const std::string& path, const PlotSpec& spec) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << render_svg(spec);
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace dpopt
