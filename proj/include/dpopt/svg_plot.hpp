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

#pragma once

#include <string>
#include <vector>

namespace dpopt {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  /// Optional shaded band; empty or same length as x.
  std::vector<double> lo;
  std::vector<double> hi;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "k";
  std::string y_label;
  bool log_y = true;
  std::vector<PlotSeries> series;
};

/// Self-contained SVG 1.1 line chart. Non-finite points (and non-positive
/// ones on a log axis) break the line.
std::string render_svg(const PlotSpec& spec);
void write_svg(const std::string& path, const PlotSpec& spec);

}  // namespace dpopt
