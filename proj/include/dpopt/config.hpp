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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "dpopt/graph_topology.hpp"
#include "dpopt/privacy_accountant.hpp"
#include "dpopt/schedules.hpp"
#include "dpopt/solvers.hpp"

namespace dpopt {

/// Flat `key = value` text. `[section]` lines prefix the keys that follow
/// with `section.`; `#` starts a comment. Errors carry line or key context.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text, std::string source = "<string>");
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError naming any key that no getter has read.
  void check_all_used() const;
  const std::string& source() const { return source_; }

 private:
  std::string where(const std::string& key) const;

  std::string source_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  mutable std::set<std::string> used_;
};

/// Parses "0->1, 1->2" (sender->receiver) into a graph with edges (i, j).
DirectedGraph parse_edges(std::string_view text, int m);
/// Reads `<prefix>.form`, `.a`, `.b`, `.p`, `.r`; nullopt if `.form` is absent.
std::optional<PowerSchedule> parse_schedule(const KeyValueConfig& cfg, const std::string& prefix);

struct ExperimentConfig {
  std::string source;

  std::uint64_t problem_seed = 1;
  int m = 5;
  int s = 3;
  int d = 2;
  double sigma_reg = 0.01;
  double noise_std = 1.0;
  std::string problem_csv;

  DirectedGraph graph;
  DirectedGraph graph_R;
  DirectedGraph graph_C;
  double edge_weight = 0.25;

  Variant variant = Variant::kAlg1;
  std::optional<PowerSchedule> lambda;
  std::optional<PowerSchedule> gamma;
  std::optional<PowerSchedule> alpha;
  std::optional<PowerSchedule> gamma1;
  std::optional<PowerSchedule> gamma2;
  std::optional<PowerSchedule> nu;
  bool noise_enabled = true;
  std::uint64_t noise_seed = 1;

  std::optional<double> gradient_bound;  // nullopt = harvest from a coupled run
  Envelope envelope = Envelope::kConstant;
  int adjacent_agent = 0;
  double adjacent_delta = 1.0;
  double adjacent_eta = 1.0;

  double pdop_lambda_a = 0.02;
  double pdop_lambda_r = 0.95;
  double pdop_nu_r = 0.98;
  std::optional<double> pdop_nu_a;  // nullopt = match the reference budget

  std::int64_t iterations = 10000;
  int runs = 100;
  std::int64_t stride = 10;
  double init_radius = 10.0;
  std::optional<double> gradient_clip;
  std::string output_dir = "out";
};

ExperimentConfig experiment_from(const KeyValueConfig& cfg);
ExperimentConfig load_experiment(const std::string& path);

}  // namespace dpopt
