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

#include "dpopt/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dpopt/errors.hpp"

namespace dpopt {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string source) {
  KeyValueConfig cfg;
  cfg.source_ = std::move(source);
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string at = cfg.source_ + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(at + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!section.empty() && !valid_key(section)) {
        throw ConfigError(at + ": invalid section name '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(at + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(at + ": invalid key '" + key + "'");
    if (!section.empty()) key = section + "." + key;
    if (cfg.values_.count(key)) {
      throw ConfigError(at + ": duplicate key '" + key + "' (first on line " +
                        std::to_string(cfg.lines_[key]) + ")");
    }
    cfg.values_[key] = value;
    cfg.lines_[key] = line_no;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse(buf.str(), path);
}

std::string KeyValueConfig::where(const std::string& key) const {
  const auto it = lines_.find(key);
  if (it == lines_.end()) return source_ + ": key '" + key + "'";
  return source_ + ":" + std::to_string(it->second) + ": key '" + key + "'";
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
  used_.insert(key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError(where(key) + ": expected a number, got '" + v + "'");
  return out;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw ConfigError(where(key) + ": expected an integer");
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(where(key) + ": expected true or false, got '" + v + "'");
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

void KeyValueConfig::check_all_used() const {
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) throw ConfigError(where(k) + ": unknown key");
  }
}

DirectedGraph parse_edges(std::string_view text, int m) {
  DirectedGraph g{m, {}};
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    const auto arrow = t.find("->");
    if (arrow == std::string::npos) throw ConfigError("edge '" + t + "' must look like j->i");
    const std::string a = trim(t.substr(0, arrow));
    const std::string b = trim(t.substr(arrow + 2));
    int from = 0;
    int to = 0;
    const auto r1 = std::from_chars(a.data(), a.data() + a.size(), from);
    const auto r2 = std::from_chars(b.data(), b.data() + b.size(), to);
    if (r1.ec != std::errc() || r1.ptr != a.data() + a.size() || r2.ec != std::errc() ||
        r2.ptr != b.data() + b.size()) {
      throw ConfigError("edge '" + t + "' must use integer node indices");
    }
    g.edges.emplace_back(to, from);
  }
  try {
    g.check();
  } catch (const StructureError& e) {
    throw ConfigError(std::string("graph: ") + e.what());
  }
  return g;
}

std::optional<PowerSchedule> parse_schedule(const KeyValueConfig& cfg, const std::string& prefix) {
  if (!cfg.has(prefix + ".form")) return std::nullopt;
  const std::string form_name = cfg.get_string(prefix + ".form");
  try {
    switch (parse_schedule_form(form_name)) {
      case ScheduleForm::kDecaying:
        return PowerSchedule::decaying(cfg.get_double(prefix + ".a"),
                                       cfg.get_double(prefix + ".b"),
                                       cfg.get_double(prefix + ".p"));
      case ScheduleForm::kGrowing:
        return PowerSchedule::growing(cfg.get_double(prefix + ".a"),
                                      cfg.get_double(prefix + ".b"),
                                      cfg.get_double(prefix + ".p"));
      case ScheduleForm::kGeometric:
        return PowerSchedule::geometric(cfg.get_double(prefix + ".a"),
                                        cfg.get_double(prefix + ".r"));
      case ScheduleForm::kConstant:
        return PowerSchedule::constant(cfg.get_double(prefix + ".a"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.source() + ": schedule '" + prefix + "': " + e.what());
  }
  return std::nullopt;
}

ExperimentConfig experiment_from(const KeyValueConfig& cfg) {
  ExperimentConfig x;
  x.source = cfg.source();
  x.problem_seed = static_cast<std::uint64_t>(cfg.get_int("problem.seed", 1));
  x.m = static_cast<int>(cfg.get_int("problem.m", x.m));
  x.s = static_cast<int>(cfg.get_int("problem.s", x.s));
  x.d = static_cast<int>(cfg.get_int("problem.d", x.d));
  x.sigma_reg = cfg.get_double("problem.sigma_reg", x.sigma_reg);
  x.noise_std = cfg.get_double("problem.noise_std", x.noise_std);
  x.problem_csv = cfg.get_string("problem.csv", "");
  if (x.m < 1 || x.s < 1 || x.d < 1) throw ConfigError(x.source + ": m, s, d must be >= 1");

  const std::string edges = cfg.get_string("graph.edges", "");
  x.graph = parse_edges(edges, x.m);
  x.graph_R = parse_edges(cfg.get_string("graph.edges_R", edges), x.m);
  x.graph_C = parse_edges(cfg.get_string("graph.edges_C", edges), x.m);
  x.edge_weight = cfg.get_double("graph.edge_weight", x.edge_weight);

  try {
    x.variant = parse_variant(cfg.get_string("algorithm.variant", "alg1"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(x.source + ": algorithm.variant: " + e.what());
  }
  x.lambda = parse_schedule(cfg, "schedules.lambda");
  x.gamma = parse_schedule(cfg, "schedules.gamma");
  x.alpha = parse_schedule(cfg, "schedules.alpha");
  x.gamma1 = parse_schedule(cfg, "schedules.gamma1");
  x.gamma2 = parse_schedule(cfg, "schedules.gamma2");
  x.nu = parse_schedule(cfg, "noise.nu");
  x.noise_enabled = cfg.get_bool("noise.enabled", true);
  x.noise_seed = static_cast<std::uint64_t>(cfg.get_int("noise.seed", 1));

  const std::string C = cfg.get_string("privacy.C", "1");
  if (C == "harvest") {
    x.gradient_bound.reset();
  } else {
    x.gradient_bound = cfg.get_double("privacy.C");
  }
  try {
    x.envelope = parse_envelope(cfg.get_string("privacy.envelope", "constant"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(x.source + ": privacy.envelope: " + e.what());
  }
  x.adjacent_agent = static_cast<int>(cfg.get_int("privacy.adjacent_agent", 0));
  x.adjacent_delta = cfg.get_double("privacy.delta", x.adjacent_delta);
  x.adjacent_eta = cfg.get_double("privacy.eta", x.adjacent_eta);

  x.pdop_lambda_a = cfg.get_double("pdop.lambda_a", x.pdop_lambda_a);
  x.pdop_lambda_r = cfg.get_double("pdop.lambda_r", x.pdop_lambda_r);
  x.pdop_nu_r = cfg.get_double("pdop.nu_r", x.pdop_nu_r);
  const std::string nu_a = cfg.get_string("pdop.nu_a", "match");
  if (nu_a != "match") x.pdop_nu_a = cfg.get_double("pdop.nu_a");

  x.iterations = cfg.get_int("run.iterations", x.iterations);
  x.runs = static_cast<int>(cfg.get_int("run.monte_carlo", x.runs));
  x.stride = cfg.get_int("run.stride", x.stride);
  x.init_radius = cfg.get_double("run.init_radius", x.init_radius);
  if (cfg.has("run.gradient_clip")) x.gradient_clip = cfg.get_double("run.gradient_clip");
  x.output_dir = cfg.get_string("run.output", x.output_dir);
  if (x.iterations < 0 || x.runs < 1 || x.stride < 1) {
    throw ConfigError(x.source + ": run.iterations >= 0, run.monte_carlo >= 1 and run.stride >= 1 required");
  }
  cfg.check_all_used();
  return x;
}

ExperimentConfig load_experiment(const std::string& path) {
  return experiment_from(KeyValueConfig::load(path));
}

}  // namespace dpopt
