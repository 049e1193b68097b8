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

#include "dpopt/condition_report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace dpopt {

void ConditionReport::add(ConditionEntry entry) {
  entries_.push_back(std::move(entry));
}

void ConditionReport::add(std::string name, std::string rule, double value,
                          bool pass, std::string detail) {
  entries_.push_back(ConditionEntry{std::move(name), std::move(rule), value,
                                    pass, std::move(detail)});
}

void ConditionReport::warn(std::string message) {
  warnings_.push_back(std::move(message));
}

void ConditionReport::merge(const ConditionReport& other,
                            std::string_view prefix) {
  for (ConditionEntry e : other.entries_) {
    if (!prefix.empty()) e.name = std::string(prefix) + e.name;
    entries_.push_back(std::move(e));
  }
  for (const auto& w : other.warnings_) {
    warnings_.push_back(prefix.empty() ? w : std::string(prefix) + w);
  }
}

bool ConditionReport::overall() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const ConditionEntry& e) { return e.pass; });
}

const ConditionEntry* ConditionReport::find(std::string_view name) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const ConditionEntry& e) { return e.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

std::vector<std::string> ConditionReport::failed_names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (!e.pass) out.push_back(e.name);
  }
  return out;
}

namespace {

// Display width in code points; names carry UTF-8 math symbols.
std::size_t display_width(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

void pad(std::ostringstream& os, std::string_view s, std::size_t width) {
  os << s;
  for (std::size_t w = display_width(s); w < width; ++w) os << ' ';
}

}  // namespace

std::string ConditionReport::to_table() const {
  std::size_t name_w = 9, rule_w = 4;
  for (const auto& e : entries_) {
    name_w = std::max(name_w, display_width(e.name));
    rule_w = std::max(rule_w, display_width(e.rule));
  }
  std::ostringstream os;
  pad(os, "condition", name_w + 2);
  pad(os, "rule", rule_w + 2);
  os << "value        result\n";
  for (const auto& e : entries_) {
    pad(os, e.name, name_w + 2);
    pad(os, e.rule, rule_w + 2);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-12.6g ", e.value);
    os << buf << (e.pass ? "PASS" : "FAIL");
    if (!e.detail.empty()) os << "  (" << e.detail << ")";
    os << '\n';
  }
  for (const auto& w : warnings_) os << "warning: " << w << '\n';
  os << "overall: " << (overall() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace dpopt
