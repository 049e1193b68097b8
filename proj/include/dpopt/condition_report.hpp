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
#include <string_view>
#include <vector>

namespace dpopt {

struct ConditionEntry {
  std::string name;
  std::string rule;
  double value = 0.0;  // exponent, limit exponent, or measured residual
  bool pass = false;
  std::string detail;
};

/// Ordered list of checked conditions. overall() is the conjunction of the
/// entries; warnings never affect it.
class ConditionReport {
 public:
  void add(ConditionEntry entry);
  void add(std::string name, std::string rule, double value, bool pass,
           std::string detail = {});
  void warn(std::string message);

  /// Appends all entries and warnings of `other`, prefixing names with
  /// `prefix` when non-empty.
  void merge(const ConditionReport& other, std::string_view prefix = {});

  bool overall() const;
  const std::vector<ConditionEntry>& entries() const { return entries_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// nullptr when no entry carries that name.
  const ConditionEntry* find(std::string_view name) const;
  std::vector<std::string> failed_names() const;

  /// Fixed-width text table, one row per entry, then warnings.
  std::string to_table() const;

 private:
  std::vector<ConditionEntry> entries_;
  std::vector<std::string> warnings_;
};

}  // namespace dpopt
