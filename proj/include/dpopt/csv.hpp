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

#include <fstream>
#include <string>
#include <vector>

#include "dpopt/monte_carlo.hpp"
#include "dpopt/objectives.hpp"
#include "dpopt/privacy_accountant.hpp"
#include "dpopt/solvers.hpp"

namespace dpopt {

/// Shortest round-trip text for a double; NaN becomes an empty field.
std::string format_number(double v);

/// UTF-8 CSV with a header row. Throws IoError when the file cannot be
/// opened or written.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Columns: k, consensus_error, optimality_gap, distance_to_optimum,
/// tracking_error, epsilon_partial.
void write_trace_csv(const std::string& path, const Trace& trace);
/// Columns: k, mean_gap, var_gap, mean_consensus, var_consensus,
/// mean_tracking, var_tracking, epsilon_partial.
void write_aggregate_csv(const std::string& path, const AggregateResult& agg);
/// Columns: k, varsigma, per_term, epsilon_partial (k = 1..T).
void write_budget_csv(const std::string& path, const PrivacyLedger& ledger);

/// Columns: agent, row, m_0..m_{d-1}, z.
void write_problem_csv(const std::string& path, const QuadraticEstimationProblem& problem);
QuadraticEstimationProblem read_problem_csv(const std::string& path, double sigma_reg);

/// Splits one CSV line on commas (no quoting; the writers never quote).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace dpopt
