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

#include "dpopt/csv.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "dpopt/errors.hpp"

namespace dpopt {

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw IoError("cannot open '" + path + "' for writing");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw IoError("column count mismatch in '" + path_ + "'");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) throw IoError("write failed for '" + path_ + "'");
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw IoError("close failed for '" + path_ + "'");
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  CsvWriter w(path, {"k", "consensus_error", "optimality_gap", "distance_to_optimum",
                     "tracking_error", "epsilon_partial"});
  for (const auto& r : trace.records) {
    w.row({std::to_string(r.k), format_number(r.consensus_error),
           format_number(r.optimality_gap), format_number(r.distance_to_optimum),
           format_number(r.tracking_error), format_number(r.epsilon_partial)});
  }
  w.close();
}

void write_aggregate_csv(const std::string& path, const AggregateResult& agg) {
  CsvWriter w(path, {"k", "mean_gap", "var_gap", "mean_consensus", "var_consensus",
                     "mean_tracking", "var_tracking", "epsilon_partial"});
  for (const auto& r : agg.rows) {
    w.row({std::to_string(r.k), format_number(r.mean_gap), format_number(r.var_gap),
           format_number(r.mean_consensus), format_number(r.var_consensus),
           format_number(r.mean_tracking), format_number(r.var_tracking),
           format_number(r.epsilon_partial)});
  }
  w.close();
}

void write_budget_csv(const std::string& path, const PrivacyLedger& ledger) {
  CsvWriter w(path, {"k", "varsigma", "per_term", "epsilon_partial"});
  for (std::int64_t k = 1; k <= ledger.horizon; ++k) {
    w.row({std::to_string(k), format_number(ledger.varsigma_total(k)),
           format_number(ledger.per_term[k]), format_number(ledger.epsilon_partial[k])});
  }
  w.close();
}

void write_problem_csv(const std::string& path, const QuadraticEstimationProblem& problem) {
  std::vector<std::string> header{"agent", "row"};
  for (int c = 0; c < problem.d(); ++c) header.push_back("m_" + std::to_string(c));
  header.push_back("z");
  CsvWriter w(path, header);
  for (int i = 0; i < problem.m(); ++i) {
    for (int r = 0; r < problem.s(); ++r) {
      std::vector<std::string> f{std::to_string(i), std::to_string(r)};
      for (int c = 0; c < problem.d(); ++c) f.push_back(format_number(problem.M(i)(r, c)));
      f.push_back(format_number(problem.z(i)[r]));
      w.row(f);
    }
  }
  w.close();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

QuadraticEstimationProblem read_problem_csv(const std::string& path, double sigma_reg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty problem CSV '" + path + "'");
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "agent" || header[1] != "row" || header.back() != "z") {
    throw IoError("problem CSV '" + path + "' has an unexpected header");
  }
  const std::size_t d = header.size() - 3;
  std::map<int, std::map<int, std::pair<std::vector<double>, double>>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw IoError(path + ":" + std::to_string(line_no) + ": wrong column count");
    }
    try {
      std::vector<double> m(d);
      for (std::size_t c = 0; c < d; ++c) m[c] = std::stod(f[2 + c]);
      rows[std::stoi(f[0])][std::stoi(f[1])] = {m, std::stod(f.back())};
    } catch (const std::exception&) {
      throw IoError(path + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  std::vector<Eigen::MatrixXd> M;
  std::vector<Eigen::VectorXd> z;
  int expect_agent = 0;
  for (const auto& [agent, agent_rows] : rows) {
    if (agent != expect_agent++) throw IoError(path + ": agents must be numbered 0..m-1");
    const auto s = static_cast<Eigen::Index>(agent_rows.size());
    Eigen::MatrixXd Mi(s, static_cast<Eigen::Index>(d));
    Eigen::VectorXd zi(s);
    int expect_row = 0;
    for (const auto& [r, data] : agent_rows) {
      if (r != expect_row++) throw IoError(path + ": rows must be numbered 0..s-1");
      for (std::size_t c = 0; c < d; ++c) Mi(r, static_cast<Eigen::Index>(c)) = data.first[c];
      zi[r] = data.second;
    }
    M.push_back(std::move(Mi));
    z.push_back(std::move(zi));
  }
  try {
    return QuadraticEstimationProblem(std::move(M), std::move(z), sigma_reg);
  } catch (const std::invalid_argument& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace dpopt
