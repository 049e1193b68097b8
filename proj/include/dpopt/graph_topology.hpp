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

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dpopt/condition_report.hpp"

namespace dpopt {

/// Edge (i, j) means information flows from j to i.
struct DirectedGraph {
  int m = 0;
  std::vector<std::pair<int, int>> edges;

  /// Throws StructureError on self-loops or out-of-range indices.
  void check() const;
  DirectedGraph reversed() const;
};

struct ConsensusWeights {
  Eigen::MatrixXd W;
  double min_diag_mag = 0.0;  // w̄
  double contraction = 0.0;   // ‖I + W − 𝟏𝟏ᵀ/m‖₂
};

/// Drops edge directions. Throws ConnectivityError for a disconnected graph
/// and SpectralError when the contraction is not below 1.
ConsensusWeights build_consensus_weights(const DirectedGraph& graph, double edge_weight);

/// Symmetry, zero row/column sums, contraction < 1.
ConditionReport validate_assumption2(const Eigen::MatrixXd& W);

struct PushPullWeights {
  Eigen::MatrixXd R;  // zero row sums
  Eigen::MatrixXd C;  // zero column sums
  Eigen::VectorXd u;  // uᵀR = 0, Σu = m
  Eigen::VectorXd v;  // Cv = 0, Σv = m
  double min_diag_R = 0.0;
  double min_diag_C = 0.0;
  double rho_R = 0.0;  // contraction_at(γ = 1), NaN if out of range
  double rho_C = 0.0;
};

/// Throws ConnectivityError when the pair fails the spanning-tree test and
/// StructureError when a null space has dimension > 1.
PushPullWeights build_push_pull_weights(const DirectedGraph& graph_R,
                                        const DirectedGraph& graph_C,
                                        double edge_weight);

/// Nodes from which every node is reachable along the graph's flow.
std::vector<int> spanning_tree_roots(const DirectedGraph& graph);

/// 𝒢_R and 𝒢_{Cᵀ} each contain a spanning tree and share a root.
ConditionReport validate_assumption4(const DirectedGraph& graph_R,
                                     const DirectedGraph& graph_C);

/// ‖I + γW − 𝟏𝟏ᵀ/m‖₂. RangeError when 1 + γ·min_i w_ii ≤ 0 or γ < 0.
double contraction_at(const ConsensusWeights& weights, double gamma);
/// Spectral radius of I + γR − 𝟏uᵀ/m.
double contraction_at(const PushPullWeights& weights, double gamma);
/// Spectral radius of I + γC − v𝟏ᵀ/m.
double tracker_contraction_at(const PushPullWeights& weights, double gamma);

}  // namespace dpopt
