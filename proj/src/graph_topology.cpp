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

#include "dpopt/graph_topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpopt/dp_noise.hpp"
#include "dpopt/errors.hpp"

namespace dpopt {
namespace {

constexpr double kConstructionTol = 1e-12;
constexpr double kResidualTol = 1e-10;

std::vector<std::vector<int>> out_lists(const DirectedGraph& g) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(g.m));
  for (const auto& [i, j] : g.edges) out[j].push_back(i);
  return out;
}

std::size_t reach_count(const std::vector<std::vector<int>>& adj, int root) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<int> stack{root};
  seen[root] = 1;
  std::size_t n = 1;
  while (!stack.empty()) {
    const int at = stack.back();
    stack.pop_back();
    for (int next : adj[at]) {
      if (!seen[next]) {
        seen[next] = 1;
        ++n;
        stack.push_back(next);
      }
    }
  }
  return n;
}

double max_abs_eigenvalue(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double symmetric_norm(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void check_gamma(double gamma, double min_diag) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw RangeError("gamma must be a finite nonnegative scalar");
  }
  if (1.0 + gamma * min_diag <= 0.0) {
    throw RangeError("gamma " + std::to_string(gamma) +
                     " too large: 1 + gamma * min diagonal <= 0");
  }
}

// Null vector of A (dimension 1 checked by the caller) by shifted inverse
// iteration from a fixed pseudo-random start.
Eigen::VectorXd null_vector(const Eigen::MatrixXd& A) {
  const auto m = A.rows();
  const double shift = -1e-8 * std::max(1.0, A.norm());
  const Eigen::MatrixXd shifted =
      A - shift * Eigen::MatrixXd::Identity(m, m);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);

  Eigen::VectorXd x(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x[i] = 0.5 + static_cast<double>(mix64(0xd1b54a32d192ed03ULL + i) >> 11) *
                     0x1.0p-53;
  }
  x.normalize();
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd next = lu.solve(x);
    next.normalize();
    if (next.sum() < 0.0) next = -next;
    const double change = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (change < 1e-12) break;
  }
  x = x.cwiseMax(0.0);
  return x * (static_cast<double>(m) / x.sum());
}

int null_dimension(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, s[0]);
  int n = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) n += s[i] <= tol ? 1 : 0;
  return n;
}

}  // namespace

void DirectedGraph::check() const {
  if (m < 1) throw StructureError("graph needs at least one agent");
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= m || j >= m) {
      throw StructureError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") out of range for m = " + std::to_string(m));
    }
    if (i == j) throw StructureError("self-loop at node " + std::to_string(i));
  }
}

DirectedGraph DirectedGraph::reversed() const {
  DirectedGraph g{m, {}};
  g.edges.reserve(edges.size());
  for (const auto& [i, j] : edges) g.edges.emplace_back(j, i);
  return g;
}

ConsensusWeights build_consensus_weights(const DirectedGraph& graph, double edge_weight) {
  graph.check();
  if (!(edge_weight > 0.0) || !std::isfinite(edge_weight)) {
    throw RangeError("edge_weight must be positive");
  }
  const int m = graph.m;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
  for (const auto& [i, j] : graph.edges) {
    W(i, j) = edge_weight;
    W(j, i) = edge_weight;
  }
  for (int i = 0; i < m; ++i) W(i, i) = 0.0;
  for (int i = 0; i < m; ++i) W(i, i) = -W.row(i).sum();

  DirectedGraph undirected{m, graph.edges};
  for (const auto& [i, j] : graph.edges) undirected.edges.emplace_back(j, i);
  if (reach_count(out_lists(undirected), 0) != static_cast<std::size_t>(m)) {
    throw ConnectivityError("graph is disconnected (edge directions dropped)");
  }

  ConsensusWeights out;
  out.W = W;
  out.min_diag_mag = m == 1 ? 0.0 : W.diagonal().cwiseAbs().minCoeff();
  const Eigen::MatrixXd J = Eigen::MatrixXd::Constant(m, m, 1.0 / m);
  out.contraction = symmetric_norm(Eigen::MatrixXd::Identity(m, m) + W - J);
  if (out.contraction >= 1.0) {
    throw SpectralError("contraction " + std::to_string(out.contraction) +
                        " >= 1; use a smaller edge_weight");
  }
  return out;
}

ConditionReport validate_assumption2(const Eigen::MatrixXd& W) {
  ConditionReport r;
  if (W.rows() != W.cols()) {
    r.add("square", "shape", static_cast<double>(W.rows() - W.cols()), false);
    return r;
  }
  const auto m = W.rows();
  const double asym = (W - W.transpose()).cwiseAbs().maxCoeff();
  const double rows = W.rowwise().sum().cwiseAbs().maxCoeff();
  const double cols = W.colwise().sum().cwiseAbs().maxCoeff();
  const Eigen::MatrixXd J = Eigen::MatrixXd::Constant(m, m, 1.0 / m);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd::Identity(m, m) + W - J);
  const double contraction = svd.singularValues()[0];
  r.add("W symmetric", "max |W − Wᵀ| < 1e-12", asym, asym < kConstructionTol);
  r.add("W𝟏 = 0", "max |row sum| < 1e-12", rows, rows < kConstructionTol);
  r.add("𝟏ᵀW = 0", "max |column sum| < 1e-12", cols, cols < kConstructionTol);
  r.add("‖I+W−𝟏𝟏ᵀ/m‖ < 1", "2-norm", contraction, contraction < 1.0);
  return r;
}

std::vector<int> spanning_tree_roots(const DirectedGraph& graph) {
  graph.check();
  const auto adj = out_lists(graph);
  std::vector<int> roots;
  for (int r = 0; r < graph.m; ++r) {
    if (reach_count(adj, r) == static_cast<std::size_t>(graph.m)) roots.push_back(r);
  }
  return roots;
}

ConditionReport validate_assumption4(const DirectedGraph& graph_R,
                                     const DirectedGraph& graph_C) {
  ConditionReport r;
  if (graph_R.m != graph_C.m) {
    r.add("same agent count", "m_R = m_C", graph_R.m - graph_C.m, false);
    return r;
  }
  const auto roots_R = spanning_tree_roots(graph_R);
  const auto roots_C = spanning_tree_roots(graph_C.reversed());
  std::vector<int> common;
  std::set_intersection(roots_R.begin(), roots_R.end(), roots_C.begin(), roots_C.end(),
                        std::back_inserter(common));
  r.add("𝒢_R has a spanning tree", "reachability", static_cast<double>(roots_R.size()),
        !roots_R.empty(), "roots: " + std::to_string(roots_R.size()));
  r.add("𝒢_Cᵀ has a spanning tree", "reachability", static_cast<double>(roots_C.size()),
        !roots_C.empty(), "roots: " + std::to_string(roots_C.size()));
  r.add("root sets intersect", "set intersection", static_cast<double>(common.size()),
        !common.empty());
  return r;
}

PushPullWeights build_push_pull_weights(const DirectedGraph& graph_R,
                                        const DirectedGraph& graph_C,
                                        double edge_weight) {
  graph_R.check();
  graph_C.check();
  if (!(edge_weight > 0.0) || !std::isfinite(edge_weight)) {
    throw RangeError("edge_weight must be positive");
  }
  const ConditionReport a4 = validate_assumption4(graph_R, graph_C);
  if (!a4.overall()) {
    std::string failed;
    for (const auto& n : a4.failed_names()) failed += (failed.empty() ? "" : ", ") + n;
    throw ConnectivityError("spanning-tree requirement violated: " + failed);
  }
  const int m = graph_R.m;
  PushPullWeights w;
  w.R = Eigen::MatrixXd::Zero(m, m);
  w.C = Eigen::MatrixXd::Zero(m, m);
  for (const auto& [i, j] : graph_R.edges) w.R(i, j) = edge_weight;
  for (const auto& [i, j] : graph_C.edges) w.C(i, j) = edge_weight;
  for (int i = 0; i < m; ++i) {
    w.R(i, i) = -w.R.row(i).sum();
    w.C(i, i) = -w.C.col(i).sum();
  }

  const Eigen::MatrixXd Rt = w.R.transpose();
  if (null_dimension(Rt) != 1) throw StructureError("null space of Rᵀ is not one-dimensional");
  if (null_dimension(w.C) != 1) throw StructureError("null space of C is not one-dimensional");
  w.u = null_vector(Rt);
  w.v = null_vector(w.C);

  if ((w.u.transpose() * w.R).cwiseAbs().maxCoeff() >= kResidualTol ||
      (w.C * w.v).cwiseAbs().maxCoeff() >= kResidualTol) {
    throw StructureError("null-vector residual above tolerance");
  }

  w.min_diag_R = w.R.diagonal().cwiseAbs().minCoeff();
  w.min_diag_C = w.C.diagonal().cwiseAbs().minCoeff();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    w.rho_R = contraction_at(w, 1.0);
  } catch (const RangeError&) {
    w.rho_R = nan;
  }
  try {
    w.rho_C = tracker_contraction_at(w, 1.0);
  } catch (const RangeError&) {
    w.rho_C = nan;
  }
  return w;
}

double contraction_at(const ConsensusWeights& weights, double gamma) {
  const auto m = weights.W.rows();
  check_gamma(gamma, weights.W.diagonal().minCoeff());
  const Eigen::MatrixXd J = Eigen::MatrixXd::Constant(m, m, 1.0 / m);
  return symmetric_norm(Eigen::MatrixXd::Identity(m, m) + gamma * weights.W - J);
}

double contraction_at(const PushPullWeights& weights, double gamma) {
  const auto m = weights.R.rows();
  check_gamma(gamma, weights.R.diagonal().minCoeff());
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m) + gamma * weights.R -
                            Eigen::VectorXd::Ones(m) * weights.u.transpose() / m;
  return max_abs_eigenvalue(A);
}

double tracker_contraction_at(const PushPullWeights& weights, double gamma) {
  const auto m = weights.C.rows();
  check_gamma(gamma, weights.C.diagonal().minCoeff());
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m) + gamma * weights.C -
                            weights.v * Eigen::VectorXd::Ones(m).transpose() / m;
  return max_abs_eigenvalue(A);
}

}  // namespace dpopt
