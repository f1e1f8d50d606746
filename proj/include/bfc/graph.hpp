#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "bfc/errors.hpp"

namespace bfc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using Edge = std::pair<int, int>;

// Leader-follower interaction topology. The first n_leaders indices are
// leaders; every follower-follower edge must be present in both directions.
struct FormationGraph {
  int n = 0;
  int d = 0;
  int n_leaders = 0;
  std::vector<Edge> edges;

  int n_followers() const { return n - n_leaders; }
  bool is_leader(int i) const { return i < n_leaders; }
  bool is_follower(int i) const { return i >= n_leaders; }

  std::vector<int> neighbors(int i) const {
    std::vector<int> out;
    for (const auto& [a, b] : edges)
      if (a == i) out.push_back(b);
    return out;
  }

  bool has_edge(int i, int j) const {
    return std::find(edges.begin(), edges.end(), Edge{i, j}) != edges.end();
  }

  // Undirected edge list, each pair once, oriented lower-index -> higher-index.
  std::vector<Edge> oriented_edges() const {
    std::set<Edge> uniq;
    for (const auto& [a, b] : edges) uniq.insert({std::min(a, b), std::max(a, b)});
    return {uniq.begin(), uniq.end()};
  }

  void validate() const {
    if (n < 2) throw Error(ErrorCode::ValidationError, "need at least 2 agents");
    if (d < 2) throw Error(ErrorCode::ValidationError, "need dimension >= 2");
    if (n_leaders < 2) throw Error(ErrorCode::ValidationError, "need at least 2 leaders");
    if (n_leaders >= n) throw Error(ErrorCode::ValidationError, "need at least 1 follower");
    std::set<Edge> seen;
    for (const auto& [a, b] : edges) {
      if (a < 0 || a >= n || b < 0 || b >= n)
        throw Error(ErrorCode::ValidationError, "edge index out of range");
      if (a == b) throw Error(ErrorCode::ValidationError, "self-loop");
      if (!seen.insert({a, b}).second)
        throw Error(ErrorCode::ValidationError, "duplicate edge");
    }
    for (const auto& [a, b] : edges) {
      if (is_follower(a) && is_follower(b) && !seen.count({b, a}))
        throw Error(ErrorCode::ValidationError,
                    "follower-follower edge must be bidirectional");
    }
  }
};

// Stacked positions/velocities in R^{dn}; agent i occupies block i.
struct FormationState {
  Vec positions;
  Vec velocities;
  double time = 0.0;

  FormationState() = default;
  FormationState(Vec p, Vec v, double t = 0.0)
      : positions(std::move(p)), velocities(std::move(v)), time(t) {}

  Eigen::VectorBlock<Vec> pos(int i, int d) { return positions.segment(i * d, d); }
  Eigen::VectorBlock<const Vec> pos(int i, int d) const {
    return positions.segment(i * d, d);
  }
  Eigen::VectorBlock<Vec> vel(int i, int d) { return velocities.segment(i * d, d); }
  Eigen::VectorBlock<const Vec> vel(int i, int d) const {
    return velocities.segment(i * d, d);
  }
};

}  // namespace bfc
