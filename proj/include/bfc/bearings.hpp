#pragma once

#include <Eigen/Dense>
#include <map>

#include "bfc/graph.hpp"

namespace bfc {

// P_g = I - g g^T: symmetric, idempotent, annihilates g.
inline Mat orthogonal_projection(const Vec& g) {
  const double nrm = g.norm();
  if (nrm < 1e-12) throw Error(ErrorCode::ZeroVector, "projection of zero vector");
  Vec u = g / nrm;
  return Mat::Identity(g.size(), g.size()) - u * u.transpose();
}

// Desired unit bearing per directed edge. If both (i,j) and (j,i) exist,
// g_ji = -g_ij exactly by construction.
struct BearingSpec {
  std::map<Edge, Vec> bearings;

  const Vec& at(int i, int j) const {
    auto it = bearings.find({i, j});
    if (it == bearings.end())
      throw Error(ErrorCode::MissingBearing,
                  "no bearing for edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
    return it->second;
  }

  bool has(int i, int j) const { return bearings.count({i, j}) > 0; }
};

// Bearings of a configuration: g_ij = (p_j - p_i)/||p_j - p_i||.
// Each undirected pair is normalized once and negated for the reverse edge.
inline BearingSpec bearings_of(const FormationState& state, const FormationGraph& graph) {
  const int d = graph.d;
  BearingSpec spec;
  for (const auto& [i, j] : graph.edges) {
    if (spec.has(i, j)) continue;
    Vec e = state.pos(j, d) - state.pos(i, d);
    const double nrm = e.norm();
    if (nrm < 1e-9)
      throw Error(ErrorCode::CoincidentAgents,
                  "agents " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
    Vec g = e / nrm;
    spec.bearings[{i, j}] = g;
    if (graph.has_edge(j, i)) spec.bearings[{j, i}] = -g;
  }
  return spec;
}

}  // namespace bfc
