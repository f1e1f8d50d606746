#pragma once

#include <Eigen/Dense>

#include "bfc/bearings.hpp"

namespace bfc {

// Stacked bearing function over the oriented edge list
// (lower-index -> higher-index).
inline Vec bearing_function(const FormationState& state, const FormationGraph& graph) {
  const int d = graph.d;
  const auto edges = graph.oriented_edges();
  Vec f(d * static_cast<int>(edges.size()));
  int k = 0;
  for (const auto& [i, j] : edges) {
    Vec e = state.pos(j, d) - state.pos(i, d);
    const double nrm = e.norm();
    if (nrm < 1e-9) throw Error(ErrorCode::CoincidentAgents, "coincident endpoints");
    f.segment(k * d, d) = e / nrm;
    ++k;
  }
  return f;
}

// Jacobian of the bearing function: block row k has -P_g/||e|| in the columns
// of the tail agent and +P_g/||e|| in the columns of the head agent.
inline Mat bearing_rigidity_matrix(const FormationState& state, const FormationGraph& graph) {
  const int d = graph.d;
  const auto edges = graph.oriented_edges();
  Mat R = Mat::Zero(d * static_cast<int>(edges.size()), d * graph.n);
  int k = 0;
  for (const auto& [i, j] : edges) {
    Vec e = state.pos(j, d) - state.pos(i, d);
    const double nrm = e.norm();
    if (nrm < 1e-9) throw Error(ErrorCode::CoincidentAgents, "coincident endpoints");
    Mat P = orthogonal_projection(e);
    R.block(k * d, i * d, d, d) = -P / nrm;
    R.block(k * d, j * d, d, d) = P / nrm;
    ++k;
  }
  return R;
}

struct RigidityReport {
  int rank = 0;
  bool is_infinitesimally_bearing_rigid = false;
  int null_space_dim = 0;
  int trivial_motion_dim = 0;  // d + 1
};

// Infinitesimal bearing rigidity <=> rank(R_B) = dn - d - 1.
inline RigidityReport rigidity_report(const FormationState& state,
                                      const FormationGraph& graph) {
  Mat R = bearing_rigidity_matrix(state, graph);
  Eigen::JacobiSVD<Mat> svd(R);
  const auto& sv = svd.singularValues();
  const double thresh = 1e-8 * (sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  RigidityReport rep;
  rep.rank = rank;
  rep.null_space_dim = graph.d * graph.n - rank;
  rep.trivial_motion_dim = graph.d + 1;
  rep.is_infinitesimally_bearing_rigid = (rank == graph.d * graph.n - graph.d - 1);
  return rep;
}

}  // namespace bfc
