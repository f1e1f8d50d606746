#pragma once

#include <random>
#include <vector>

#include "bfc/bfc.hpp"

namespace bfc::testing {

inline void add_undirected(FormationGraph& g, int a, int b) {
  g.edges.push_back({a, b});
  g.edges.push_back({b, a});
}

// Square with one diagonal; the leaders 0 and 1 are the diagonal endpoints,
// which makes the target unique and L_ff well conditioned (lambda_min = 1).
inline FormationGraph square_graph() {
  FormationGraph g;
  g.n = 4;
  g.d = 2;
  g.n_leaders = 2;
  add_undirected(g, 0, 2);
  add_undirected(g, 2, 1);
  add_undirected(g, 1, 3);
  add_undirected(g, 3, 0);
  add_undirected(g, 0, 1);
  return g;
}

inline Vec square_positions() {
  Vec p(8);
  p << 0, 0, -4, -4, 0, -4, -4, 0;
  return p;
}

// Plain 4-cycle, no diagonal: target formation is not unique.
inline FormationGraph rect_graph() {
  FormationGraph g;
  g.n = 4;
  g.d = 2;
  g.n_leaders = 2;
  add_undirected(g, 0, 1);
  add_undirected(g, 1, 2);
  add_undirected(g, 2, 3);
  add_undirected(g, 3, 0);
  return g;
}

inline Vec rect_positions() {
  Vec p(8);
  p << 0, 0, 0, -4, -3, -4, -3, 0;
  return p;
}

// 3D cube with one space diagonal, leaders 0 and 1 on the bottom face.
inline FormationGraph cube_graph() {
  FormationGraph g;
  g.n = 8;
  g.d = 3;
  g.n_leaders = 2;
  add_undirected(g, 0, 1);  // bottom face
  add_undirected(g, 1, 2);
  add_undirected(g, 2, 3);
  add_undirected(g, 3, 0);
  add_undirected(g, 4, 5);  // top face
  add_undirected(g, 5, 6);
  add_undirected(g, 6, 7);
  add_undirected(g, 7, 4);
  add_undirected(g, 0, 4);  // verticals
  add_undirected(g, 1, 5);
  add_undirected(g, 2, 6);
  add_undirected(g, 3, 7);
  add_undirected(g, 0, 6);  // space diagonal
  return g;
}

inline Vec cube_positions() {
  Vec p(24);
  p << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1;
  return p;
}

inline FormationState state_of(const Vec& p) {
  return FormationState(p, Vec::Zero(p.size()));
}

// Complete graph over n agents (generically infinitesimally bearing rigid).
inline FormationGraph complete_graph(int n, int d, int n_leaders = 2) {
  FormationGraph g;
  g.n = n;
  g.d = d;
  g.n_leaders = n_leaders;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) add_undirected(g, i, j);
  return g;
}

// Random configuration with unique target formation, retried until the
// positions are well separated.
inline std::pair<FormationGraph, Vec> random_unique_formation(std::mt19937_64& rng, int n,
                                                              int d) {
  FormationGraph g = complete_graph(n, d);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (;;) {
    Vec p(n * d);
    for (int k = 0; k < p.size(); ++k) p(k) = u(rng);
    if (min_pairwise_distance_of(p, n, d) < 0.5) continue;
    auto spec = bearings_of(state_of(p), g);
    auto L = build_bearing_laplacian(g, spec);
    if (check_uniqueness(L).unique) return {g, p};
  }
}

// Central finite-difference Jacobian of the stacked bearing function.
inline Mat fd_rigidity_matrix(const FormationState& state, const FormationGraph& graph,
                              double step) {
  const int dn = graph.d * graph.n;
  Vec f0 = bearing_function(state, graph);
  Mat J(f0.size(), dn);
  for (int k = 0; k < dn; ++k) {
    FormationState sp = state, sm = state;
    sp.positions(k) += step;
    sm.positions(k) -= step;
    J.col(k) = (bearing_function(sp, graph) - bearing_function(sm, graph)) / (2.0 * step);
  }
  return J;
}

}  // namespace bfc::testing
