#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace bfc;
using namespace bfc::testing;

TEST_CASE("rigidity matrix annihilates translations and the configuration") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 5);
    const int d = 2 + static_cast<int>(rng() % 2);
    auto [g, p] = random_unique_formation(rng, n, d);
    Mat R = bearing_rigidity_matrix(state_of(p), g);
    for (int k = 0; k < d; ++k) {
      Vec t = Vec::Zero(n * d);
      for (int i = 0; i < n; ++i) t(i * d + k) = 1.0;
      CHECK((R * t).norm() < 1e-10);
    }
    CHECK((R * p).norm() < 1e-10 * std::max(1.0, p.norm()));
  }
}

TEST_CASE("cube rank is dn - d - 1 = 20") {
  auto rep = rigidity_report(state_of(cube_positions()), cube_graph());
  CHECK(rep.rank == 20);
  CHECK(rep.is_infinitesimally_bearing_rigid);
  CHECK(rep.trivial_motion_dim == 4);
}

TEST_CASE("two agents, one edge, d=2: rank 1") {
  FormationGraph g;
  g.n = 2;
  g.d = 2;
  g.n_leaders = 2;
  add_undirected(g, 0, 1);
  Vec p(4);
  p << 0, 0, 3, 1;
  auto rep = rigidity_report(state_of(p), g);
  CHECK(rep.rank == 1);
  CHECK(rep.is_infinitesimally_bearing_rigid);  // 2*2 - 2 - 1 = 1
}

TEST_CASE("square with diagonal rigid, plain rectangle not") {
  auto rep_b = rigidity_report(state_of(square_positions()), square_graph());
  CHECK(rep_b.rank == 5);
  CHECK(rep_b.is_infinitesimally_bearing_rigid);

  auto rep_a = rigidity_report(state_of(rect_positions()), rect_graph());
  CHECK(rep_a.rank < 5);
  CHECK_FALSE(rep_a.is_infinitesimally_bearing_rigid);
}

TEST_CASE("collinear 3-agent path: report computed without error") {
  FormationGraph g;
  g.n = 3;
  g.d = 2;
  g.n_leaders = 2;
  add_undirected(g, 0, 1);
  add_undirected(g, 1, 2);
  Vec p(6);
  p << 0, 0, 1, 0, 2, 0;
  auto rep = rigidity_report(state_of(p), g);
  CHECK(rep.rank >= 0);
  CHECK_FALSE(rep.is_infinitesimally_bearing_rigid);
}

TEST_CASE("analytic rigidity matrix matches finite differences") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const int d = 2 + static_cast<int>(rng() % 2);
    auto [g, p] = random_unique_formation(rng, n, d);
    Mat R = bearing_rigidity_matrix(state_of(p), g);
    Mat J = fd_rigidity_matrix(state_of(p), g, 1e-6 * p.norm());
    CHECK((R - J).lpNorm<Eigen::Infinity>() <= 1e-5);
  }
}

TEST_CASE("rigidity matrix rejects coincident endpoints") {
  FormationGraph g;
  g.n = 2;
  g.d = 2;
  g.n_leaders = 2;
  add_undirected(g, 0, 1);
  CHECK_THROWS_AS(bearing_rigidity_matrix(state_of(Vec::Zero(4)), g), Error);
}
