#pragma once

#include <Eigen/Dense>

#include "bfc/bearings.hpp"

namespace bfc {

// Matrix-weighted graph Laplacian whose edge weights are the orthogonal
// projection matrices of the desired bearings, with its leader/follower
// block partition.
struct BearingLaplacian {
  Mat full;  // dn x dn
  Mat ll, lf, fl, ff;
  int d = 0;
  int n_leaders = 0;
  int n_followers = 0;
};

inline BearingLaplacian build_bearing_laplacian(const FormationGraph& graph,
                                                const BearingSpec& spec) {
  const int d = graph.d;
  const int n = graph.n;
  Mat L = Mat::Zero(d * n, d * n);
  for (const auto& [i, j] : graph.edges) {
    Mat P = orthogonal_projection(spec.at(i, j));
    L.block(i * d, j * d, d, d) -= P;
    L.block(i * d, i * d, d, d) += P;
  }
  BearingLaplacian out;
  out.full = std::move(L);
  out.d = d;
  out.n_leaders = graph.n_leaders;
  out.n_followers = graph.n_followers();
  const int dl = d * graph.n_leaders;
  const int df = d * graph.n_followers();
  out.ll = out.full.topLeftCorner(dl, dl);
  out.lf = out.full.topRightCorner(dl, df);
  out.fl = out.full.bottomLeftCorner(df, dl);
  out.ff = out.full.bottomRightCorner(df, df);
  return out;
}

struct UniquenessResult {
  bool unique = false;
  double sigma_min = 0.0;
};

// The target formation is unique iff L_ff is nonsingular. Decided by the
// smallest singular value against a relative threshold.
inline UniquenessResult check_uniqueness(const BearingLaplacian& L) {
  Eigen::JacobiSVD<Mat> svd(L.ff);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  UniquenessResult r;
  r.sigma_min = smin;
  r.unique = smin > 1e-8 * smax;
  return r;
}

// Follower target positions/velocities pinned by the leaders:
// L_ff p_f* = -L_fl p_l (and likewise for velocities).
inline std::pair<Vec, Vec> target_followers(const BearingLaplacian& L, const Vec& p_l,
                                            const Vec& v_l) {
  auto uniq = check_uniqueness(L);
  if (!uniq.unique)
    throw Error(ErrorCode::SingularFollowerBlock,
                "follower block singular (sigma_min=" + std::to_string(uniq.sigma_min) + ")");
  Eigen::LDLT<Mat> ldlt(L.ff);
  Vec p_f = ldlt.solve(-L.fl * p_l);
  Vec v_f = ldlt.solve(-L.fl * v_l);
  return {p_f, v_f};
}

}  // namespace bfc
