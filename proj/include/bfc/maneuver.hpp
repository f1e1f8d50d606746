#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bfc/laplacian.hpp"
#include "bfc/rk4.hpp"

namespace bfc {

inline Vec centroid(const Vec& p, int d) {
  const int n = static_cast<int>(p.size()) / d;
  Vec c = Vec::Zero(d);
  for (int i = 0; i < n; ++i) c += p.segment(i * d, d);
  return c / n;
}

// Root-mean-square distance of the agents to the centroid.
inline double formation_scale(const Vec& p, int d) {
  const int n = static_cast<int>(p.size()) / d;
  Vec c = centroid(p, d);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += (p.segment(i * d, d) - c).squaredNorm();
  return std::sqrt(acc / n);
}

enum class SegmentKind { Constant, Polynomial, Sinusoid };

// One time segment of the maneuver profile. Polynomial coefficients are in
// tau = t - t_start, lowest degree first; a constant segment is the degree-0
// case. Sinusoids are offset + amplitude * sin(omega*tau + phase).
struct ProfileSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  SegmentKind kind = SegmentKind::Constant;

  Mat vc_coeffs;        // d x (deg+1), polynomial/constant
  Vec alpha_coeffs;     // (deg+1), polynomial/constant
  Vec vc_offset, vc_amplitude;
  double vc_omega = 0.0, vc_phase = 0.0;
  double alpha_offset = 0.0, alpha_amplitude = 0.0;
  double alpha_omega = 0.0, alpha_phase = 0.0;

  Vec vc(double t) const {
    const double tau = t - t_start;
    if (kind == SegmentKind::Sinusoid)
      return vc_offset + vc_amplitude * std::sin(vc_omega * tau + vc_phase);
    Vec out = Vec::Zero(vc_coeffs.rows());
    double pw = 1.0;
    for (int k = 0; k < vc_coeffs.cols(); ++k, pw *= tau) out += vc_coeffs.col(k) * pw;
    return out;
  }

  Vec vc_dot(double t) const {
    const double tau = t - t_start;
    if (kind == SegmentKind::Sinusoid)
      return vc_amplitude * (vc_omega * std::cos(vc_omega * tau + vc_phase));
    Vec out = Vec::Zero(vc_coeffs.rows());
    double pw = 1.0;
    for (int k = 1; k < vc_coeffs.cols(); ++k, pw *= tau) out += vc_coeffs.col(k) * (k * pw);
    return out;
  }

  double alpha(double t) const {
    const double tau = t - t_start;
    if (kind == SegmentKind::Sinusoid)
      return alpha_offset + alpha_amplitude * std::sin(alpha_omega * tau + alpha_phase);
    double out = 0.0, pw = 1.0;
    for (int k = 0; k < alpha_coeffs.size(); ++k, pw *= tau) out += alpha_coeffs(k) * pw;
    return out;
  }

  double alpha_dot(double t) const {
    const double tau = t - t_start;
    if (kind == SegmentKind::Sinusoid)
      return alpha_amplitude * alpha_omega * std::cos(alpha_omega * tau + alpha_phase);
    double out = 0.0, pw = 1.0;
    for (int k = 1; k < alpha_coeffs.size(); ++k, pw *= tau) out += alpha_coeffs(k) * (k * pw);
    return out;
  }
};

// Desired common translational velocity v_c(t) and scaling rate alpha(t),
// piecewise over [0, T_end]. Segment lookup is right-continuous; at a
// boundary the right-hand segment applies.
class ManeuverProfile {
 public:
  ManeuverProfile() = default;
  explicit ManeuverProfile(std::vector<ProfileSegment> segments)
      : segments_(std::move(segments)) {
    if (segments_.empty())
      throw Error(ErrorCode::ValidationError, "profile needs at least one segment");
    for (size_t k = 0; k + 1 < segments_.size(); ++k) {
      if (std::abs(segments_[k].t_end - segments_[k + 1].t_start) > 1e-12)
        throw Error(ErrorCode::ValidationError, "profile segments must cover [0,T] without gaps");
    }
  }

  static ManeuverProfile constant(const Vec& v_c, double alpha, double t_end) {
    ProfileSegment s;
    s.t_start = 0.0;
    s.t_end = t_end;
    s.kind = SegmentKind::Constant;
    s.vc_coeffs = v_c;
    s.alpha_coeffs = Vec::Constant(1, alpha);
    return ManeuverProfile({s});
  }

  double t_end() const { return segments_.back().t_end; }
  const std::vector<ProfileSegment>& segments() const { return segments_; }

  Vec v_c(double t) const { return segment(t).vc(t); }
  Vec v_c_dot(double t) const { return segment(t).vc_dot(t); }
  double alpha(double t) const { return segment(t).alpha(t); }
  double alpha_dot(double t) const { return segment(t).alpha_dot(t); }

  bool at_boundary(double t, double tol = 1e-12) const {
    for (const auto& s : segments_)
      if (std::abs(t - s.t_start) <= tol || std::abs(t - s.t_end) <= tol) return true;
    return false;
  }

 private:
  const ProfileSegment& segment(double t) const {
    if (t < segments_.front().t_start - 1e-12 || t > t_end() + 1e-12)
      throw Error(ErrorCode::TimeOutOfDomain, "t=" + std::to_string(t));
    for (const auto& s : segments_)
      if (t < s.t_end) return s;
    return segments_.back();
  }

  std::vector<ProfileSegment> segments_;
};

// Leader velocity realizing the desired centroid/scale dynamics:
// v_i = v_c(t) + alpha(t) (p_i - c(p*)).
inline Vec leader_velocity(double t, const ManeuverProfile& profile, const Vec& p_leader_i,
                           const Vec& target_centroid) {
  return profile.v_c(t) + profile.alpha(t) * (p_leader_i - target_centroid);
}

// Time derivative of leader_velocity along the leader's own trajectory:
// vdot_i = vdot_c + alphadot (p_i - c) + alpha (v_i - v_c), using cdot = v_c.
// At a segment boundary the right-hand derivative is returned and the flag set.
inline Vec leader_acceleration(double t, const ManeuverProfile& profile, const Vec& p_leader_i,
                               const Vec& target_centroid, const Vec& v_leader_i,
                               bool* boundary_flag = nullptr) {
  if (boundary_flag) *boundary_flag = profile.at_boundary(t);
  return profile.v_c_dot(t) + profile.alpha_dot(t) * (p_leader_i - target_centroid) +
         profile.alpha(t) * (v_leader_i - profile.v_c(t));
}

// Target formation flow: pdot* = 1 (x) v_c(t) + alpha(t) (p* - 1 (x) c(p*)).
inline Vec target_flow(double t, const Vec& p_star, int d, const ManeuverProfile& profile) {
  const int n = static_cast<int>(p_star.size()) / d;
  Vec c = centroid(p_star, d);
  Vec vc = profile.v_c(t);
  const double a = profile.alpha(t);
  Vec dp(p_star.size());
  for (int i = 0; i < n; ++i)
    dp.segment(i * d, d) = vc + a * (p_star.segment(i * d, d) - c);
  return dp;
}

// Integrates the target formation ODE on the given time grid. Bearings stay
// constant along the result since the flow lies in the null space of L.
inline std::vector<Vec> propagate_target(const ManeuverProfile& profile,
                                         const FormationGraph& graph, const BearingSpec& spec,
                                         const Vec& p_star0, const std::vector<double>& t_grid) {
  BearingLaplacian L = build_bearing_laplacian(graph, spec);
  const double resid = (L.full * p_star0).norm();
  if (resid > 1e-8 * std::max(1.0, p_star0.norm()))
    throw Error(ErrorCode::ValidationError,
                "initial target inconsistent with bearings (|L p*|=" + std::to_string(resid) + ")");
  std::vector<Vec> traj;
  traj.reserve(t_grid.size());
  Vec p = p_star0;
  traj.push_back(p);
  auto f = [&](double t, const Vec& x) { return target_flow(t, x, graph.d, profile); };
  for (size_t k = 0; k + 1 < t_grid.size(); ++k) {
    p = rk4_step(f, t_grid[k], p, t_grid[k + 1] - t_grid[k]);
    traj.push_back(p);
  }
  return traj;
}

}  // namespace bfc
