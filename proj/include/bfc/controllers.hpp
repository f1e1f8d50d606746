#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "bfc/bearings.hpp"

namespace bfc {

enum class ControlLaw { PD, ACCEL, PD_INTEGRAL, ACCEL_INTEGRAL, PD_SAT, ACCEL_SAT };

enum class SatKind { Clamp, Tanh };

inline bool is_accel_law(ControlLaw law) {
  return law == ControlLaw::ACCEL || law == ControlLaw::ACCEL_INTEGRAL ||
         law == ControlLaw::ACCEL_SAT;
}
inline bool is_integral_law(ControlLaw law) {
  return law == ControlLaw::PD_INTEGRAL || law == ControlLaw::ACCEL_INTEGRAL;
}
inline bool is_sat_law(ControlLaw law) {
  return law == ControlLaw::PD_SAT || law == ControlLaw::ACCEL_SAT;
}

struct ControllerConfig {
  ControlLaw law = ControlLaw::PD;
  double k_p = 1.0;
  double k_v = 1.0;
  double k_I = 0.0;
  double beta = 1.0;
  SatKind sat_kind = SatKind::Clamp;
  Vec w_f;  // constant disturbance, stacked over followers (empty = zero)

  void validate(int dn_f) const {
    if (k_p <= 0.0 || k_v <= 0.0)
      throw Error(ErrorCode::ValidationError, "k_p and k_v must be positive");
    if (is_integral_law(law) && k_I <= 0.0)
      throw Error(ErrorCode::ValidationError, "integral law requires k_I > 0");
    if (is_sat_law(law) && beta <= 0.0)
      throw Error(ErrorCode::ValidationError, "saturated law requires beta > 0");
    if (w_f.size() != 0 && w_f.size() != dn_f)
      throw Error(ErrorCode::ValidationError, "disturbance size mismatch");
  }

  Vec disturbance(int dn_f) const {
    return w_f.size() == dn_f ? w_f : Vec::Zero(dn_f);
  }
};

// Integral state of the integral laws. eta = int delta_p dtau (stacked over
// followers); zeta is the per-agent edge-sum form int Sum P (p_i - p_j) dtau,
// which equals L_ff eta along exact trajectories.
struct ControllerState {
  Vec eta;
  Vec zeta;

  static ControllerState zero(int dn_f) {
    ControllerState s;
    s.eta = Vec::Zero(dn_f);
    s.zeta = Vec::Zero(dn_f);
    return s;
  }
};

inline double sat_scalar(double x, double beta, SatKind kind) {
  if (kind == SatKind::Tanh) return beta * std::tanh(x);
  return x > beta ? beta : (x < -beta ? -beta : x);
}

// Componentwise saturation, bounded by beta.
inline Vec sat(const Vec& x, double beta, SatKind kind) {
  Vec out(x.size());
  for (int i = 0; i < x.size(); ++i) out(i) = sat_scalar(x(i), beta, kind);
  return out;
}

// Phi(x) = int_0^x sat(tau) dtau, componentwise.
inline double phi_scalar(double x, double beta, SatKind kind) {
  if (kind == SatKind::Tanh) return beta * std::log(std::cosh(x));
  const double a = std::abs(x);
  return a <= beta ? 0.5 * x * x : beta * a - 0.5 * beta * beta;
}

// 1^T Phi(x): nonnegative, zero iff x = 0.
inline double phi_sum(const Vec& x, double beta, SatKind kind) {
  double acc = 0.0;
  for (int i = 0; i < x.size(); ++i) acc += phi_scalar(x(i), beta, kind);
  return acc;
}

namespace detail {

// Sum_j P_{g*_ij} [k_p (p_i - p_j) + k_v (v_i - v_j)]
inline Vec pv_edge_sum(int i, const FormationState& state, const FormationGraph& graph,
                       const BearingSpec& spec, double k_p, double k_v) {
  const int d = graph.d;
  Vec acc = Vec::Zero(d);
  for (int j : graph.neighbors(i)) {
    Mat P = orthogonal_projection(spec.at(i, j));
    acc += P * (k_p * (state.pos(i, d) - state.pos(j, d)) +
                k_v * (state.vel(i, d) - state.vel(j, d)));
  }
  return acc;
}

inline Mat assemble_Ki(int i, const FormationGraph& graph, const BearingSpec& spec) {
  Mat K = Mat::Zero(graph.d, graph.d);
  for (int j : graph.neighbors(i)) K += orthogonal_projection(spec.at(i, j));
  return K;
}

inline Vec solve_Ki(int i, const FormationGraph& graph, const BearingSpec& spec,
                    const Vec& rhs) {
  Mat K = assemble_Ki(i, graph, spec);
  Eigen::FullPivLU<Mat> lu(K);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularKi, "desired bearings at follower " + std::to_string(i) +
                                           " are collinear");
  return lu.solve(rhs);
}

// Block of the integral edge-sum state for follower i.
inline Vec integral_block(int i, const FormationGraph& graph, const ControllerState& cs) {
  return cs.zeta.segment((i - graph.n_leaders) * graph.d, graph.d);
}

}  // namespace detail

// u_i = -Sum_j P_{g*_ij} [k_p (p_i - p_j) + k_v (v_i - v_j)]
inline Vec control_pd(int i, const FormationState& state, const FormationGraph& graph,
                      const BearingSpec& spec, const ControllerConfig& cfg) {
  return -detail::pv_edge_sum(i, state, graph, spec, cfg.k_p, cfg.k_v);
}

// u_i = -K_i^{-1} Sum_j P_{g*_ij} [k_p (p_i-p_j) + k_v (v_i-v_j) - vdot_j]
inline Vec control_accel(int i, const FormationState& state, const FormationGraph& graph,
                         const BearingSpec& spec, const ControllerConfig& cfg,
                         const std::map<int, Vec>& neighbor_accels) {
  Vec rhs = detail::pv_edge_sum(i, state, graph, spec, cfg.k_p, cfg.k_v);
  for (int j : graph.neighbors(i))
    rhs -= orthogonal_projection(spec.at(i, j)) * neighbor_accels.at(j);
  return detail::solve_Ki(i, graph, spec, -rhs);
}

// PD law plus -k_I Sum_j P_{g*_ij} int (p_i - p_j) dtau.
inline Vec control_pd_integral(int i, const FormationState& state, const ControllerState& cs,
                               const FormationGraph& graph, const BearingSpec& spec,
                               const ControllerConfig& cfg) {
  return control_pd(i, state, graph, spec, cfg) -
         cfg.k_I * detail::integral_block(i, graph, cs);
}

// Acceleration-feedback law with the integral term inside the K_i solve.
inline Vec control_accel_integral(int i, const FormationState& state, const ControllerState& cs,
                                  const FormationGraph& graph, const BearingSpec& spec,
                                  const ControllerConfig& cfg,
                                  const std::map<int, Vec>& neighbor_accels) {
  Vec rhs = detail::pv_edge_sum(i, state, graph, spec, cfg.k_p, cfg.k_v) +
            cfg.k_I * detail::integral_block(i, graph, cs);
  for (int j : graph.neighbors(i))
    rhs -= orthogonal_projection(spec.at(i, j)) * neighbor_accels.at(j);
  return detail::solve_Ki(i, graph, spec, -rhs);
}

// Saturated PD: sat applied componentwise to the PD output.
inline Vec control_pd_sat(int i, const FormationState& state, const FormationGraph& graph,
                          const BearingSpec& spec, const ControllerConfig& cfg) {
  return sat(control_pd(i, state, graph, spec, cfg), cfg.beta, cfg.sat_kind);
}

// u_i = K_i^{-1} sat{-Sum P [k_p(.)+k_v(.)]} + K_i^{-1} Sum P vdot_j
inline Vec control_accel_sat(int i, const FormationState& state, const FormationGraph& graph,
                             const BearingSpec& spec, const ControllerConfig& cfg,
                             const std::map<int, Vec>& neighbor_accels) {
  Vec rhs = sat(-detail::pv_edge_sum(i, state, graph, spec, cfg.k_p, cfg.k_v), cfg.beta,
                cfg.sat_kind);
  for (int j : graph.neighbors(i))
    rhs += orthogonal_projection(spec.at(i, j)) * neighbor_accels.at(j);
  return detail::solve_Ki(i, graph, spec, rhs);
}

}  // namespace bfc
