#pragma once

#include <Eigen/Dense>
#include <cassert>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bfc/analysis.hpp"
#include "bfc/controllers.hpp"
#include "bfc/maneuver.hpp"
#include "bfc/rk4.hpp"

namespace bfc {

struct FormationObservables {
  Vec centroid;
  double scale = 0.0;
  double total_bearing_error = 0.0;
};

struct Scenario {
  std::string name;
  FormationGraph graph;
  Vec reference_configuration;  // generates the bearing spec and the t=0 target
  ManeuverProfile profile;
  ControllerConfig controller;
  double T = 30.0;
  double h = 1e-3;

  // Initial follower state: explicit, or perturbed from the target.
  std::optional<Vec> initial_positions;   // stacked over followers
  std::optional<Vec> initial_velocities;  // stacked over followers
  double perturbation_radius = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    graph.validate();
    controller.validate(graph.d * graph.n_followers());
    if (h <= 0.0 || T < h)
      throw Error(ErrorCode::ValidationError, "need h > 0 and T >= h");
    if (reference_configuration.size() != graph.d * graph.n)
      throw Error(ErrorCode::ValidationError, "reference configuration size mismatch");
  }
};

struct SimResult {
  std::vector<double> times;
  std::vector<Vec> positions;          // full stacks, dn
  std::vector<Vec> velocities;         // full stacks, dn
  std::vector<Vec> target_positions;   // target formation, dn
  std::vector<Vec> delta_p;            // stacked follower errors
  std::vector<Vec> delta_v;
  std::vector<double> total_bearing_error;
  std::vector<double> min_pairwise_distance;
  std::vector<double> max_control_inf;
  std::vector<double> lyapunov_V;  // empty for laws without a monitor
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> warnings;

  int n = 0, d = 0, n_leaders = 0;
};

// Sum over the directed edge set of ||g_ij - g*_ij||.
inline double total_bearing_error_of(const FormationState& state, const FormationGraph& graph,
                                     const BearingSpec& spec) {
  const int d = graph.d;
  double acc = 0.0;
  for (const auto& [i, j] : graph.edges) {
    Vec e = state.pos(j, d) - state.pos(i, d);
    const double nrm = e.norm();
    if (nrm < 1e-9) throw Error(ErrorCode::CoincidentAgents, "coincident agents");
    acc += (e / nrm - spec.at(i, j)).norm();
  }
  return acc;
}

// Minimum distance over ALL agent pairs, not only edges.
inline double min_pairwise_distance_of(const Vec& p, int n, int d) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::min(best, (p.segment(i * d, d) - p.segment(j * d, d)).norm());
  return best;
}

inline std::pair<FormationObservables, double> metrics(const FormationState& state,
                                                       const FormationGraph& graph,
                                                       const BearingSpec& spec) {
  FormationObservables obs;
  obs.centroid = centroid(state.positions, graph.d);
  obs.scale = formation_scale(state.positions, graph.d);
  obs.total_bearing_error = total_bearing_error_of(state, graph, spec);
  return {obs, min_pairwise_distance_of(state.positions, graph.n, graph.d)};
}

// Precomputed quantities shared by every integrator stage of a run.
class Simulator {
 public:
  Simulator(const Scenario& sc)
      : sc_(sc),
        spec_(bearings_of(FormationState(sc.reference_configuration,
                                         Vec::Zero(sc.reference_configuration.size())),
                          sc.graph)),
        L_(build_bearing_laplacian(sc.graph, spec_)),
        ldlt_(L_.ff) {
    sc_.validate();
    auto uniq = check_uniqueness(L_);
    if (!uniq.unique)
      throw Error(ErrorCode::NonUniqueTarget,
                  "target formation not unique (sigma_min=" + std::to_string(uniq.sigma_min) + ")");
  }

  const BearingSpec& spec() const { return spec_; }
  const BearingLaplacian& laplacian() const { return L_; }

  int dn() const { return sc_.graph.d * sc_.graph.n; }
  int dnf() const { return sc_.graph.d * sc_.graph.n_followers(); }
  int dnl() const { return sc_.graph.d * sc_.graph.n_leaders; }

  // Combined integrator state: [p_star; p_f; v_f; eta; zeta].
  Vec pack(const Vec& p_star, const Vec& p_f, const Vec& v_f, const ControllerState& cs) const {
    Vec y(dn() + 4 * dnf());
    y << p_star, p_f, v_f, cs.eta, cs.zeta;
    return y;
  }

  // Leader velocity/acceleration stacks from the maneuver profile and the
  // current target formation.
  Vec leader_velocity_stack(double t, const Vec& p_star) const {
    const int d = sc_.graph.d;
    Vec c = centroid(p_star, d);
    Vec v(dnl());
    for (int i = 0; i < sc_.graph.n_leaders; ++i)
      v.segment(i * d, d) = leader_velocity(t, sc_.profile, p_star.segment(i * d, d), c);
    return v;
  }

  Vec leader_acceleration_stack(double t, const Vec& p_star) const {
    const int d = sc_.graph.d;
    Vec c = centroid(p_star, d);
    Vec a(dnl());
    for (int i = 0; i < sc_.graph.n_leaders; ++i) {
      Vec p_i = p_star.segment(i * d, d);
      Vec v_i = leader_velocity(t, sc_.profile, p_i, c);
      a.segment(i * d, d) = leader_acceleration(t, sc_.profile, p_i, c, v_i);
    }
    return a;
  }

  // Stacked follower accelerations consistent with every agent's local
  // acceleration-feedback law simultaneously: L_ff u_f = rhs.
  Vec follower_accel_solve(double t, const Vec& p_star, const Vec& p_f, const Vec& v_f,
                           const ControllerState& cs) const {
    const auto& cfg = sc_.controller;
    Vec p_l = p_star.head(dnl());
    Vec v_l = leader_velocity_stack(t, p_star);
    Vec a_l = leader_acceleration_stack(t, p_star);
    Vec pre_sat = -cfg.k_p * (L_.ff * p_f + L_.fl * p_l) - cfg.k_v * (L_.ff * v_f + L_.fl * v_l);
    Vec rhs;
    switch (cfg.law) {
      case ControlLaw::ACCEL:
        rhs = pre_sat - L_.fl * a_l;
        break;
      case ControlLaw::ACCEL_INTEGRAL:
        rhs = pre_sat - cfg.k_I * cs.zeta - L_.fl * a_l;
        break;
      case ControlLaw::ACCEL_SAT:
        rhs = sat(pre_sat, cfg.beta, cfg.sat_kind) - L_.fl * a_l;
        break;
      default:
        throw Error(ErrorCode::UnsupportedLaw, "not an acceleration-feedback law");
    }
    Vec u = ldlt_.solve(rhs);
    if ((L_.ff * u - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
      throw Error(ErrorCode::SingularFollowerBlock, "stacked acceleration solve failed");
    return u;
  }

  // Controller output stack at (t, state); per-agent laws for the PD family,
  // the simultaneous stacked solve for the acceleration family.
  Vec control_stack(double t, const Vec& p_star, const Vec& p_f, const Vec& v_f,
                    const ControllerState& cs) const {
    const auto& cfg = sc_.controller;
    if (is_accel_law(cfg.law)) return follower_accel_solve(t, p_star, p_f, v_f, cs);
    const int d = sc_.graph.d;
    FormationState full = assemble_full(t, p_star, p_f, v_f);
    Vec u(dnf());
    for (int i = sc_.graph.n_leaders; i < sc_.graph.n; ++i) {
      Vec u_i;
      switch (cfg.law) {
        case ControlLaw::PD:
          u_i = control_pd(i, full, sc_.graph, spec_, cfg);
          break;
        case ControlLaw::PD_INTEGRAL:
          u_i = control_pd_integral(i, full, cs, sc_.graph, spec_, cfg);
          break;
        case ControlLaw::PD_SAT:
          u_i = control_pd_sat(i, full, sc_.graph, spec_, cfg);
          break;
        default:
          throw Error(ErrorCode::UnsupportedLaw, "unreachable");
      }
      u.segment((i - sc_.graph.n_leaders) * d, d) = u_i;
    }
    return u;
  }

  FormationState assemble_full(double t, const Vec& p_star, const Vec& p_f,
                               const Vec& v_f) const {
    Vec p(dn()), v(dn());
    p << p_star.head(dnl()), p_f;
    v << leader_velocity_stack(t, p_star), v_f;
    return FormationState(p, v, t);
  }

  Vec target_follower_velocity(double t, const Vec& p_star) const {
    Vec flow = target_flow(t, p_star, sc_.graph.d, sc_.profile);
    return flow.tail(dnf());
  }

  Vec derivative(double t, const Vec& y) const {
    Vec p_star = y.head(dn());
    Vec p_f = y.segment(dn(), dnf());
    Vec v_f = y.segment(dn() + dnf(), dnf());
    ControllerState cs;
    cs.eta = y.segment(dn() + 2 * dnf(), dnf());
    cs.zeta = y.tail(dnf());

    Vec u = control_stack(t, p_star, p_f, v_f, cs);
    Vec w = sc_.controller.disturbance(dnf());

    Vec dy(y.size());
    dy.head(dn()) = target_flow(t, p_star, sc_.graph.d, sc_.profile);
    dy.segment(dn(), dnf()) = v_f;
    dy.segment(dn() + dnf(), dnf()) = u + w;
    dy.segment(dn() + 2 * dnf(), dnf()) = p_f - p_star.tail(dnf());      // eta' = delta_p
    dy.tail(dnf()) = L_.ff * p_f + L_.fl * p_star.head(dnl());           // zeta' = L_ff delta_p
    return dy;
  }

  Vec step(double t, const Vec& y) const {
    Vec y_next = rk4_step([this](double tt, const Vec& x) { return derivative(tt, x); }, t, y,
                          sc_.h);
    if (!y_next.allFinite() || y_next.norm() > 1e12)
      throw Error(ErrorCode::NumericalBlowup, "state norm exceeded 1e12");
    return y_next;
  }

  Vec initial_state() const {
    const Vec& ref = sc_.reference_configuration;
    Vec p_f0, v_f0;
    if (sc_.initial_positions) {
      p_f0 = *sc_.initial_positions;
      if (p_f0.size() != dnf())
        throw Error(ErrorCode::ValidationError, "initial positions size mismatch");
    } else {
      p_f0 = ref.tail(dnf());
      if (sc_.perturbation_radius > 0.0) {
        std::mt19937_64 rng(sc_.seed);
        std::uniform_real_distribution<double> u(-sc_.perturbation_radius,
                                                 sc_.perturbation_radius);
        for (int k = 0; k < p_f0.size(); ++k) p_f0(k) += u(rng);
      }
    }
    if (sc_.initial_velocities) {
      v_f0 = *sc_.initial_velocities;
      if (v_f0.size() != dnf())
        throw Error(ErrorCode::ValidationError, "initial velocities size mismatch");
    } else {
      v_f0 = Vec::Zero(dnf());
    }
    return pack(ref, p_f0, v_f0, ControllerState::zero(dnf()));
  }

  SimResult run() const {
    SimResult res;
    res.n = sc_.graph.n;
    res.d = sc_.graph.d;
    res.n_leaders = sc_.graph.n_leaders;

    if (is_integral_law(sc_.controller.law)) {
      const double bound = integral_gain_bound(sc_.controller.law, L_, sc_.controller.k_p,
                                               sc_.controller.k_v);
      if (sc_.controller.k_I >= bound)
        res.warnings.push_back(std::string(to_string(ErrorCode::BadGainBound)) +
                               ": k_I=" + std::to_string(sc_.controller.k_I) +
                               " >= " + std::to_string(bound));
    }

    const bool has_lyapunov = sc_.controller.law == ControlLaw::PD ||
                              sc_.controller.law == ControlLaw::ACCEL ||
                              is_sat_law(sc_.controller.law);

    const int steps = static_cast<int>(std::llround(sc_.T / sc_.h));
    Vec y = initial_state();
    double t = 0.0;
    for (int k = 0; k <= steps; ++k) {
      try {
        record(res, t, y, has_lyapunov);
        if (k < steps) {
          y = step(t, y);
          t = (k + 1) * sc_.h;
        }
      } catch (const Error& e) {
        res.aborted = true;
        res.abort_reason = e.what();
        break;
      }
    }
    return res;
  }

 private:
  void record(SimResult& res, double t, const Vec& y, bool has_lyapunov) const {
    Vec p_star = y.head(dn());
    Vec p_f = y.segment(dn(), dnf());
    Vec v_f = y.segment(dn() + dnf(), dnf());
    ControllerState cs;
    cs.eta = y.segment(dn() + 2 * dnf(), dnf());
    cs.zeta = y.tail(dnf());
    assert((cs.zeta - L_.ff * cs.eta).norm() <=
           1e-6 * std::max(1.0, cs.eta.norm()));  // edge-sum form consistency

    FormationState full = assemble_full(t, p_star, p_f, v_f);
    Vec dp = p_f - p_star.tail(dnf());
    Vec dv = v_f - target_follower_velocity(t, p_star);
    Vec u = control_stack(t, p_star, p_f, v_f, cs);

    res.times.push_back(t);
    res.positions.push_back(full.positions);
    res.velocities.push_back(full.velocities);
    res.target_positions.push_back(p_star);
    res.delta_p.push_back(dp);
    res.delta_v.push_back(dv);
    res.total_bearing_error.push_back(total_bearing_error_of(full, sc_.graph, spec_));
    res.min_pairwise_distance.push_back(
        min_pairwise_distance_of(full.positions, sc_.graph.n, sc_.graph.d));
    double max_u = 0.0;
    for (int i = 0; i < sc_.graph.n_followers(); ++i)
      max_u = std::max(max_u, u.segment(i * sc_.graph.d, sc_.graph.d).lpNorm<Eigen::Infinity>());
    res.max_control_inf.push_back(max_u);
    if (has_lyapunov)
      res.lyapunov_V.push_back(lyapunov_value(sc_.controller.law, L_, sc_.controller, dp, dv));
  }

  Scenario sc_;
  BearingSpec spec_;
  BearingLaplacian L_;
  Eigen::LDLT<Mat> ldlt_;
};

inline SimResult run(const Scenario& sc) { return Simulator(sc).run(); }

}  // namespace bfc
