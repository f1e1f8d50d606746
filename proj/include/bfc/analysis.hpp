#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>

#include "bfc/controllers.hpp"
#include "bfc/laplacian.hpp"

namespace bfc {

struct SpectralReport {
  Vec mu;                   // eigenvalues of L_ff, ascending
  Eigen::VectorXcd lambda;  // eigenvalues of the error state matrix
  bool hurwitz = false;
  double slowest_mode = 0.0;  // max Re(lambda)
};

inline Vec lff_eigenvalues(const BearingLaplacian& L) {
  Eigen::SelfAdjointEigenSolver<Mat> es(L.ff);
  return es.eigenvalues();
}

// Closed-loop error state matrix of the linear laws, assembled blockwise.
inline Mat error_state_matrix(ControlLaw law, const BearingLaplacian& L,
                              const ControllerConfig& cfg) {
  const int m = static_cast<int>(L.ff.rows());
  const Mat I = Mat::Identity(m, m);
  const Mat Z = Mat::Zero(m, m);
  Mat A;
  switch (law) {
    case ControlLaw::PD:
      A.resize(2 * m, 2 * m);
      A << Z, I, -cfg.k_p * L.ff, -cfg.k_v * L.ff;
      break;
    case ControlLaw::ACCEL:
      A.resize(2 * m, 2 * m);
      A << Z, I, -cfg.k_p * I, -cfg.k_v * I;
      break;
    case ControlLaw::PD_INTEGRAL:
      A.resize(3 * m, 3 * m);
      A << Z, I, Z, Z, Z, I, -cfg.k_I * L.ff, -cfg.k_p * L.ff, -cfg.k_v * L.ff;
      break;
    case ControlLaw::ACCEL_INTEGRAL:
      A.resize(3 * m, 3 * m);
      A << Z, I, Z, Z, Z, I, -cfg.k_I * I, -cfg.k_p * I, -cfg.k_v * I;
      break;
    default:
      throw Error(ErrorCode::UnsupportedLaw, "saturated laws have no linear state matrix");
  }
  return A;
}

inline SpectralReport spectral_report(ControlLaw law, const BearingLaplacian& L,
                                      const ControllerConfig& cfg) {
  SpectralReport rep;
  rep.mu = lff_eigenvalues(L);
  Mat A = error_state_matrix(law, L, cfg);
  Eigen::EigenSolver<Mat> es(A);
  rep.lambda = es.eigenvalues();
  rep.slowest_mode = rep.lambda.real().maxCoeff();
  rep.hurwitz = rep.slowest_mode < -1e-10;
  return rep;
}

// Upper bound on the integral gain: k_p k_v lambda_min(L_ff) for the PD
// variant, k_p k_v for the acceleration-feedback variant.
inline double integral_gain_bound(ControlLaw law, const BearingLaplacian& L, double k_p,
                                  double k_v) {
  if (law == ControlLaw::ACCEL_INTEGRAL) return k_p * k_v;
  Vec mu = lff_eigenvalues(L);
  if (mu(0) <= 0.0)
    throw Error(ErrorCode::SingularFollowerBlock, "L_ff not positive definite");
  return k_p * k_v * mu(0);
}

struct CollisionCertificate {
  double gamma = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool guaranteed = false;
};

// Initial-condition certificate guaranteeing min pairwise distance > gamma.
// min_target_distance is min over the target trajectory of all pairwise
// distances.
inline CollisionCertificate collision_check(ControlLaw law, const BearingLaplacian& L,
                                            const ControllerConfig& cfg, const Vec& delta_p0,
                                            const Vec& delta_v0, double min_target_distance,
                                            double gamma) {
  if (gamma < 0.0 || gamma >= min_target_distance)
    throw Error(ErrorCode::GammaTooLarge,
                "gamma must satisfy 0 <= gamma < min target distance");
  const int n_f = L.n_followers;
  CollisionCertificate cert;
  cert.gamma = gamma;
  const double margin = min_target_distance - gamma;
  if (is_accel_law(law)) {
    cert.lhs = cfg.k_p * delta_p0.squaredNorm() + delta_v0.squaredNorm();
    cert.rhs = (cfg.k_p / n_f) * margin * margin;
  } else {
    const double lam_min = lff_eigenvalues(L)(0);
    cert.lhs = cfg.k_p * delta_p0.dot(L.ff * delta_p0) + delta_v0.squaredNorm();
    cert.rhs = (cfg.k_p * lam_min / n_f) * margin * margin;
  }
  cert.guaranteed = cert.lhs < cert.rhs;
  return cert;
}

// Law-specific Lyapunov function evaluated at the current tracking errors.
inline double lyapunov_value(ControlLaw law, const BearingLaplacian& L,
                             const ControllerConfig& cfg, const Vec& delta_p,
                             const Vec& delta_v) {
  switch (law) {
    case ControlLaw::PD:
      return cfg.k_p * delta_p.dot(L.ff * delta_p) + delta_v.squaredNorm();
    case ControlLaw::ACCEL:
      return cfg.k_p * delta_p.squaredNorm() + delta_v.squaredNorm();
    case ControlLaw::PD_SAT: {
      Vec a = -cfg.k_p * (L.ff * delta_p) - cfg.k_v * (L.ff * delta_v);
      Vec b = -cfg.k_p * (L.ff * delta_p);
      return phi_sum(a, cfg.beta, cfg.sat_kind) + phi_sum(b, cfg.beta, cfg.sat_kind) +
             cfg.k_p * delta_v.dot(L.ff * delta_v);
    }
    case ControlLaw::ACCEL_SAT: {
      Vec eps = L.ff * delta_p;
      Vec eps_dot = L.ff * delta_v;
      Vec a = -cfg.k_p * eps - cfg.k_v * eps_dot;
      Vec b = -cfg.k_p * eps;
      return phi_sum(a, cfg.beta, cfg.sat_kind) + phi_sum(b, cfg.beta, cfg.sat_kind) +
             cfg.k_p * eps_dot.squaredNorm();
    }
    default:
      throw Error(ErrorCode::UnsupportedLaw, "no Lyapunov monitor for this law");
  }
}

}  // namespace bfc
