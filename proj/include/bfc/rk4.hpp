#pragma once

#include <Eigen/Dense>

namespace bfc {

// One classical 4th-order step of x' = f(t, x).
template <typename F>
Eigen::VectorXd rk4_step(F&& f, double t, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd k1 = f(t, x);
  Eigen::VectorXd k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
  Eigen::VectorXd k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
  Eigen::VectorXd k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace bfc
