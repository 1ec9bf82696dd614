#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace witsen {

struct LmOptions {
  double tol = 1e-12;     // stop once ||r|| <= tol
  int max_iter = 500;
  double fd_step = 1e-6;  // relative forward-difference step
  double tau = 1e-3;      // initial damping relative to max diag(J^T J)
};

struct LmResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped Gauss-Newton with Nielsen's damping update; forward-difference Jacobian.
template <class F>
LmResult levenberg_marquardt(F&& f, Eigen::VectorXd x, const LmOptions& opt = {})
{
  const Eigen::Index n = x.size();
  Eigen::VectorXd r = f(x);
  const Eigen::Index m = r.size();

  auto jacobian = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& r0) {
    Eigen::MatrixXd J(m, n);
    Eigen::VectorXd xp = at;
    for (Eigen::Index j = 0; j < n; ++j) {
      double h = opt.fd_step * std::max(1.0, std::abs(at(j)));
      xp(j) = at(j) + h;
      h = xp(j) - at(j);
      J.col(j) = (f(xp) - r0) / h;
      xp(j) = at(j);
    }
    return J;
  };

  LmResult out;
  double cost = 0.5 * r.squaredNorm();
  Eigen::MatrixXd J = jacobian(x, r);
  Eigen::MatrixXd A = J.transpose() * J;
  Eigen::VectorXd g = J.transpose() * r;
  double mu = opt.tau * A.diagonal().maxCoeff();
  if (!(mu > 0))
    mu = opt.tau;
  double nu = 2.0;

  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (std::sqrt(2.0 * cost) <= opt.tol)
      break;
    Eigen::MatrixXd M = A;
    M.diagonal().array() += mu;
    Eigen::VectorXd dx = M.ldlt().solve(-g);
    if (!dx.allFinite() || dx.norm() <= 1e-16 * (x.norm() + 1e-16))
      break;
    Eigen::VectorXd xn = x + dx;
    Eigen::VectorXd rn = f(xn);
    double cn = rn.allFinite() ? 0.5 * rn.squaredNorm() : std::numeric_limits<double>::infinity();
    double pred = 0.5 * dx.dot(mu * dx - g);
    double rho = pred > 0 ? (cost - cn) / pred : -1.0;
    if (rho > 0) {
      x = xn;
      r = rn;
      cost = cn;
      J = jacobian(x, r);
      A = J.transpose() * J;
      g = J.transpose() * r;
      double t = 2.0 * rho - 1.0;
      mu *= std::max(1.0 / 3.0, 1.0 - t * t * t);
      nu = 2.0;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu))
        break;
    }
  }
  out.x = x;
  out.residual_norm = r.norm();
  out.iterations = it;
  out.converged = out.residual_norm <= opt.tol;
  return out;
}

} // namespace witsen
