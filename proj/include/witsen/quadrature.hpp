#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "witsen/error.hpp"

namespace witsen {

// Gauss-Hermite rule for the weight e^{-x^2}.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Orthonormal Hermite values p_{n-1}(x), p_n(x) for the weight e^{-x^2},
// plus sum_{k<n} p_k(x)^2 (Christoffel function denominator).
struct HermiteEval {
  double p_nm1;
  double p_n;
  double christoffel;
};

inline HermiteEval orthonormal_hermite(int n, double x)
{
  double p_prev = 0.0;
  double p = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  double sum = 0.0;
  for (int j = 1; j <= n; ++j) {
    sum += p * p;
    double next = x * std::sqrt(2.0 / j) * p - std::sqrt((j - 1.0) / j) * p_prev;
    p_prev = p;
    p = next;
  }
  return {p_prev, p, sum};
}

} // namespace detail

inline QuadratureRule build_hermite_rule(int order)
{
  if (order < 1 || order > 64)
    throw ConfigError("hermite rule order must be in [1, 64], got " + std::to_string(order));

  const int n = order;
  std::vector<double> z(n, 0.0);
  if (n > 1) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int j = 1; j < n; ++j)
      sub(j - 1) = std::sqrt(j / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
      throw NumericError("jacobi eigen-decomposition failed for order " + std::to_string(n));
    for (int i = 0; i < n; ++i)
      z[i] = eig.eigenvalues()(i);
  }

  // one Newton step on H_n; p_n' = sqrt(2n) p_{n-1}
  for (double& x : z) {
    auto h = detail::orthonormal_hermite(n, x);
    double dp = std::sqrt(2.0 * n) * h.p_nm1;
    if (dp != 0.0)
      x -= h.p_n / dp;
  }

  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 1.0 / detail::orthonormal_hermite(n, z[i]).christoffel;

  for (int i = 0; i < n / 2; ++i) {
    int j = n - 1 - i;
    double a = 0.5 * (z[j] - z[i]);
    z[i] = -a;
    z[j] = a;
    double b = 0.5 * (w[i] + w[j]);
    w[i] = b;
    w[j] = b;
  }
  if (n % 2 == 1)
    z[n / 2] = 0.0;

  return {n, std::move(z), std::move(w)};
}

template <class F>
double integrate(const QuadratureRule& rule, F&& f)
{
  double s = 0.0;
  for (int i = 0; i < rule.order; ++i) {
    double v = f(rule.nodes[i]);
    if (!std::isfinite(v))
      throw NumericError("integrand non-finite at node " + std::to_string(i) + " (z = " +
                         std::to_string(rule.nodes[i]) + ")");
    s += v * rule.weights[i];
  }
  return s;
}

// Expectation of f(X), X ~ N(mean, sd^2), by the rule after x = mean + sqrt(2) sd z.
template <class F>
double gaussian_expectation(const QuadratureRule& rule, double mean, double sd, F&& f)
{
  const double c = std::numbers::sqrt2 * sd;
  double s = 0.0;
  for (int i = 0; i < rule.order; ++i)
    s += rule.weights[i] * f(mean + c * rule.nodes[i]);
  return s / std::sqrt(std::numbers::pi);
}

// Gauss-Legendre rule on [-1, 1], used for piecewise panels.
struct LegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline LegendreRule build_legendre_rule(int order)
{
  if (order < 1 || order > 128)
    throw ConfigError("legendre rule order must be in [1, 128]");
  const int n = order;
  LegendreRule r{std::vector<double>(n, 0.0), std::vector<double>(n, 2.0)};
  if (n == 1)
    return r;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int j = 1; j < n; ++j)
    sub(j - 1) = j / std::sqrt(4.0 * j * j - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = eig.eigenvalues()(i);
    double v0 = eig.eigenvectors()(0, i);
    r.weights[i] = 2.0 * v0 * v0;
  }
  return r;
}

} // namespace witsen
