#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "witsen/counterexample.hpp"
#include "witsen/error.hpp"
#include "witsen/ghq_solver.hpp"
#include "witsen/numeric.hpp"
#include "witsen/quadrature.hpp"

namespace witsen {

struct GridStrategy {
  std::vector<double> grid;
  std::vector<double> values1; // gamma1bar on grid (as x0)
  std::vector<double> values2; // gamma2 on grid (as y1)

  void validate() const
  {
    if (grid.size() < 2 || values1.size() != grid.size() || values2.size() != grid.size())
      throw PreconditionError("grid strategy: need >= 2 points and equal lengths");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw PreconditionError("grid strategy: grid must be strictly increasing");
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (!std::isfinite(values1[i]) || !std::isfinite(values2[i]))
        throw PreconditionError("grid strategy: values must be finite");
  }
};

inline StrategyPair to_pair(const GridStrategy& s)
{
  auto g = std::make_shared<const GridStrategy>(s);
  StrategyPair p;
  p.gamma1bar = [g](double x) { return interp_linear(g->grid, g->values1, x); };
  p.gamma2 = [g](double y) { return interp_linear(g->grid, g->values2, y); };
  p.rep = GridTag{s.grid, s.values1, s.values2};
  return p;
}

inline GridStrategy sample(const StrategyPair& pair, const std::vector<double>& grid)
{
  GridStrategy s{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s.values1[i] = pair.gamma1bar(grid[i]);
    s.values2[i] = pair.gamma2(grid[i]);
  }
  return s;
}

// `points` on [-w sx, w sx] merged with the collocation points of the rule.
inline std::vector<double> default_grid(const ProblemParams& p, const QuadratureRule& rule, int points = 201,
                                        double w = 6.0)
{
  if (points < 2 || !(w > 0))
    throw PreconditionError("default_grid needs >= 2 points and a positive half-width");
  auto g = linspace(-w * p.sigma_x, w * p.sigma_x, points);
  for (double x : collocation_points(p, rule))
    g.push_back(x);
  std::sort(g.begin(), g.end());
  std::vector<double> out;
  for (double x : g)
    if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, std::abs(x)))
      out.push_back(x);
  return out;
}

// F applied to a functional pair, sampled on grid.
inline GridStrategy apply_F(const StrategyPair& pair, const std::vector<double>& grid, const ProblemParams& p,
                            const QuadratureRule& rule)
{
  p.validate();
  const double k2 = p.k * p.k, s2 = p.sigma * p.sigma;
  GridStrategy out{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double g = pair.gamma1bar(grid[i]);
    double e1 = gaussian_expectation(rule, 0.0, p.sigma, [&](double v) { return g - pair.gamma2(g + v); });
    double e2 = gaussian_expectation(rule, 0.0, p.sigma, [&](double v) {
      double d = g - pair.gamma2(g + v);
      return v * d * d;
    });
    out.values1[i] = grid[i] - (e1 + e2 / (2.0 * s2)) / k2;
  }
  auto cm = bayes_gamma2(p, pair.gamma1bar, rule);
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.values2[i] = cm(grid[i]);
  return out;
}

inline GridStrategy apply_F(const GridStrategy& s, const ProblemParams& p, const QuadratureRule& rule)
{
  s.validate();
  return apply_F(to_pair(s), s.grid, p, rule);
}

inline double sup_distance(const GridStrategy& a, const GridStrategy& b)
{
  double m = 0.0;
  for (std::size_t i = 0; i < a.grid.size(); ++i)
    m = std::max({m, std::abs(a.values1[i] - b.values1[i]), std::abs(a.values2[i] - b.values2[i])});
  return m;
}

// Discrete L2 norm of (h1, h2) on the grid, composite trapezoid.
inline double l2_norm(const std::vector<double>& grid, const std::vector<double>& h1, const std::vector<double>& h2)
{
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double w = 0.5 * (grid[i + 1] - grid[i]);
    s += w * (h1[i] * h1[i] + h1[i + 1] * h1[i + 1] + h2[i] * h2[i] + h2[i + 1] * h2[i + 1]);
  }
  return std::sqrt(s);
}

struct PicardResult {
  GridStrategy strategy;
  std::vector<double> history; // sup-norm step per iteration
  bool converged = false;
  bool diverged = false;
};

inline PicardResult picard_iterate(const GridStrategy& init, const ProblemParams& p, const QuadratureRule& rule,
                                   double alpha = 0.5, int max_iter = 500, double tol = 1e-10)
{
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw PreconditionError("picard damping must lie in (0, 1]");
  init.validate();
  PicardResult r{init, {}, false, false};
  for (int it = 0; it < max_iter; ++it) {
    GridStrategy f = apply_F(r.strategy, p, rule);
    double step = 0.0;
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
      double a = alpha * (f.values1[i] - r.strategy.values1[i]);
      double b = alpha * (f.values2[i] - r.strategy.values2[i]);
      r.strategy.values1[i] += a;
      r.strategy.values2[i] += b;
      step = std::max({step, std::abs(a), std::abs(b)});
    }
    r.history.push_back(step);
    if (!std::isfinite(step) || step > 1e6) {
      r.diverged = true;
      break;
    }
    if (step < tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

// Kernel values of the operator derivative at (a, b): a is x0 for f1 and xi for
// f2, b is zeta for f1 and y1 for f2.
struct FrechetKernel {
  double d_gamma1bar_f1;
  double d_gamma2_f1;
  double d_gamma1bar_f2;
  double d_gamma2_f2;
};

// Integrands of F: f1(x0, zeta) and f2(xi, y1).
inline double f1_value(const StrategyPair& s, const ProblemParams& p, double x0, double zeta)
{
  const double s2 = p.sigma * p.sigma;
  double g = s.gamma1bar(x0), e = g - s.gamma2(zeta), d = zeta - g;
  double dens = std::exp(-d * d / (2.0 * s2)) / (std::sqrt(2.0 * std::numbers::pi) * p.sigma);
  return -(d * e * e / (2.0 * s2) + e) * dens / (p.k * p.k);
}

namespace detail {

// D(y1) = sum over prior nodes of exp(-(y1 - gamma1bar(xi))^2 / 2 s^2), and its
// derivative along a constant shift of gamma1bar.
inline void f2_denominator(const StrategyPair& s, const ProblemParams& p, const QuadratureRule& rule, double y1,
                           double& D, double& dD)
{
  PriorNodes pn = prior_nodes(p, rule);
  const double s2 = p.sigma * p.sigma;
  double norm = p.prior == Prior::Gaussian ? 1.0 / std::sqrt(std::numbers::pi) : 1.0;
  D = dD = 0.0;
  for (std::size_t i = 0; i < pn.x.size(); ++i) {
    double d = y1 - s.gamma1bar(pn.x[i]);
    double e = std::exp(pn.logw[i] - d * d / (2.0 * s2)) * norm;
    D += e;
    dD += e * d / s2;
  }
}

} // namespace detail

inline double f2_value(const StrategyPair& s, const ProblemParams& p, const QuadratureRule& rule, double xi, double y1)
{
  double D, dD;
  detail::f2_denominator(s, p, rule, y1, D, dD);
  double g = s.gamma1bar(xi), d = y1 - g;
  return g * std::exp(-d * d / (2.0 * p.sigma * p.sigma)) / D;
}

inline FrechetKernel frechet_kernel(const StrategyPair& s, const ProblemParams& p, const QuadratureRule& rule, double a,
                                    double b)
{
  const double s2 = p.sigma * p.sigma, k2 = p.k * p.k;
  FrechetKernel out{};
  {
    double g = s.gamma1bar(a), e = g - s.gamma2(b), d = b - g;
    double dens = std::exp(-d * d / (2.0 * s2)) / (std::sqrt(2.0 * std::numbers::pi) * p.sigma);
    double brace = d * e * e / (2.0 * s2) + e;
    out.d_gamma1bar_f1 = -(1.0 / k2) * ((-e * e / (2.0 * s2) + d * e / s2 + 1.0) * dens + brace * (d / s2) * dens);
    out.d_gamma2_f1 = -(1.0 / k2) * (-d * e / s2 - 1.0) * dens;
  }
  {
    double D, dD;
    detail::f2_denominator(s, p, rule, b, D, dD);
    double g = s.gamma1bar(a), d = b - g;
    double e = std::exp(-d * d / (2.0 * s2));
    out.d_gamma1bar_f2 = e / D + g * ((d / s2) * e * D - e * dD) / (D * D);
    out.d_gamma2_f2 = 0.0;
  }
  return out;
}

inline double lipschitz_estimate(const GridStrategy& s, const ProblemParams& p, const QuadratureRule& rule, int probes,
                                 std::uint64_t seed = 0, double eps = 1e-4)
{
  if (probes < 1)
    throw PreconditionError("lipschitz_estimate needs probes >= 1");
  s.validate();
  GridStrategy base = apply_F(s, p, rule);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  const std::size_t n = s.grid.size();
  double best = 0.0;
  for (int q = 0; q < probes; ++q) {
    std::vector<double> h1(n), h2(n);
    for (std::size_t i = 0; i < n; ++i) {
      h1[i] = nd(gen);
      h2[i] = nd(gen);
    }
    double hn = l2_norm(s.grid, h1, h2);
    GridStrategy t = s;
    for (std::size_t i = 0; i < n; ++i) {
      h1[i] /= hn;
      h2[i] /= hn;
      t.values1[i] += eps * h1[i];
      t.values2[i] += eps * h2[i];
    }
    GridStrategy ft = apply_F(t, p, rule);
    std::vector<double> d1(n), d2(n);
    for (std::size_t i = 0; i < n; ++i) {
      d1[i] = ft.values1[i] - base.values1[i];
      d2[i] = ft.values2[i] - base.values2[i];
    }
    best = std::max(best, l2_norm(s.grid, d1, d2) / eps);
  }
  return best;
}

} // namespace witsen
