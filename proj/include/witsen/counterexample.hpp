#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <unsupported/Eigen/Polynomials>

#include "witsen/error.hpp"
#include "witsen/numeric.hpp"
#include "witsen/quadrature.hpp"

namespace witsen {

enum class Prior { Gaussian, TwoPoint };

inline const char* prior_name(Prior p) { return p == Prior::Gaussian ? "gaussian" : "two-point"; }

struct ProblemParams {
  double k = 0.2;
  double sigma = 1.0;
  double sigma_x = 5.0;
  Prior prior = Prior::Gaussian;

  void validate() const
  {
    if (!(k > 0 && std::isfinite(k)))
      throw ConfigError("k must be positive and finite");
    if (!(sigma > 0 && std::isfinite(sigma)))
      throw ConfigError("sigma must be positive and finite");
    if (!(sigma_x > 0 && std::isfinite(sigma_x)))
      throw ConfigError("sigma_x must be positive and finite");
  }
};

struct AffineTag {
  double lambda;
  double mu;
};
struct WitTag {};
struct CollocationTag {
  std::vector<double> levels;
};
struct GridTag {
  std::vector<double> grid, values1, values2;
};
struct CustomTag {
  std::string label;
};

using Representation = std::variant<AffineTag, WitTag, CollocationTag, GridTag, CustomTag>;

struct StrategyPair {
  std::function<double(double)> gamma1bar;
  std::function<double(double)> gamma2;
  Representation rep = CustomTag{"custom"};
  // x0 locations where gamma1bar jumps; used to split quadrature panels
  std::vector<double> breakpoints;
};

inline StrategyPair make_custom_pair(std::function<double(double)> g1, std::function<double(double)> g2,
                                     std::string label = "custom")
{
  return {std::move(g1), std::move(g2), CustomTag{std::move(label)}, {}};
}

inline StrategyPair make_affine_pair(double lambda, double mu)
{
  return {[lambda](double x) { return lambda * x; }, [mu](double y) { return mu * y; },
          AffineTag{lambda, mu}, {}};
}

struct MonteCarloEstimator {
  std::int64_t samples;
  std::uint64_t seed;
};
struct QuadratureEstimator {
  int order;
};

struct PayoffBreakdown {
  double stage1 = 0.0;
  double stage2 = 0.0;
  double total = 0.0;
  std::variant<MonteCarloEstimator, QuadratureEstimator> estimator = QuadratureEstimator{0};
  // standard error of total (Monte Carlo only, 0 otherwise)
  double std_error = 0.0;
};

// ---- affine baseline ----

// Exact cost of (lambda x0, mu y1) under the Gaussian prior.
inline double affine_cost(const ProblemParams& p, double lambda, double mu)
{
  double sx2 = p.sigma_x * p.sigma_x, s2 = p.sigma * p.sigma;
  double a = lambda - 1.0, b = 1.0 - mu;
  return p.k * p.k * sx2 * a * a + lambda * lambda * sx2 * b * b + mu * mu * s2;
}

inline double affine_mu(const ProblemParams& p, double lambda)
{
  double v = lambda * lambda * p.sigma_x * p.sigma_x;
  return v / (v + p.sigma * p.sigma);
}

inline StrategyPair affine_optimal(const ProblemParams& p)
{
  p.validate();
  if (p.prior != Prior::Gaussian)
    throw ConfigError("affine_optimal requires the Gaussian prior");
  // J(k, sx, s) = s^2 J(k, sx/s, 1): solve the unit-noise quintic with sx/s
  const double c = p.sigma_x / p.sigma;
  const double ik2 = 1.0 / (p.k * p.k);
  // (t - c)(1 + t^2)^2 + t/k^2, ascending coefficients
  Eigen::Matrix<double, 6, 1> coeff;
  coeff << -c, 1.0 + ik2, -2.0 * c, 2.0, -c, 1.0;
  Eigen::PolynomialSolver<double, 5> solver(coeff);
  std::vector<double> roots;
  for (int i = 0; i < 5; ++i) {
    auto r = solver.roots()(i);
    if (std::abs(r.imag()) <= 1e-8 * std::max(1.0, std::abs(r.real())))
      roots.push_back(r.real());
  }
  if (roots.empty())
    throw NumericError("affine quintic: no real root found");

  auto quintic = [&](double t) { return (t - c) * (1 + t * t) * (1 + t * t) + t * ik2; };
  auto dquintic = [&](double t) {
    double u = 1 + t * t;
    return u * u + 4.0 * t * (t - c) * u + ik2;
  };
  double best_l = 0.0, best_j = std::numeric_limits<double>::infinity();
  for (double t : roots) {
    for (int it = 0; it < 3; ++it) {
      double d = dquintic(t);
      if (d == 0.0)
        break;
      t -= quintic(t) / d;
    }
    double lambda = t / c;
    double j = affine_cost(p, lambda, affine_mu(p, lambda));
    if (j < best_j) {
      best_j = j;
      best_l = lambda;
    }
  }
  return make_affine_pair(best_l, affine_mu(p, best_l));
}

// ---- sign baseline ----

inline StrategyPair wit_nonlinear(const ProblemParams& p)
{
  p.validate();
  double sx = p.sigma_x, s2 = p.sigma * p.sigma;
  StrategyPair pair{[sx](double x) { return x >= 0.0 ? sx : -sx; },
                    [sx, s2](double y) { return sx * std::tanh(sx * y / s2); }, WitTag{}, {0.0}};
  return pair;
}

// ---- Radon-Nikodym density ----

inline double rnd_log_density(const ProblemParams& p, double g1, double y1)
{
  double d = y1 - g1;
  return (y1 * y1 - d * d) / (2.0 * p.sigma * p.sigma);
}

// Saturates at the largest finite double instead of overflowing.
template <class G>
double rnd_density(const ProblemParams& p, G&& gamma1bar, double x0, double y1)
{
  double l = rnd_log_density(p, gamma1bar(x0), y1);
  if (l >= std::log(std::numeric_limits<double>::max()))
    return std::numeric_limits<double>::max();
  return std::exp(l);
}

// ---- posterior mean ----

// Prior nodes and log-weights for Bayes ratios: sqrt(2) sx z_i with log(lambda_i)
// for the Gaussian prior, {-sx, +sx} with equal weights for the two-point prior.
struct PriorNodes {
  std::vector<double> x;
  std::vector<double> logw;
};

inline PriorNodes prior_nodes(const ProblemParams& p, const QuadratureRule& rule)
{
  PriorNodes out;
  if (p.prior == Prior::TwoPoint) {
    out.x = {-p.sigma_x, p.sigma_x};
    out.logw = {std::log(0.5), std::log(0.5)};
    return out;
  }
  double c = std::numbers::sqrt2 * p.sigma_x;
  for (int i = 0; i < rule.order; ++i) {
    out.x.push_back(c * rule.nodes[i]);
    out.logw.push_back(std::log(rule.weights[i]));
  }
  return out;
}

// sum_i g_i w_i(y) / sum_i w_i(y), w_i = exp(logw_i - (y - g_i)^2 / 2 s^2), in log-sum-exp form.
inline double posterior_mean(const std::vector<double>& g, const std::vector<double>& logw, double sigma,
                             double y)
{
  const int n = static_cast<int>(g.size());
  const double inv = 1.0 / (2.0 * sigma * sigma);
  auto loga = [&](int j) {
    double d = y - g[j];
    return logw[j] - d * d * inv;
  };
  double amax = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j)
    amax = std::max(amax, loga(j));
  if (!std::isfinite(amax))
    throw NumericError("posterior mean: empty mixture");
  double num = mirrored_sum(n, [&](int j) { return g[j] * std::exp(loga(j) - amax); });
  double den = mirrored_sum(n, [&](int j) { return std::exp(loga(j) - amax); });
  return num / den;
}

// E{gamma1bar(x0) | y1} evaluated with the prior rule.
template <class G>
std::function<double(double)> bayes_gamma2(const ProblemParams& p, G&& gamma1bar, const QuadratureRule& rule)
{
  PriorNodes pn = prior_nodes(p, rule);
  std::vector<double> g(pn.x.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = gamma1bar(pn.x[i]);
  double s = p.sigma;
  return [g = std::move(g), lw = std::move(pn.logw), s](double y) { return posterior_mean(g, lw, s, y); };
}

// ---- payoffs ----

inline PayoffBreakdown payoff_mc(const ProblemParams& p, const StrategyPair& pair, std::int64_t samples,
                                 std::uint64_t seed, unsigned workers = 0)
{
  p.validate();
  if (samples < 1)
    throw ConfigError("samples must be >= 1");
  constexpr std::int64_t chunk = 65536;
  const std::int64_t nchunks = (samples + chunk - 1) / chunk;

  struct Partial {
    KahanSum s1, s2, sq;
  };
  auto run_chunk = [&](std::int64_t c) {
    std::seed_seq sx{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(c), std::uint64_t{0}};
    std::seed_seq sv{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(c), std::uint64_t{1}};
    std::mt19937_64 gx(sx), gv(sv);
    std::normal_distribution<double> nx(0.0, p.sigma_x), nv(0.0, p.sigma);
    Partial out;
    std::int64_t lo = c * chunk, hi = std::min(samples, lo + chunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      double x0 = p.prior == Prior::Gaussian ? nx(gx) : ((gx() >> 63) ? p.sigma_x : -p.sigma_x);
      double v = nv(gv);
      double g = pair.gamma1bar(x0);
      double u = g - x0;
      double e = g - pair.gamma2(g + v);
      double a = p.k * p.k * u * u, b = e * e;
      out.s1.add(a);
      out.s2.add(b);
      out.sq.add((a + b) * (a + b));
    }
    return out;
  };

  std::vector<Partial> parts(nchunks);
  unsigned nw = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  if (nw <= 1 || nchunks == 1) {
    for (std::int64_t c = 0; c < nchunks; ++c)
      parts[c] = run_chunk(c);
  } else {
    for (std::int64_t base = 0; base < nchunks; base += nw) {
      std::vector<std::future<Partial>> fs;
      for (std::int64_t c = base; c < std::min<std::int64_t>(nchunks, base + nw); ++c)
        fs.push_back(std::async(std::launch::async, run_chunk, c));
      for (std::size_t j = 0; j < fs.size(); ++j)
        parts[base + j] = fs[j].get();
    }
  }

  KahanSum s1, s2, sq;
  for (auto& q : parts) {
    s1.add(q.s1.value());
    s2.add(q.s2.value());
    sq.add(q.sq.value());
  }
  double n = static_cast<double>(samples);
  PayoffBreakdown r;
  r.stage1 = s1.value() / n;
  r.stage2 = s2.value() / n;
  r.total = r.stage1 + r.stage2;
  r.estimator = MonteCarloEstimator{samples, seed};
  double var = samples > 1 ? std::max(0.0, (sq.value() / n - r.total * r.total) * n / (n - 1)) : 0.0;
  r.std_error = std::sqrt(var / n);
  return r;
}

inline PayoffBreakdown payoff_quadrature(const ProblemParams& p, const StrategyPair& pair,
                                         const QuadratureRule& outer, const QuadratureRule& inner)
{
  p.validate();
  const double k2 = p.k * p.k;
  auto stages = [&](double x0, double& a, double& b) {
    double g = pair.gamma1bar(x0);
    if (!std::isfinite(g))
      throw NumericError("gamma1bar non-finite at x0 = " + std::to_string(x0));
    a = k2 * (g - x0) * (g - x0);
    b = gaussian_expectation(inner, 0.0, p.sigma, [&](double v) {
      double e = g - pair.gamma2(g + v);
      if (!std::isfinite(e))
        throw NumericError("gamma2 non-finite at y1 = " + std::to_string(g + v));
      return e * e;
    });
  };

  KahanSum s1, s2;
  if (p.prior == Prior::TwoPoint) {
    for (double x0 : {-p.sigma_x, p.sigma_x}) {
      double a, b;
      stages(x0, a, b);
      s1.add(0.5 * a);
      s2.add(0.5 * b);
    }
  } else if (pair.breakpoints.empty()) {
    const double c = std::numbers::sqrt2 * p.sigma_x, ip = 1.0 / std::sqrt(std::numbers::pi);
    for (int i = 0; i < outer.order; ++i) {
      double a, b;
      stages(c * outer.nodes[i], a, b);
      s1.add(outer.weights[i] * ip * a);
      s2.add(outer.weights[i] * ip * b);
    }
  } else {
    // piecewise Gauss-Legendre against the Gaussian density, split at jumps
    const double lim = 12.0 * p.sigma_x, width = 0.25 * p.sigma_x;
    std::vector<double> cuts{-lim};
    for (double b : pair.breakpoints)
      if (b > -lim && b < lim)
        cuts.push_back(b);
    cuts.push_back(lim);
    std::sort(cuts.begin(), cuts.end());
    LegendreRule gl = build_legendre_rule(std::max(outer.order, 2));
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * p.sigma_x);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      double a0 = cuts[s], a1 = cuts[s + 1];
      if (a1 <= a0)
        continue;
      int panels = std::max(1, static_cast<int>(std::ceil((a1 - a0) / width)));
      double h = (a1 - a0) / panels;
      for (int q = 0; q < panels; ++q) {
        double lo = a0 + q * h, mid = lo + 0.5 * h;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
          double x0 = mid + 0.5 * h * gl.nodes[i];
          double w = 0.5 * h * gl.weights[i] * norm * std::exp(-x0 * x0 / (2.0 * p.sigma_x * p.sigma_x));
          double a, b;
          stages(x0, a, b);
          s1.add(w * a);
          s2.add(w * b);
        }
      }
    }
  }
  PayoffBreakdown r;
  r.stage1 = s1.value();
  r.stage2 = s2.value();
  r.total = r.stage1 + r.stage2;
  r.estimator = QuadratureEstimator{outer.order};
  return r;
}

// ---- stationarity ----

struct StationarityResiduals {
  std::vector<double> r1;
  std::vector<double> r2;

  double max_r1() const
  {
    double m = 0;
    for (double v : r1)
      m = std::max(m, std::abs(v));
    return m;
  }
  double max_r2() const
  {
    double m = 0;
    for (double v : r2)
      m = std::max(m, std::abs(v));
    return m;
  }
};

inline StationarityResiduals stationarity_residual(const ProblemParams& p, const StrategyPair& pair,
                                                   const QuadratureRule& rule, const std::vector<double>& x0_grid,
                                                   const std::vector<double>& y1_grid)
{
  p.validate();
  const double k2 = p.k * p.k, s2 = p.sigma * p.sigma;
  StationarityResiduals out;
  out.r1.reserve(x0_grid.size());
  for (double x0 : x0_grid) {
    double g = pair.gamma1bar(x0);
    double e1 = gaussian_expectation(rule, 0.0, p.sigma, [&](double v) { return g - pair.gamma2(g + v); });
    double e2 = gaussian_expectation(rule, 0.0, p.sigma, [&](double v) {
      double d = g - pair.gamma2(g + v);
      return v * d * d;
    });
    out.r1.push_back(g - x0 + e1 / k2 + e2 / (2.0 * k2 * s2));
  }
  auto cm = bayes_gamma2(p, pair.gamma1bar, rule);
  out.r2.reserve(y1_grid.size());
  for (double y : y1_grid)
    out.r2.push_back(pair.gamma2(y) - cm(y));
  return out;
}

} // namespace witsen
