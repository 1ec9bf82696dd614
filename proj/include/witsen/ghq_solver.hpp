#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "witsen/counterexample.hpp"
#include "witsen/error.hpp"
#include "witsen/levenberg_marquardt.hpp"
#include "witsen/numeric.hpp"
#include "witsen/quadrature.hpp"

namespace witsen {

struct SignalingLevels {
  std::vector<double> levels;
  int rule_order = 0;
  ProblemParams params;
};

enum class InitKind { Affine, Quantizer, User, Auto };

inline const char* init_name(InitKind k)
{
  switch (k) {
  case InitKind::Affine:
    return "affine";
  case InitKind::Quantizer:
    return "quantizer";
  case InitKind::User:
    return "user";
  case InitKind::Auto:
    break;
  }
  return "auto";
}

struct InitTag {
  InitKind kind = InitKind::Auto;
  std::vector<double> values;   // User only
  double quantizer_scale = 1.0; // Quantizer: s_l = scale * x_{0l}

  InitTag(InitKind k = InitKind::Auto, std::vector<double> v = {}, double scale = 1.0)
      : kind(k), values(std::move(v)), quantizer_scale(scale)
  {
  }
};

struct SolveReport {
  SignalingLevels levels;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  InitTag init;
};

// Collocation points x_{0l} = sqrt(2) sigma_x z_l.
inline std::vector<double> collocation_points(const ProblemParams& p, const QuadratureRule& rule)
{
  std::vector<double> x(rule.order);
  const double c = std::numbers::sqrt2 * p.sigma_x;
  for (int i = 0; i < rule.order; ++i)
    x[i] = c * rule.nodes[i];
  return x;
}

// Pointwise pieces of the collocated equations for a fixed level vector.
class CollocationKernel {
public:
  CollocationKernel(std::vector<double> levels, const ProblemParams& p, const QuadratureRule& rule)
      : s_(std::move(levels)), p_(p), rule_(rule)
  {
    if (static_cast<int>(s_.size()) != rule_.order)
      throw PreconditionError("level count " + std::to_string(s_.size()) + " != rule order " +
                              std::to_string(rule_.order));
    for (double v : s_)
      if (!std::isfinite(v))
        throw PreconditionError("signaling levels must be finite");
    logw_.resize(rule_.order);
    for (int i = 0; i < rule_.order; ++i)
      logw_[i] = std::log(rule_.weights[i]);
    c_ = std::numbers::sqrt2 * p_.sigma;
    pref_ = 1.0 / (std::sqrt(std::numbers::pi) * p_.k * p_.k);
  }

  const std::vector<double>& levels() const { return s_; }
  const ProblemParams& params() const { return p_; }
  const QuadratureRule& rule() const { return rule_; }

  double gamma2(double y) const { return posterior_mean(s_, logw_, p_.sigma, y); }

  // Phi(g): g + Phi(g) = x0 is the collocated stationarity equation for gamma1bar(x0) = g.
  double phi(double g) const
  {
    const int n = rule_.order;
    double sum = mirrored_sum(n, [&](int i) {
      double z = rule_.nodes[i];
      double d = g - gamma2(g + c_ * z);
      return rule_.weights[i] * ((z / c_) * d * d + d);
    });
    return pref_ * sum;
  }

  double psi(double g) const { return g + phi(g); }

  // E_v (g - gamma2(g + v))^2 with the rule
  double stage2_given(double g) const
  {
    const int n = rule_.order;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = g - gamma2(g + c_ * rule_.nodes[i]);
      sum += rule_.weights[i] * d * d;
    }
    return sum / std::sqrt(std::numbers::pi);
  }

  // Conditional cost whose stationary points are the roots of psi(g) = x0.
  double conditional_cost(double g, double x0) const
  {
    double u = g - x0;
    return p_.k * p_.k * u * u + stage2_given(g);
  }

  // psi and stage2_given sharing the gamma2 evaluations
  void psi_and_stage2(double g, double& psi_out, double& v_out) const
  {
    const int n = rule_.order;
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n; ++i) {
      double z = rule_.nodes[i];
      double d = g - gamma2(g + c_ * z);
      a += rule_.weights[i] * ((z / c_) * d * d + d);
      b += rule_.weights[i] * d * d;
    }
    psi_out = g + pref_ * a;
    v_out = b / std::sqrt(std::numbers::pi);
  }

private:
  std::vector<double> s_;
  ProblemParams p_;
  QuadratureRule rule_;
  std::vector<double> logw_;
  double c_ = 0.0;
  double pref_ = 0.0;
};

inline std::vector<double> residual_system(const SignalingLevels& lv, const ProblemParams& p, const QuadratureRule& rule)
{
  p.validate();
  if (static_cast<int>(lv.levels.size()) != rule.order)
    throw PreconditionError("rule order must equal the number of levels");
  CollocationKernel ker(lv.levels, p, rule);
  auto x0 = collocation_points(p, rule);
  std::vector<double> r(rule.order);
  for (int l = 0; l < rule.order; ++l)
    r[l] = (lv.levels[l] - x0[l]) + ker.phi(lv.levels[l]);
  return r;
}

inline double euclidean_norm(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return std::sqrt(s);
}

// gamma1bar for a fixed level vector. Candidates are the upward crossings of
// psi(g) = x0 (local minima of the conditional cost); the one with least
// conditional cost is returned. psi is tabulated once and split into
// increasing runs so each query costs one bracketed refinement.
class CollocationStrategy {
public:
  CollocationStrategy(std::vector<double> levels, const ProblemParams& p, const QuadratureRule& rule)
      : ker_(std::move(levels), p, rule)
  {
    p.validate();
    const auto& s = ker_.levels();
    double reach = 0.0;
    for (double v : s)
      reach = std::max(reach, std::abs(v));
    for (double v : collocation_points(p, rule))
      reach = std::max(reach, std::abs(v));
    reach = std::max(reach, (p.prior == Prior::Gaussian ? 8.0 : 1.0) * p.sigma_x);
    const double w = reach + 10.0 * p.sigma + 1.0;
    double h = std::min(p.sigma, p.sigma_x) / 25.0;
    long npts = static_cast<long>(std::ceil(2.0 * w / h)) + 1;
    npts = std::clamp(npts, 2001L, 400001L);
    if (npts % 2 == 0)
      ++npts;
    g_ = linspace(-w, w, static_cast<int>(npts));
    psi_.resize(g_.size());
    v_.resize(g_.size());
    for (std::size_t i = 0; i < g_.size(); ++i) {
      ker_.psi_and_stage2(g_[i], psi_[i], v_[i]);
      if (!std::isfinite(psi_[i]))
        throw NumericError("psi non-finite at g = " + std::to_string(g_[i]));
    }
    std::size_t b = 0;
    for (std::size_t i = 1; i <= g_.size(); ++i) {
      if (i == g_.size() || !(psi_[i] > psi_[i - 1])) {
        if (i - 1 > b)
          runs_.push_back({b, i - 1});
        b = i;
      }
    }
    if (runs_.empty())
      throw NumericError("psi has no increasing branch on [" + std::to_string(-w) + ", " + std::to_string(w) + "]");
  }

  const CollocationKernel& kernel() const { return ker_; }
  const std::vector<double>& levels() const { return ker_.levels(); }

  double gamma2(double y) const { return ker_.gamma2(y); }

  double gamma1bar(double x0) const
  {
    Candidate c = select(x0);
    return refine(c, x0);
  }

  // Index of the selected increasing branch (runs ordered by g).
  int branch(double x0) const { return select(x0).run; }

  // Points where the selected branch changes, located to ~1e-12 relative by bisection.
  std::vector<double> breakpoints(double lo, double hi, int scan = 4001) const
  {
    std::vector<double> out;
    auto xs = linspace(lo, hi, scan);
    int prev = branch(xs[0]);
    for (int i = 1; i < scan; ++i) {
      int cur = branch(xs[i]);
      if (cur != prev) {
        double a = xs[i - 1], b = xs[i];
        for (int it = 0; it < 100 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
          double m = 0.5 * (a + b);
          if (branch(m) == prev)
            a = m;
          else
            b = m;
        }
        out.push_back(0.5 * (a + b));
        prev = cur;
      }
    }
    return out;
  }

private:
  struct Run {
    std::size_t b, e;
  };
  struct Candidate {
    int run = -1;
    // bracket [a, b] with psi(a) <= x0 <= psi(b)
    double a = 0, b = 0, fa = 0, fb = 0;
  };

  Candidate select(double x0) const
  {
    Candidate best;
    double best_cost = std::numeric_limits<double>::infinity();
    const std::size_t last = g_.size() - 1;
    for (std::size_t r = 0; r < runs_.size(); ++r) {
      const Run& run = runs_[r];
      Candidate c;
      c.run = static_cast<int>(r);
      double gapprox, cost;
      if (psi_[run.b] <= x0 && x0 <= psi_[run.e]) {
        auto first = psi_.begin() + run.b, end = psi_.begin() + run.e + 1;
        std::size_t j = static_cast<std::size_t>(std::upper_bound(first, end, x0) - psi_.begin());
        if (j > run.e)
          j = run.e;
        if (j == run.b)
          j = run.b + 1;
        c.a = g_[j - 1];
        c.b = g_[j];
        c.fa = psi_[j - 1] - x0;
        c.fb = psi_[j] - x0;
        double t = c.fb == c.fa ? 0.0 : -c.fa / (c.fb - c.fa);
        gapprox = c.a + t * (c.b - c.a);
        double vapprox = v_[j - 1] + t * (v_[j] - v_[j - 1]);
        cost = p().k * p().k * (gapprox - x0) * (gapprox - x0) + vapprox;
      } else if (run.e == last && x0 > psi_[run.e]) {
        if (!extend(c, x0, +1))
          continue;
        gapprox = 0.5 * (c.a + c.b);
        cost = ker_.conditional_cost(gapprox, x0);
      } else if (run.b == 0 && x0 < psi_[run.b]) {
        if (!extend(c, x0, -1))
          continue;
        gapprox = 0.5 * (c.a + c.b);
        cost = ker_.conditional_cost(gapprox, x0);
      } else {
        continue;
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = c;
      }
    }
    if (best.run < 0)
      throw NumericError("no sign change of psi(g) - x0 for x0 = " + std::to_string(x0) + " on window [" +
                         std::to_string(g_.front()) + ", " + std::to_string(g_.back()) + "]");
    return best;
  }

  // Bracket a root beyond the tabulated window by doubling.
  bool extend(Candidate& c, double x0, int dir) const
  {
    double edge = dir > 0 ? g_.back() : g_.front();
    double fe = (dir > 0 ? psi_.back() : psi_.front()) - x0;
    double step = std::max(1.0, std::abs(edge));
    for (int it = 0; it < 60; ++it) {
      double far = edge + dir * step;
      double ff = ker_.psi(far) - x0;
      if ((ff > 0) != (fe > 0) || ff == 0.0) {
        if (dir > 0) {
          c.a = edge, c.b = far, c.fa = fe, c.fb = ff;
        } else {
          c.a = far, c.b = edge, c.fa = ff, c.fb = fe;
        }
        return true;
      }
      edge = far;
      fe = ff;
      step *= 2.0;
    }
    return false;
  }

  double refine(const Candidate& c, double x0) const
  {
    return bracketed_root([&](double g) { return ker_.psi(g) - x0; }, c.a, c.b, c.fa, c.fb);
  }

  const ProblemParams& p() const { return ker_.params(); }

  CollocationKernel ker_;
  std::vector<double> g_, psi_, v_;
  std::vector<Run> runs_;
};

inline double eval_gamma1bar(double x0, const SignalingLevels& lv, const ProblemParams& p, const QuadratureRule& rule)
{
  return CollocationStrategy(lv.levels, p, rule).gamma1bar(x0);
}

inline double eval_gamma2(double y1, const SignalingLevels& lv, const ProblemParams& p, const QuadratureRule& rule)
{
  return CollocationKernel(lv.levels, p, rule).gamma2(y1);
}

// Pair for an arbitrary level vector (converged or not).
inline StrategyPair collocation_pair(const std::vector<double>& levels, const ProblemParams& p,
                                     const QuadratureRule& rule)
{
  auto cs = std::make_shared<const CollocationStrategy>(levels, p, rule);
  StrategyPair pair;
  pair.gamma1bar = [cs](double x) { return cs->gamma1bar(x); };
  pair.gamma2 = [cs](double y) { return cs->gamma2(y); };
  pair.rep = CollocationTag{levels};
  if (p.prior == Prior::Gaussian)
    pair.breakpoints = cs->breakpoints(-12.0 * p.sigma_x, 12.0 * p.sigma_x);
  return pair;
}

inline StrategyPair solved_pair(const SolveReport& report, const QuadratureRule& rule)
{
  if (!report.converged)
    throw ConfigError("solved_pair requires a converged report (residual " + std::to_string(report.residual_norm) +
                      ")");
  return collocation_pair(report.levels.levels, report.levels.params, rule);
}

inline std::vector<double> initial_levels(const ProblemParams& p, const QuadratureRule& rule, const InitTag& init)
{
  auto x0 = collocation_points(p, rule);
  std::vector<double> s(rule.order);
  switch (init.kind) {
  case InitKind::Affine: {
    double lambda = std::get<AffineTag>(affine_optimal(p).rep).lambda;
    for (int i = 0; i < rule.order; ++i)
      s[i] = lambda * x0[i];
    break;
  }
  case InitKind::Quantizer:
    for (int i = 0; i < rule.order; ++i)
      s[i] = init.quantizer_scale * x0[i];
    break;
  case InitKind::User:
    if (static_cast<int>(init.values.size()) != rule.order)
      throw ConfigError("user init needs " + std::to_string(rule.order) + " values, got " +
                        std::to_string(init.values.size()));
    s = init.values;
    break;
  case InitKind::Auto:
    throw PreconditionError("initial_levels: Auto is not a single start");
  }
  return s;
}

// Quadrature payoff used to rank multi-start solutions.
inline double collocation_payoff(const std::vector<double>& levels, const ProblemParams& p, const QuadratureRule& rule)
{
  auto pair = collocation_pair(levels, p, rule);
  auto inner = build_hermite_rule(40);
  return payoff_quadrature(p, pair, build_hermite_rule(std::max(rule.order, 7)), inner).total;
}

inline SolveReport solve_signaling_levels(const ProblemParams& p, const QuadratureRule& rule, const InitTag& init,
                                          double tol = 1e-12, LmOptions opt = {})
{
  p.validate();
  if (!(tol > 0))
    throw ConfigError("tol must be positive");
  if (p.prior != Prior::Gaussian)
    throw ConfigError("the collocation solver requires the Gaussian prior");

  if (init.kind == InitKind::Auto) {
    InitTag a{InitKind::Affine, {}, init.quantizer_scale};
    InitTag q{InitKind::Quantizer, {}, init.quantizer_scale};
    SolveReport ra = solve_signaling_levels(p, rule, a, tol, opt);
    SolveReport rq = solve_signaling_levels(p, rule, q, tol, opt);
    if (ra.converged != rq.converged)
      return ra.converged ? ra : rq;
    if (!ra.converged)
      return ra.residual_norm <= rq.residual_norm ? ra : rq;
    double ja = collocation_payoff(ra.levels.levels, p, rule);
    double jq = collocation_payoff(rq.levels.levels, p, rule);
    return jq < ja ? rq : ra;
  }

  auto s0 = initial_levels(p, rule, init);
  auto f = [&](const Eigen::VectorXd& x) {
    SignalingLevels lv{std::vector<double>(x.data(), x.data() + x.size()), rule.order, p};
    auto r = residual_system(lv, p, rule);
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
  };
  opt.tol = tol;
  auto res = levenberg_marquardt(f, Eigen::Map<Eigen::VectorXd>(s0.data(), static_cast<Eigen::Index>(s0.size())), opt);

  SolveReport out;
  out.levels = {std::vector<double>(res.x.data(), res.x.data() + res.x.size()), rule.order, p};
  out.residual_norm = euclidean_norm(residual_system(out.levels, p, rule));
  out.iterations = res.iterations;
  out.converged = out.residual_norm <= tol;
  out.init = init;
  return out;
}

} // namespace witsen
