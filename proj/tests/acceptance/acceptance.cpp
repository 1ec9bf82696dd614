// One PASS/FAIL line per acceptance criterion. `--only N` runs a single one.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "witsen/witsen.hpp"

using namespace witsen;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ProblemParams gp(double k, double sigma, double sx) { return {k, sigma, sx, Prior::Gaussian}; }

const QuadratureRule& rule7()
{
  static const QuadratureRule r = build_hermite_rule(7);
  return r;
}

PayoffBreakdown quad(const ProblemParams& p, const StrategyPair& s)
{
  static const QuadratureRule outer = build_hermite_rule(20), inner = build_hermite_rule(40);
  return payoff_quadrature(p, s, outer, inner);
}

PayoffBreakdown mc(const ProblemParams& p, const StrategyPair& s)
{
  return payoff_mc(p, s, 600000, 0);
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome c1()
{
  auto t0 = Clock::now();
  auto p = gp(1, 1, 1);
  double j = quad(p, affine_optimal(p)).total;
  double dt = seconds_since(t0);
  double err = std::abs(j - 0.418500414352474);
  return {err <= 1e-6 && dt < 1.0, fmt("J_aff=%.15f target=0.418500414352474 |err|=%.3g (tol 1e-6) time=%.3fs", j, err, dt)};
}

Outcome c2()
{
  auto p = gp(0.2, 1, 5);
  double j = quad(p, affine_optimal(p)).total;
  double err = std::abs(j - 0.958693278839234);
  return {err <= 1e-6, fmt("J_aff=%.15f target=0.958693278839234 |err|=%.3g (tol 1e-6)", j, err)};
}

Outcome c3()
{
  auto p = gp(0.2, 1, 5);
  auto w = wit_nonlinear(p);
  double jm = mc(p, w).total, jq = quad(p, w).total;
  double em = std::abs(jm - 0.403509876415911), eq = std::abs(jq - 0.403509876415911);
  return {em <= 0.01 && eq <= 1e-4,
          fmt("J_wit mc=%.6f |err|=%.3g (tol 0.01) quadrature=%.10f |err|=%.3g (tol 1e-4)", jm, em, jq, eq)};
}

Outcome c4()
{
  auto p = gp(1, 1, 1);
  auto rep = solve_signaling_levels(p, rule7(), {InitKind::Auto});
  if (!rep.converged)
    return {false, fmt("solver did not converge (residual %.3g)", rep.residual_norm)};
  auto pair = solved_pair(rep, rule7());
  auto aff = affine_optimal(p);
  double lambda = std::get<AffineTag>(aff.rep).lambda;
  double j = quad(p, pair).total, ja = quad(p, aff).total;
  double sup = 0;
  for (double x : linspace(-3, 3, 601))
    sup = std::max(sup, std::abs(pair.gamma1bar(x) - lambda * x));
  return {std::abs(j - ja) <= 1e-3 && sup < 1e-2,
          fmt("J_o=%.9f J_aff=%.9f |diff|=%.3g (tol 1e-3) sup|g1-lambda x|=%.3g (tol 1e-2)", j, ja, std::abs(j - ja), sup)};
}

Outcome c5()
{
  auto t0 = Clock::now();
  auto p = gp(0.2, 1, 5);
  auto rep = solve_signaling_levels(p, rule7(), {InitKind::Quantizer});
  std::vector<double> lv = rep.levels.levels;
  std::sort(lv.begin(), lv.end());
  const std::vector<double> target{-19.8, -12.8, -6.15, 0, 6.15, 12.8, 19.8};
  double dev = 0;
  for (std::size_t i = 0; i < lv.size(); ++i)
    dev = std::max(dev, std::abs(lv[i] - target[i]));
  if (!rep.converged)
    return {false, fmt("solver did not converge (residual %.3g)", rep.residual_norm)};
  double j = mc(p, solved_pair(rep, rule7())).total;
  double dt = seconds_since(t0);
  double ej = std::abs(j - 0.171268523376388);
  return {dev <= 0.05 && rep.residual_norm <= 1e-10 && ej <= 0.01 && dt < 60,
          fmt("levels {0,%.4f,%.4f,%.4f} max dev=%.3g (tol 0.05) residual=%.3g (tol 1e-10) J_mc=%.6f |err|=%.3g "
              "(tol 0.01) time=%.1fs",
              lv[4], lv[5], lv[6], dev, rep.residual_norm, j, ej, dt)};
}

Outcome c6()
{
  auto p = gp(0.2, 1, 5);
  const std::vector<double> s{-19.9, -13.2, -6.5, 0, 6.5, 13.2, 19.9};
  double r = euclidean_norm(residual_system({s, 7, p}, p, rule7()));
  double j = mc(p, collocation_pair(s, p, rule7())).total;
  double ej = std::abs(j - 0.166926978333592);
  return {std::abs(r - 0.7) <= 0.05 && ej <= 0.01,
          fmt("||f(s*)||=%.4f (0.7 +- 0.05) J_mc(s*)=%.6f |err|=%.3g (tol 0.01)", r, j, ej)};
}

Outcome c7()
{
  struct Set {
    ProblemParams p;
    bool linear;
    double j_aff, j_opt;
  };
  const std::vector<Set> sets{{gp(0.05, 5, 2), true, 0.0100, 0.0100},
                              {gp(0.005, 0.01, 2), false, 1.007e-4, 1.1298e-5},
                              {gp(0.05, 0.04, 2), false, 0.0100, 0.0011}};
  bool ok = true;
  std::string d;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& s = sets[i];
    auto rep = solve_signaling_levels(s.p, rule7(), {InitKind::Auto});
    if (!rep.converged) {
      ok = false;
      d += fmt("[set %zu: not converged] ", i + 1);
      continue;
    }
    auto pair = solved_pair(rep, rule7());
    double half = s.linear ? 4.0 : 5.0 * s.p.sigma_x;
    auto x = linspace(-half, half, 4001);
    std::vector<double> y;
    for (double v : x)
      y.push_back(pair.gamma1bar(v));
    auto st = detect_staircase(x, y);
    bool shape = s.linear ? st.linear : (st.staircase && st.steps == 7);
    double ja = quad(s.p, affine_optimal(s.p)).total;
    double jo = quad(s.p, pair).total;
    bool aff_ok = std::abs(ja - s.j_aff) <= 0.05 * s.j_aff;
    bool opt_ok = jo <= 1.25 * s.j_opt;
    ok = ok && shape && aff_ok && opt_ok;
    d += fmt("[set %zu: %s steps=%d rms_rel=%.3g J_aff=%.5g vs %.5g (%s) J_o=%.5g vs %.5g (%s)] ", i + 1,
             shape ? (s.linear ? "linear" : "7-step") : "shape mismatch", st.steps, st.line_rms_rel, ja, s.j_aff,
             aff_ok ? "ok" : "off", jo, s.j_opt, opt_ok ? "ok" : "off");
  }
  return {ok, d};
}

Outcome c8()
{
  bool ok = true;
  std::string d;
  for (auto p : {gp(1, 1, 1), gp(0.2, 1, 5), gp(5, 1, 1), gp(0.5, 1, 2)}) {
    auto rep = solve_signaling_levels(p, rule7(), {InitKind::Auto});
    if (!rep.converged) {
      d += fmt("[k=%g sx=%g: not converged] ", p.k, p.sigma_x);
      ok = false;
      continue;
    }
    auto r = mc(p, solved_pair(rep, rule7()));
    double bound = std::min(1.0, p.k * p.k * p.sigma_x * p.sigma_x) + 3 * r.std_error;
    ok = ok && r.total <= bound;
    d += fmt("[k=%g sx=%g: J=%.5f bound=%.5f] ", p.k, p.sigma_x, r.total, bound);
  }
  return {ok, d};
}

Outcome c9()
{
  double worst = 0;
  for (int n = 1; n <= 20; ++n) {
    auto r = build_hermite_rule(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double exact = d % 2 ? 0.0 : std::tgamma((d + 1) / 2.0);
      double got = integrate(r, [d](double x) { return std::pow(x, d); });
      double scale = 0;
      for (int i = 0; i < n; ++i)
        scale += r.weights[i] * std::pow(std::abs(r.nodes[i]), d);
      worst = std::max(worst, std::abs(got - exact) / std::max(std::abs(exact), scale));
    }
  }
  return {worst <= 1e-10, fmt("max relative error %.3g over n=1..20, degree<=2n-1 (tol 1e-10)", worst)};
}

Outcome c10()
{
  bool ok = true;
  std::string d;
  for (auto [p, init] : {std::pair{gp(1, 1, 1), InitKind::Affine}, std::pair{gp(0.2, 1, 5), InitKind::Quantizer}}) {
    auto rep = solve_signaling_levels(p, rule7(), {init});
    if (!rep.converged) {
      ok = false;
      d += "[not converged] ";
      continue;
    }
    auto pair = solved_pair(rep, rule7());
    auto x0 = collocation_points(p, rule7());
    auto r = stationarity_residual(p, pair, rule7(), x0, rep.levels.levels);
    auto bad1 = make_custom_pair([g = pair.gamma1bar](double x) { return g(x) + 0.5; }, pair.gamma2);
    auto bad2 = make_custom_pair(pair.gamma1bar, [g = pair.gamma2](double y) { return g(y) + 0.5; });
    auto r1 = stationarity_residual(p, bad1, rule7(), x0, rep.levels.levels);
    auto r2 = stationarity_residual(p, bad2, rule7(), x0, rep.levels.levels);
    double v1 = std::max(r1.max_r1(), r1.max_r2()), v2 = std::max(r2.max_r1(), r2.max_r2());
    ok = ok && r.max_r1() <= 1e-4 && r.max_r2() <= 1e-4 && v1 >= 0.1 && v2 >= 0.1;
    d += fmt("[k=%g sx=%g: r1=%.3g r2=%.3g perturbed %.3g / %.3g] ", p.k, p.sigma_x, r.max_r1(), r.max_r2(), v1, v2);
  }
  return {ok, d};
}

Outcome c11()
{
  auto p = gp(0.2, 1, 5);
  auto rep = solve_signaling_levels(p, rule7(), {InitKind::Quantizer});
  auto pair = solved_pair(rep, rule7());
  auto g = default_grid(p, rule7());
  double fp = sup_distance(apply_F(pair, g, p, rule7()), sample(pair, g));

  auto p5 = gp(5, 1, 1);
  auto g5 = default_grid(p5, rule7());
  auto pic = picard_iterate(sample(affine_optimal(p5), g5), p5, rule7(), 1.0, 200, 1e-12);
  bool mono = true;
  for (std::size_t i = 1; i < pic.history.size(); ++i)
    mono = mono && pic.history[i] < pic.history[i - 1];
  double L = lipschitz_estimate(pic.strategy, p5, rule7(), 8);
  return {fp <= 1e-6 && pic.converged && mono && L < 1,
          fmt("benchmark |F(s)-s|=%.3g (tol 1e-6); picard k=5 converged=%d iterations=%zu monotone=%d; lipschitz=%.4f",
              fp, pic.converged, pic.history.size(), mono, L)};
}

Outcome c12()
{
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(-1, 1);
  const double h = 1e-5;
  double worst = 0, f22 = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto p = gp(0.3 + std::abs(u(gen)), 0.6 + 0.5 * std::abs(u(gen)), 1 + std::abs(u(gen)));
    auto g = linspace(-6 * p.sigma_x, 6 * p.sigma_x, 121);
    double a1 = 1 + 0.3 * u(gen), b1 = 0.5 * u(gen), a2 = 0.8 + 0.2 * u(gen), b2 = 0.4 * u(gen);
    GridStrategy s{g, {}, {}};
    for (double x : g) {
      s.values1.push_back(a1 * x + b1 * std::sin(x));
      s.values2.push_back(a2 * x + b2 * std::cos(x));
    }
    double a = 2 * p.sigma_x * u(gen), b = 2 * p.sigma_x * u(gen);
    auto shifted = [&](double d1, double d2) {
      GridStrategy t = s;
      for (auto& v : t.values1)
        v += d1;
      for (auto& v : t.values2)
        v += d2;
      return to_pair(t);
    };
    auto k = frechet_kernel(to_pair(s), p, rule7(), a, b);
    auto rel = [](double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-3); };
    worst = std::max({worst,
                      rel(k.d_gamma1bar_f1, (f1_value(shifted(h, 0), p, a, b) - f1_value(shifted(-h, 0), p, a, b)) / (2 * h)),
                      rel(k.d_gamma2_f1, (f1_value(shifted(0, h), p, a, b) - f1_value(shifted(0, -h), p, a, b)) / (2 * h)),
                      rel(k.d_gamma1bar_f2, (f2_value(shifted(h, 0), p, rule7(), a, b) -
                                             f2_value(shifted(-h, 0), p, rule7(), a, b)) / (2 * h))});
    f22 = std::max(f22, std::abs(k.d_gamma2_f2));
  }
  return {worst <= 1e-5 && f22 == 0.0,
          fmt("max relative kernel/FD mismatch %.3g over 100 points (tol 1e-5); max|grad_g2 f2|=%g", worst, f22)};
}

Outcome c13()
{
  double worst_mean = 0, worst_cond = 0, worst_pay = 0;
  int pbp_instances = 0, pbp_violations = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto m = random_model(seed);
    auto p = random_profile(m, seed + 1000);
    auto r = verify_martingale(m, p);
    worst_mean = std::max(worst_mean, r.max_mean_violation);
    worst_cond = std::max(worst_cond, r.max_conditional_violation);
    worst_pay = std::max(worst_pay, std::abs(payoff_equivalence(m, p).difference));
    RandomModelOptions o;
    o.posts = 1;
    auto small = random_model(seed, o);
    try {
      auto b = brute_force_pbp(small);
      ++pbp_instances;
      std::set<std::int64_t> pbp(b.pbp.begin(), b.pbp.end());
      for (auto g : b.global)
        if (!pbp.count(g))
          ++pbp_violations;
    } catch (const ConfigError&) {
    }
  }
  return {worst_mean <= 1e-12 && worst_cond <= 1e-12 && worst_pay <= 1e-12 && pbp_violations == 0 && pbp_instances > 0,
          fmt("50 models: max|E[Theta]-1|=%.3g max conditional=%.3g max|J-J_ref|=%.3g (tol 1e-12); "
              "global not PbP in %d of %d enumerable instances",
              worst_mean, worst_cond, worst_pay, pbp_violations, pbp_instances)};
}

} // namespace

int main(int argc, char** argv)
{
  const std::vector<std::function<Outcome()>> criteria{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13};
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--only" && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion must be in 1..%zu\n", criteria.size());
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only)
      continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
