// witsen: command-line front end for the counterexample solvers and the
// finite-model measure-change verifier.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "witsen/witsen.hpp"

using nlohmann::json;
using namespace witsen;

namespace {

enum Exit { Ok = 0, NotConverged = 1, BadConfig = 2, CheckFailed = 3 };

struct Common {
  double k = 0.2, sigma = 1.0, sigma_x = 5.0;
  std::string prior = "gaussian";
  int n = 7;
  long long samples = 600000;
  unsigned long long seed = 0;
  std::string format = "json";
  std::string output;
  bool timing = false;
  int inner_order = 40;

  ProblemParams params() const
  {
    ProblemParams p{k, sigma, sigma_x, prior == "two-point" ? Prior::TwoPoint : Prior::Gaussian};
    p.validate();
    if (n < 1 || n > 64)
      throw ConfigError("--n must lie in [1, 64]");
    return p;
  }
};

struct SolveOpts {
  std::string method = "ghq";
  std::string init = "auto";
  double quantizer_scale = 1.0;
  bool no_iterate = false;
  double tol = 1e-12;
  double alpha = 0.5;
  int max_iter = 500;
};

std::string fmt17(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void add_common(CLI::App* app, Common& c)
{
  app->add_option("--k", c.k, "first-stage cost weight k");
  app->add_option("--sigma", c.sigma, "observation noise standard deviation");
  app->add_option("--sigma-x", c.sigma_x, "prior scale of x0");
  app->add_option("--prior", c.prior, "prior family")->check(CLI::IsMember({"gaussian", "two-point"}));
  app->add_option("--n", c.n, "Gauss-Hermite order");
  app->add_option("--samples", c.samples, "Monte Carlo samples");
  app->add_option("--seed", c.seed, "Monte Carlo seed");
  app->add_option("--inner-order", c.inner_order, "Hermite order of the inner noise integral");
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--output,-o", c.output, "output file (default: $WITSEN_OUTPUT_DIR/<command>.<ext> or stdout)");
  app->add_flag("--timing", c.timing, "include wall time (breaks byte-identical output)");
}

void add_solve(CLI::App* app, SolveOpts& s)
{
  app->add_option("--method", s.method, "solver")->check(CLI::IsMember({"ghq", "picard", "affine", "wit"}));
  app->add_option("--init", s.init, "auto | affine | quantizer | user:v1,v2,...");
  app->add_option("--quantizer-scale", s.quantizer_scale, "quantizer start s_l = c x_0l");
  app->add_flag("--no-iterate", s.no_iterate, "evaluate the residual at the initial levels only");
  app->add_option("--tol", s.tol, "residual tolerance");
  app->add_option("--alpha", s.alpha, "Picard damping");
  app->add_option("--max-iter", s.max_iter, "iteration cap");
}

InitTag parse_init(const SolveOpts& s)
{
  InitTag t;
  t.quantizer_scale = s.quantizer_scale;
  if (s.init == "auto")
    t.kind = InitKind::Auto;
  else if (s.init == "affine")
    t.kind = InitKind::Affine;
  else if (s.init == "quantizer")
    t.kind = InitKind::Quantizer;
  else if (s.init.rfind("user:", 0) == 0) {
    t.kind = InitKind::User;
    std::stringstream ss(s.init.substr(5));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        t.values.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("--init user: cannot parse value '" + tok + "'");
      }
    }
    std::sort(t.values.begin(), t.values.end());
  } else {
    throw ConfigError("--init must be auto, affine, quantizer or user:v1,v2,...");
  }
  return t;
}

std::pair<double, double> parse_range(const std::string& s)
{
  auto c = s.find(',');
  if (c == std::string::npos)
    throw ConfigError("range must be 'a,b', got '" + s + "'");
  double a = std::stod(s.substr(0, c)), b = std::stod(s.substr(c + 1));
  if (!(b > a))
    throw ConfigError("range must satisfy a < b");
  return {a, b};
}

json params_json(const ProblemParams& p)
{
  return {{"k", p.k}, {"sigma", p.sigma}, {"sigma_x", p.sigma_x}, {"prior", prior_name(p.prior)}};
}

json payoff_json(const PayoffBreakdown& b)
{
  json j{{"stage1", b.stage1}, {"stage2", b.stage2}, {"total", b.total}};
  if (auto* mc = std::get_if<MonteCarloEstimator>(&b.estimator)) {
    j["estimator"] = "monte_carlo";
    j["samples"] = mc->samples;
    j["seed"] = mc->seed;
    j["std_error"] = b.std_error;
  } else {
    j["estimator"] = "quadrature";
    j["order"] = std::get<QuadratureEstimator>(b.estimator).order;
  }
  return j;
}

json both_payoffs(const Common& c, const ProblemParams& p, const StrategyPair& pair)
{
  auto outer = build_hermite_rule(std::max(c.n, 20));
  auto inner = build_hermite_rule(c.inner_order);
  return {{"quadrature", payoff_json(payoff_quadrature(p, pair, outer, inner))},
          {"monte_carlo", payoff_json(payoff_mc(p, pair, c.samples, c.seed))}};
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out)
{
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_number_float()) {
    out.push_back({prefix, fmt17(j.get<double>())});
  } else if (j.is_string()) {
    out.push_back({prefix, j.get<std::string>()});
  } else {
    out.push_back({prefix, j.dump()});
  }
}

void emit(const std::string& text, const Common& c, const std::string& command)
{
  std::string path = c.output;
  if (path.empty()) {
    if (const char* dir = std::getenv("WITSEN_OUTPUT_DIR"); dir && *dir) {
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / (command + "." + c.format)).string();
    }
  }
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw ConfigError("cannot write " + path);
  out << text;
}

void emit_document(const json& doc, const Common& c, const std::string& command)
{
  if (c.format == "json") {
    emit(doc.dump(2) + "\n", c, command);
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(doc, "", rows);
  std::string s = "key,value\n";
  for (auto& [k, v] : rows)
    s += k + "," + v + "\n";
  emit(s, c, command);
}

struct Solved {
  StrategyPair pair;
  json doc;
  bool converged = true;
};

Solved run_solver(const Common& c, const SolveOpts& s)
{
  auto p = c.params();
  auto rule = build_hermite_rule(c.n);
  Solved out;
  json& doc = out.doc;
  doc["params"] = params_json(p);
  doc["method"] = s.method;
  doc["n"] = c.n;

  if (s.method == "affine" || s.method == "wit") {
    out.pair = s.method == "affine" ? affine_optimal(p) : wit_nonlinear(p);
    if (auto* a = std::get_if<AffineTag>(&out.pair.rep)) {
      doc["lambda"] = a->lambda;
      doc["mu"] = a->mu;
    }
    doc["init"] = {{"kind", "none"}};
    doc["levels"] = json::array();
    return out;
  }

  InitTag init = parse_init(s);
  doc["collocation_points"] = collocation_points(p, rule);

  if (s.method == "picard") {
    auto grid = default_grid(p, rule);
    StrategyPair start;
    if (init.kind == InitKind::Affine || init.kind == InitKind::Auto)
      start = affine_optimal(p);
    else
      start = collocation_pair(initial_levels(p, rule, init), p, rule);
    auto res = picard_iterate(sample(start, grid), p, rule, s.alpha, s.max_iter, s.tol);
    out.pair = to_pair(res.strategy);
    std::vector<double> lv;
    for (double x : collocation_points(p, rule))
      lv.push_back(out.pair.gamma1bar(x));
    doc["init"] = {{"kind", init.kind == InitKind::Auto ? "affine" : init_name(init.kind)}};
    doc["levels"] = lv;
    doc["residual_norm"] = euclidean_norm(residual_system({lv, c.n, p}, p, rule));
    doc["iterations"] = static_cast<int>(res.history.size());
    doc["converged"] = res.converged;
    doc["diverged"] = res.diverged;
    doc["step_history"] = res.history;
    out.converged = res.converged;
    return out;
  }

  SolveReport rep;
  if (s.no_iterate) {
    if (init.kind == InitKind::Auto)
      throw ConfigError("--no-iterate needs an explicit --init");
    auto s0 = initial_levels(p, rule, init);
    rep.levels = {s0, c.n, p};
    rep.residual_norm = euclidean_norm(residual_system(rep.levels, p, rule));
    rep.iterations = 0;
    rep.converged = rep.residual_norm <= s.tol;
    rep.init = init;
  } else {
    LmOptions lo;
    lo.max_iter = s.max_iter;
    rep = solve_signaling_levels(p, rule, init, s.tol, lo);
  }
  json ij{{"kind", init_name(rep.init.kind)}};
  if (rep.init.kind == InitKind::User)
    ij["values"] = rep.init.values;
  if (rep.init.kind == InitKind::Quantizer)
    ij["scale"] = rep.init.quantizer_scale;
  if (init.kind == InitKind::Auto)
    ij["requested"] = "auto";
  doc["init"] = ij;
  doc["levels"] = rep.levels.levels;
  doc["residual_norm"] = rep.residual_norm;
  doc["iterations"] = rep.iterations;
  doc["converged"] = rep.converged;
  out.converged = rep.converged || s.no_iterate;
  out.pair = collocation_pair(rep.levels.levels, p, rule);
  return out;
}

int cmd_solve(const Common& c, const SolveOpts& s, const std::string& name)
{
  auto t0 = std::chrono::steady_clock::now();
  Solved r = run_solver(c, s);
  auto p = c.params();
  r.doc["payoff"] = both_payoffs(c, p, r.pair);
  r.doc["seed"] = c.seed;
  if (c.timing)
    r.doc["timing"] = {{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  emit_document(r.doc, c, name);
  return r.converged ? Ok : NotConverged;
}

json staircase_json(const StaircaseSummary& s)
{
  json treads = json::array();
  for (const auto& t : s.treads)
    treads.push_back({{"x_begin", t.x_begin}, {"x_end", t.x_end}, {"slope", t.slope}});
  return {{"steps", s.steps},       {"staircase", s.staircase}, {"linear", s.linear},
          {"line_rms_rel", s.line_rms_rel}, {"jumps", s.jumps}, {"jump_at", s.jump_at}, {"treads", treads}};
}

int cmd_curves(const Common& c, const SolveOpts& s, const std::string& xr, const std::string& yr, int points)
{
  if (points < 3)
    throw ConfigError("--points must be >= 3");
  auto p = c.params();
  Solved r = run_solver(c, s);
  auto [xa, xb] = xr.empty() ? std::pair{-5.0 * p.sigma_x, 5.0 * p.sigma_x} : parse_range(xr);
  auto [ya, yb] = yr.empty() ? std::pair{xa, xb} : parse_range(yr);
  auto xs = linspace(xa, xb, points), ys = linspace(ya, yb, points);
  std::vector<double> g1(points), g2(points);
  for (int i = 0; i < points; ++i) {
    g1[i] = r.pair.gamma1bar(xs[i]);
    g2[i] = r.pair.gamma2(ys[i]);
  }
  auto st = detect_staircase(xs, g1);

  if (c.format == "json") {
    json doc = r.doc;
    doc["curves"] = {{"x", xs}, {"gamma1bar", g1}, {"y", ys}, {"gamma2", g2}};
    doc["staircase"] = staircase_json(st);
    emit_document(doc, c, "curves");
    return r.converged ? Ok : NotConverged;
  }
  std::string out;
  out += "# method=" + s.method + " steps=" + std::to_string(st.steps) +
         " staircase=" + (st.staircase ? "true" : "false") + " linear=" + (st.linear ? "true" : "false") +
         " line_rms_rel=" + fmt17(st.line_rms_rel) + "\n";
  out += "# tread_slopes=";
  for (std::size_t i = 0; i < st.treads.size(); ++i)
    out += (i ? ";" : "") + fmt17(st.treads[i].slope);
  out += "\n# jumps=";
  for (std::size_t i = 0; i < st.jumps.size(); ++i)
    out += (i ? ";" : "") + fmt17(st.jumps[i]);
  out += "\nx,gamma1bar,y,gamma2\n";
  for (int i = 0; i < points; ++i)
    out += fmt17(xs[i]) + "," + fmt17(g1[i]) + "," + fmt17(ys[i]) + "," + fmt17(g2[i]) + "\n";
  emit(out, c, "curves");
  return r.converged ? Ok : NotConverged;
}

int cmd_verify(const Common& c, const std::string& path, bool pbp, double tol)
{
  auto doc = load_model(path);
  const auto& m = doc.model;
  StrategyProfile prof = doc.profile ? *doc.profile : constant_profile(m);
  json out;
  out["model"] = path;
  out["tolerance"] = tol;
  out["stochastic_issues"] = stochastic_issues(m);

  auto mg = verify_martingale(m, prof);
  bool mg_ok = mg.max_violation() <= tol && mg.min_theta_positive;
  out["martingale"] = {{"mean_theta", mg.mean_theta},
                       {"max_mean_violation", mg.max_mean_violation},
                       {"max_conditional_violation", mg.max_conditional_violation},
                       {"worst_step", mg.worst_step},
                       {"worst_history", mg.worst_history},
                       {"pass", mg_ok}};

  auto pe = payoff_equivalence(m, prof);
  bool pe_ok = std::abs(pe.difference) <= tol * std::max(1.0, std::abs(pe.j_original));
  out["payoff_equivalence"] = {{"j_original", pe.j_original},
                               {"j_reference", pe.j_reference},
                               {"difference", pe.difference},
                               {"pass", pe_ok}};
  bool ok = mg_ok && pe_ok;
  if (pbp) {
    auto r = brute_force_pbp(m);
    bool incl = std::includes(r.pbp.begin(), r.pbp.end(), r.global.begin(), r.global.end());
    out["pbp"] = {{"profiles", static_cast<long long>(r.payoff.size())},
                  {"global_value", r.global_value},
                  {"global", r.global},
                  {"pbp", r.pbp},
                  {"global_subset_of_pbp", incl}};
    ok = ok && incl;
  }
  out["pass"] = ok;
  emit_document(out, c, "verify");
  return ok ? Ok : CheckFailed;
}

int cmd_generate(const Common& c, unsigned long long seed, const RandomModelOptions& o, bool corrupt)
{
  auto m = random_model(seed, o);
  auto prof = random_profile(m, seed + 1);
  if (corrupt && m.horizon > 1) {
    // scale one transition row to sum 0.9
    for (auto& v : m.steps[1].transition[0])
      v *= 0.9;
  }
  Common cc = c;
  cc.format = "json";
  emit(model_to_json(m, &prof).dump(2) + "\n", cc, "model");
  return Ok;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Witsenhausen counterexample solvers and finite measure-change verifier"};
  app.require_subcommand(1);

  Common c;
  SolveOpts s;

  auto* solve = app.add_subcommand("solve", "solve the collocation system (ghq) or iterate F (picard)");
  add_common(solve, c);
  add_solve(solve, s);

  SolveOpts bs;
  bs.method = "affine";
  auto* baseline = app.add_subcommand("baseline", "affine or sign baseline with both payoff estimators");
  add_common(baseline, c);
  baseline->add_option("--method", bs.method, "baseline")->check(CLI::IsMember({"affine", "wit"}));

  std::string xr, yr;
  int points = 401;
  auto* curves = app.add_subcommand("curves", "sample gamma1bar and gamma2 for plotting");
  add_common(curves, c);
  add_solve(curves, s);
  curves->add_option("--x-range", xr, "a,b for gamma1bar (default -5 sx,5 sx)");
  curves->add_option("--y-range", yr, "a,b for gamma2");
  curves->add_option("--points", points, "samples per curve");

  std::string model_path;
  bool pbp = false;
  double vtol = 1e-12;
  auto* verify = app.add_subcommand("verify", "check change-of-measure identities on a finite model file");
  add_common(verify, c);
  verify->add_option("--model", model_path, "model JSON file")->required();
  verify->add_flag("--pbp", pbp, "also enumerate person-by-person optimal profiles");
  verify->add_option("--tol", vtol, "tolerance for all checks");

  unsigned long long gseed = 0;
  RandomModelOptions gopt;
  bool corrupt = false;
  auto* gen = app.add_subcommand("generate-model", "write a seeded random finite model");
  gen->add_option("--seed", gseed, "generator seed");
  gen->add_option("--horizon", gopt.horizon, "time steps");
  gen->add_option("--stations", gopt.stations, "control stations");
  gen->add_option("--posts", gopt.posts, "observation posts");
  gen->add_flag("--corrupt", corrupt, "break normalisation of one transition row");
  gen->add_option("--output,-o", c.output, "output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(c, s, "solve");
    if (baseline->parsed())
      return cmd_solve(c, bs, "baseline");
    if (curves->parsed()) {
      if (curves->count("--format") == 0)
        c.format = "csv";
      return cmd_curves(c, s, xr, yr, points);
    }
    if (verify->parsed())
      return cmd_verify(c, model_path, pbp, vtol);
    if (gen->parsed())
      return cmd_generate(c, gseed, gopt, corrupt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return BadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return BadConfig;
  }
  return Ok;
}
