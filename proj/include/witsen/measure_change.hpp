#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "witsen/error.hpp"
#include "witsen/numeric.hpp"

namespace witsen {

// Variables a station may read at time t: observations (tau, m) and actions
// (tau, k) with tau < t. All indices 0-based.
struct InfoPattern {
  std::vector<std::pair<int, int>> observations;
  std::vector<std::pair<int, int>> actions;
};

struct TimeStep {
  int states = 1;
  std::vector<int> actions;      // |A_t^k| per station
  std::vector<int> observations; // |Y_t^m| per post
  // t >= 1: rows indexed by x_{t-1} * |A_{t-1}| + joint(u_{t-1}), columns x_t
  std::vector<std::vector<double>> transition;
  std::vector<double> state_reference; // Psi_t (t >= 1)
  // [m][x_t * |A_t| + joint(u_t)][y]
  std::vector<std::vector<std::vector<double>>> observation_kernel;
  std::vector<std::vector<double>> observation_reference; // [m][y]
  std::vector<std::vector<double>> stage_cost;            // [x_t][joint(u_t)], t < n-1
  std::vector<InfoPattern> information;                   // per station
};

struct FiniteTeamModel {
  int horizon = 1;
  int stations = 1;
  int posts = 1;
  std::vector<double> initial; // law of x_0, also its reference measure
  std::vector<TimeStep> steps;
  std::vector<double> terminal_cost;
};

// table[k][t][info index] -> action of station k at time t
struct StrategyProfile {
  std::vector<std::vector<std::vector<int>>> table;
};

inline int joint_action_count(const TimeStep& s)
{
  int c = 1;
  for (int a : s.actions)
    c *= a;
  return c;
}

// Row-major: station 0 most significant.
inline int joint_action(const TimeStep& s, const std::vector<int>& u)
{
  int j = 0;
  for (std::size_t k = 0; k < s.actions.size(); ++k)
    j = j * s.actions[k] + u[k];
  return j;
}

inline std::int64_t info_size(const FiniteTeamModel& m, int t, int k)
{
  std::int64_t c = 1;
  const auto& ip = m.steps[t].information[k];
  for (auto [tau, j] : ip.observations)
    c *= m.steps[tau].observations[j];
  for (auto [tau, j] : ip.actions)
    c *= m.steps[tau].actions[j];
  return c;
}

// Structural checks; throws ConfigError on shape or causality problems.
inline void check_structure(const FiniteTeamModel& m)
{
  auto fail = [](const std::string& msg) { throw ConfigError("model: " + msg); };
  if (m.horizon < 1 || m.stations < 1 || m.posts < 0)
    fail("horizon >= 1, stations >= 1, posts >= 0 required");
  if (static_cast<int>(m.steps.size()) != m.horizon)
    fail("steps length must equal horizon");
  if (static_cast<int>(m.initial.size()) != m.steps[0].states)
    fail("initial length must equal states of step 0");
  if (static_cast<int>(m.terminal_cost.size()) != m.steps.back().states)
    fail("terminal_cost length must equal states of the last step");
  for (int t = 0; t < m.horizon; ++t) {
    const auto& s = m.steps[t];
    std::string at = "step " + std::to_string(t) + ": ";
    if (s.states < 1)
      fail(at + "states >= 1");
    if (static_cast<int>(s.actions.size()) != m.stations)
      fail(at + "actions needs one size per station");
    if (static_cast<int>(s.observations.size()) != m.posts)
      fail(at + "observations needs one size per post");
    for (int a : s.actions)
      if (a < 1)
        fail(at + "action sizes >= 1");
    for (int y : s.observations)
      if (y < 1)
        fail(at + "observation sizes >= 1");
    const int ja = joint_action_count(s);
    if (t > 0) {
      const auto& prev = m.steps[t - 1];
      std::size_t rows = static_cast<std::size_t>(prev.states) * joint_action_count(prev);
      if (s.transition.size() != rows)
        fail(at + "transition needs " + std::to_string(rows) + " rows");
      for (const auto& r : s.transition)
        if (static_cast<int>(r.size()) != s.states)
          fail(at + "transition rows need " + std::to_string(s.states) + " entries");
      if (static_cast<int>(s.state_reference.size()) != s.states)
        fail(at + "state_reference length");
    }
    if (static_cast<int>(s.observation_kernel.size()) != m.posts ||
        static_cast<int>(s.observation_reference.size()) != m.posts)
      fail(at + "observation kernels/references need one entry per post");
    for (int j = 0; j < m.posts; ++j) {
      if (s.observation_kernel[j].size() != static_cast<std::size_t>(s.states) * ja)
        fail(at + "observation_kernel[" + std::to_string(j) + "] row count");
      for (const auto& r : s.observation_kernel[j])
        if (static_cast<int>(r.size()) != s.observations[j])
          fail(at + "observation_kernel[" + std::to_string(j) + "] row length");
      if (static_cast<int>(s.observation_reference[j].size()) != s.observations[j])
        fail(at + "observation_reference[" + std::to_string(j) + "] length");
    }
    if (t < m.horizon - 1) {
      if (static_cast<int>(s.stage_cost.size()) != s.states)
        fail(at + "stage_cost needs one row per state");
      for (const auto& r : s.stage_cost)
        if (static_cast<int>(r.size()) != ja)
          fail(at + "stage_cost rows need one entry per joint action");
    }
    if (static_cast<int>(s.information.size()) != m.stations)
      fail(at + "information needs one pattern per station");
    for (const auto& ip : s.information) {
      for (auto [tau, j] : ip.observations)
        if (tau < 0 || tau >= t || j < 0 || j >= m.posts)
          fail(at + "information pattern reads observation (" + std::to_string(tau) + ", " + std::to_string(j) +
               ") which is not in the past");
      for (auto [tau, j] : ip.actions)
        if (tau < 0 || tau >= t || j < 0 || j >= m.stations)
          fail(at + "information pattern reads action (" + std::to_string(tau) + ", " + std::to_string(j) +
               ") which is not in the past");
    }
  }
}

// Probabilistic checks (row sums, reference positivity). Returns human-readable issues.
inline std::vector<std::string> stochastic_issues(const FiniteTeamModel& m, double tol = 1e-12)
{
  std::vector<std::string> out;
  auto check_row = [&](const std::vector<double>& r, const std::string& where, bool positive) {
    KahanSum s;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!(r[i] >= 0.0) || (positive && !(r[i] > 0.0)))
        out.push_back(where + " entry " + std::to_string(i) + (positive ? " must be > 0" : " must be >= 0"));
      s.add(r[i]);
    }
    if (std::abs(s.value() - 1.0) > tol)
      out.push_back(where + " sums to " + std::to_string(s.value()));
  };
  check_row(m.initial, "initial", false);
  for (int t = 0; t < m.horizon; ++t) {
    const auto& s = m.steps[t];
    std::string at = "step " + std::to_string(t) + " ";
    for (std::size_t r = 0; r < s.transition.size(); ++r)
      check_row(s.transition[r], at + "transition row " + std::to_string(r), false);
    if (t > 0)
      check_row(s.state_reference, at + "state_reference", true);
    for (int j = 0; j < m.posts; ++j) {
      for (std::size_t r = 0; r < s.observation_kernel[j].size(); ++r)
        check_row(s.observation_kernel[j][r], at + "observation_kernel[" + std::to_string(j) + "] row " + std::to_string(r),
                  false);
      check_row(s.observation_reference[j], at + "observation_reference[" + std::to_string(j) + "]", true);
    }
  }
  return out;
}

inline void check_profile(const FiniteTeamModel& m, const StrategyProfile& p)
{
  if (static_cast<int>(p.table.size()) != m.stations)
    throw ConfigError("profile: need one entry per station");
  for (int k = 0; k < m.stations; ++k) {
    if (static_cast<int>(p.table[k].size()) != m.horizon)
      throw ConfigError("profile: station " + std::to_string(k) + " needs one table per step");
    for (int t = 0; t < m.horizon; ++t) {
      const auto& tb = p.table[k][t];
      if (static_cast<std::int64_t>(tb.size()) != info_size(m, t, k))
        throw ConfigError("profile: table (" + std::to_string(k) + ", " + std::to_string(t) + ") needs " +
                          std::to_string(info_size(m, t, k)) + " entries");
      for (int a : tb)
        if (a < 0 || a >= m.steps[t].actions[k])
          throw ConfigError("profile: action out of range at (" + std::to_string(k) + ", " + std::to_string(t) + ")");
    }
  }
}

inline StrategyProfile constant_profile(const FiniteTeamModel& m, int action = 0)
{
  StrategyProfile p;
  p.table.resize(m.stations);
  for (int k = 0; k < m.stations; ++k)
    for (int t = 0; t < m.horizon; ++t)
      p.table[k].push_back(std::vector<int>(static_cast<std::size_t>(info_size(m, t, k)), action));
  return p;
}

// A prefix of a trajectory: states, observations (flattened [t][m]) and per-station actions.
struct Trajectory {
  std::vector<int> x;
  std::vector<int> y;
  std::vector<std::vector<int>> u; // [t][k]
};

inline std::string describe(const Trajectory& h, int posts)
{
  std::string s = "x=(";
  for (std::size_t i = 0; i < h.x.size(); ++i)
    s += (i ? "," : "") + std::to_string(h.x[i]);
  s += ") y=(";
  for (std::size_t i = 0; i < h.y.size(); ++i)
    s += (i ? (posts && i % posts == 0 ? ";" : ",") : "") + std::to_string(h.y[i]);
  s += ") u=(";
  for (std::size_t t = 0; t < h.u.size(); ++t) {
    if (t)
      s += ";";
    for (std::size_t k = 0; k < h.u[t].size(); ++k)
      s += (k ? "," : "") + std::to_string(h.u[t][k]);
  }
  return s + ")";
}

namespace detail {

inline int profile_action(const FiniteTeamModel& m, const StrategyProfile& p, const Trajectory& h, int t, int k)
{
  const auto& ip = m.steps[t].information[k];
  std::int64_t idx = 0;
  for (auto [tau, j] : ip.observations)
    idx = idx * m.steps[tau].observations[j] + h.y[static_cast<std::size_t>(tau) * m.posts + j];
  for (auto [tau, j] : ip.actions)
    idx = idx * m.steps[tau].actions[j] + h.u[tau][j];
  return p.table[k][t][static_cast<std::size_t>(idx)];
}

inline std::int64_t trajectory_count(const FiniteTeamModel& m)
{
  double c = 1.0;
  for (const auto& s : m.steps) {
    c *= s.states;
    for (int y : s.observations)
      c *= y;
  }
  return c > 1e15 ? std::int64_t{1} << 50 : static_cast<std::int64_t>(c);
}

} // namespace detail

// Per-step factors of one time slice, given the prefix up to t-1 and (x_t, y_t).
struct StepFactors {
  double orig = 1.0; // S_t(x_t | .) * prod_m Q_t^m(y_t^m | x_t, u_t)
  double ref = 1.0;  // Psi_t(x_t) * prod_m Phi_t^m(y_t^m)
  double m_t = 1.0;  // S_t / Psi_t, 1 at t = 0
  double l_t = 1.0;  // prod_m Q / Phi
};

// Depth-first enumeration of all (x, y) trajectories with actions pinned by the
// profile. visit(t, prefix, factors, theta_t, p_orig, p_ref) is called for each
// prefix of length t+1; returning false prunes the subtree.
template <class Visit>
void enumerate_prefixes(const FiniteTeamModel& m, const StrategyProfile& p, Visit&& visit)
{
  if (detail::trajectory_count(m) > 10'000'000)
    throw ConfigError("model has more than 1e7 trajectories");
  Trajectory h;
  std::function<void(int, double, double, double)> rec = [&](int t, double theta, double po, double pr) {
    if (t == m.horizon)
      return;
    const auto& s = m.steps[t];
    std::vector<int> u(m.stations);
    for (int k = 0; k < m.stations; ++k)
      u[k] = detail::profile_action(m, p, h, t, k);
    const int ju = joint_action(s, u);
    h.u.push_back(u);
    for (int x = 0; x < s.states; ++x) {
      StepFactors f;
      if (t == 0) {
        f.orig = m.initial[x];
        f.ref = m.initial[x];
      } else {
        const auto& prev = m.steps[t - 1];
        int row = h.x.back() * joint_action_count(prev) + joint_action(prev, h.u[t - 1]);
        double sv = s.transition[row][x];
        f.orig = sv;
        f.ref = s.state_reference[x];
        f.m_t = sv / s.state_reference[x];
      }
      h.x.push_back(x);
      const std::size_t ybase = h.y.size();
      h.y.resize(ybase + m.posts, 0);
      // odometer over the M observation posts
      while (true) {
        StepFactors g = f;
        for (int j = 0; j < m.posts; ++j) {
          int y = h.y[ybase + j];
          double q = s.observation_kernel[j][static_cast<std::size_t>(x) * joint_action_count(s) + ju][y];
          double phi = s.observation_reference[j][y];
          g.orig *= q;
          g.ref *= phi;
          g.l_t *= q / phi;
        }
        double th = theta * g.l_t * g.m_t;
        if (visit(t, static_cast<const Trajectory&>(h), g, th, po * g.orig, pr * g.ref))
          rec(t + 1, th, po * g.orig, pr * g.ref);
        int j = m.posts - 1;
        for (; j >= 0; --j) {
          if (++h.y[ybase + j] < s.observations[j])
            break;
          h.y[ybase + j] = 0;
        }
        if (j < 0)
          break;
      }
      h.y.resize(ybase);
      h.x.pop_back();
    }
    h.u.pop_back();
  };
  rec(0, 1.0, 1.0, 1.0);
}

struct WeightedTrajectory {
  Trajectory path;
  double probability;
};

inline std::vector<WeightedTrajectory> joint_measure_original(const FiniteTeamModel& m, const StrategyProfile& p)
{
  check_structure(m);
  check_profile(m, p);
  std::vector<WeightedTrajectory> out;
  enumerate_prefixes(m, p, [&](int t, const Trajectory& h, const StepFactors&, double, double po, double) {
    if (t == m.horizon - 1)
      out.push_back({h, po});
    return true;
  });
  return out;
}

// Theta_t = Lambda_t M_t along one full trajectory.
inline std::vector<double> rnd_process(const FiniteTeamModel& m, const StrategyProfile& p, const Trajectory& path)
{
  check_structure(m);
  check_profile(m, p);
  if (static_cast<int>(path.x.size()) != m.horizon ||
      path.y.size() != static_cast<std::size_t>(m.horizon) * m.posts)
    throw PreconditionError("rnd_process: trajectory length must match the horizon");
  std::vector<double> theta;
  double th = 1.0;
  Trajectory h;
  for (int t = 0; t < m.horizon; ++t) {
    const auto& s = m.steps[t];
    std::vector<int> u(m.stations);
    for (int k = 0; k < m.stations; ++k)
      u[k] = detail::profile_action(m, p, h, t, k);
    const int ju = joint_action(s, u);
    int x = path.x[t];
    if (t > 0) {
      const auto& prev = m.steps[t - 1];
      if (!(s.state_reference[x] > 0))
        throw PreconditionError("zero reference mass for state " + std::to_string(x) + " at step " + std::to_string(t));
      int row = path.x[t - 1] * joint_action_count(prev) + joint_action(prev, h.u[t - 1]);
      th *= s.transition[row][x] / s.state_reference[x];
    }
    for (int j = 0; j < m.posts; ++j) {
      int y = path.y[static_cast<std::size_t>(t) * m.posts + j];
      double phi = s.observation_reference[j][y];
      if (!(phi > 0))
        throw PreconditionError("zero reference mass for observation " + std::to_string(y) + " of post " +
                                std::to_string(j) + " at step " + std::to_string(t));
      th *= s.observation_kernel[j][static_cast<std::size_t>(x) * joint_action_count(s) + ju][y] / phi;
    }
    theta.push_back(th);
    h.x.push_back(x);
    for (int j = 0; j < m.posts; ++j)
      h.y.push_back(path.y[static_cast<std::size_t>(t) * m.posts + j]);
    h.u.push_back(u);
  }
  return theta;
}

struct MartingaleReport {
  std::vector<double> mean_theta;      // E°[Theta_t] per t
  double max_mean_violation = 0.0;     // max_t |E°[Theta_t] - 1|
  double max_conditional_violation = 0.0;
  int worst_step = -1;                 // t of the worst conditional violation
  std::string worst_history;           // F_{t-1} history of the worst violation
  bool min_theta_positive = true;      // Theta_t > 0 wherever the reference mass is positive

  double max_violation() const { return std::max(max_mean_violation, max_conditional_violation); }
};

inline MartingaleReport verify_martingale(const FiniteTeamModel& m, const StrategyProfile& p)
{
  check_structure(m);
  check_profile(m, p);
  MartingaleReport rep;
  std::vector<KahanSum> mean(m.horizon);
  // conditional sums keyed by depth; the enumeration is depth-first so one
  // accumulator per depth suffices, flushed when the parent moves on
  struct Pending {
    KahanSum sum;
    double parent_theta = 1.0;
    double parent_ref = 1.0;
    Trajectory parent;
    bool open = false;
  };
  std::vector<Pending> pend(m.horizon + 1);
  auto flush = [&](int depth) {
    Pending& q = pend[depth];
    if (!q.open)
      return;
    q.open = false;
    if (!(q.parent_ref > 0))
      return;
    double v = std::abs(q.sum.value() - q.parent_theta);
    if (rep.worst_step < 0 || v > rep.max_conditional_violation) {
      rep.max_conditional_violation = v;
      rep.worst_step = depth;
      rep.worst_history = describe(q.parent, m.posts);
    }
  };

  pend[0].open = true;
  enumerate_prefixes(m, p, [&](int t, const Trajectory& h, const StepFactors& f, double theta, double, double pr) {
    mean[t].add(pr * theta);
    if (!(theta > 0) && pr > 0)
      rep.min_theta_positive = false;
    // h has length t+1; its parent history is the prefix of length t
    pend[t].sum.add(f.ref * theta);
    if (t + 1 < m.horizon) {
      flush(t + 1);
      Pending& q = pend[t + 1];
      q = Pending{};
      q.open = true;
      q.parent_theta = theta;
      q.parent_ref = pr;
      q.parent = h;
    }
    return true;
  });
  for (int d = 0; d <= m.horizon; ++d)
    flush(d);

  for (int t = 0; t < m.horizon; ++t) {
    rep.mean_theta.push_back(mean[t].value());
    rep.max_mean_violation = std::max(rep.max_mean_violation, std::abs(mean[t].value() - 1.0));
  }
  return rep;
}

struct PayoffEquivalence {
  double j_original;
  double j_reference;
  double difference;
};

inline PayoffEquivalence payoff_equivalence(const FiniteTeamModel& m, const StrategyProfile& p)
{
  check_structure(m);
  check_profile(m, p);
  KahanSum jo, jr;
  // running cost along the current prefix, indexed by depth
  std::vector<double> run(m.horizon + 1, 0.0), run_ref(m.horizon + 1, 0.0);
  enumerate_prefixes(m, p, [&](int t, const Trajectory& h, const StepFactors&, double theta, double po, double pr) {
    double c = 0.0;
    if (t < m.horizon - 1) {
      int ju = joint_action(m.steps[t], h.u[t]);
      c = m.steps[t].stage_cost[h.x[t]][ju];
    } else {
      c = m.terminal_cost[h.x[t]];
    }
    run[t + 1] = run[t] + c;
    run_ref[t + 1] = run_ref[t] + c * theta;
    if (t == m.horizon - 1) {
      jo.add(po * run[t + 1]);
      jr.add(pr * run_ref[t + 1]);
    }
    return true;
  });
  return {jo.value(), jr.value(), jo.value() - jr.value()};
}

inline double expected_cost(const FiniteTeamModel& m, const StrategyProfile& p)
{
  return payoff_equivalence(m, p).j_original;
}

// Strategy space: every deterministic lookup table. A station strategy is
// identified by a mixed-radix index over its (t, info) entries.
struct PbpResult {
  std::vector<std::int64_t> station_counts;
  std::vector<double> payoff;                        // per profile (mixed radix over stations)
  std::vector<std::int64_t> pbp;                     // profile indices
  std::vector<std::int64_t> global;                  // profile indices
  double global_value = 0.0;
};

inline std::int64_t station_strategy_count(const FiniteTeamModel& m, int k)
{
  double c = 1.0;
  for (int t = 0; t < m.horizon; ++t)
    c *= std::pow(static_cast<double>(m.steps[t].actions[k]), static_cast<double>(info_size(m, t, k)));
  return c > 1e12 ? std::int64_t{1} << 40 : static_cast<std::int64_t>(std::llround(c));
}

inline std::vector<std::vector<int>> decode_station_strategy(const FiniteTeamModel& m, int k, std::int64_t idx)
{
  std::vector<std::vector<int>> tables(m.horizon);
  for (int t = 0; t < m.horizon; ++t) {
    tables[t].resize(static_cast<std::size_t>(info_size(m, t, k)));
    for (auto& a : tables[t]) {
      a = static_cast<int>(idx % m.steps[t].actions[k]);
      idx /= m.steps[t].actions[k];
    }
  }
  return tables;
}

inline StrategyProfile decode_profile(const FiniteTeamModel& m, const std::vector<std::int64_t>& counts, std::int64_t idx)
{
  StrategyProfile p;
  p.table.resize(m.stations);
  for (int k = m.stations - 1; k >= 0; --k) {
    p.table[k] = decode_station_strategy(m, k, idx % counts[k]);
    idx /= counts[k];
  }
  return p;
}

inline PbpResult brute_force_pbp(const FiniteTeamModel& m, double tol = 1e-12)
{
  check_structure(m);
  PbpResult r;
  double total = 1.0;
  for (int k = 0; k < m.stations; ++k) {
    r.station_counts.push_back(station_strategy_count(m, k));
    total *= static_cast<double>(r.station_counts.back());
  }
  if (total > 1e6)
    throw ConfigError("strategy space has more than 1e6 profiles");
  const std::int64_t n = static_cast<std::int64_t>(total);
  r.payoff.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    r.payoff[i] = expected_cost(m, decode_profile(m, r.station_counts, i));

  r.global_value = *std::min_element(r.payoff.begin(), r.payoff.end());
  auto slack = [&](double v) { return tol * std::max(1.0, std::abs(v)); };
  for (std::int64_t i = 0; i < n; ++i)
    if (r.payoff[i] <= r.global_value + slack(r.global_value))
      r.global.push_back(i);

  // stride of station k in the mixed radix (station 0 most significant)
  std::vector<std::int64_t> stride(m.stations, 1);
  for (int k = m.stations - 2; k >= 0; --k)
    stride[k] = stride[k + 1] * r.station_counts[k + 1];
  for (std::int64_t i = 0; i < n; ++i) {
    bool ok = true;
    for (int k = 0; k < m.stations && ok; ++k) {
      std::int64_t digit = (i / stride[k]) % r.station_counts[k];
      std::int64_t base = i - digit * stride[k];
      for (std::int64_t a = 0; a < r.station_counts[k]; ++a)
        if (r.payoff[base + a * stride[k]] < r.payoff[i] - slack(r.payoff[i])) {
          ok = false;
          break;
        }
    }
    if (ok)
      r.pbp.push_back(i);
  }
  return r;
}

struct RandomModelOptions {
  int horizon = 2;
  int stations = 2;
  int posts = 2;
  int max_states = 2;
  int max_observations = 2;
  int max_actions = 2;
};

// Seeded random model: kernels with entries in [0.05, 1) normalised per row,
// random causal information patterns, costs uniform in [0, 1).
inline FiniteTeamModel random_model(std::uint64_t seed, const RandomModelOptions& o = {})
{
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.05, 1.0), cost(0.0, 1.0);
  auto size = [&](int hi) { return std::uniform_int_distribution<int>(1, hi)(gen); };
  auto dist = [&](int n) {
    std::vector<double> v(n);
    double s = 0;
    for (auto& x : v)
      s += (x = unif(gen));
    for (auto& x : v)
      x /= s;
    return v;
  };

  FiniteTeamModel m;
  m.horizon = o.horizon;
  m.stations = o.stations;
  m.posts = o.posts;
  m.steps.resize(o.horizon);
  for (int t = 0; t < o.horizon; ++t) {
    auto& s = m.steps[t];
    s.states = std::max(2, size(o.max_states));
    for (int k = 0; k < o.stations; ++k)
      s.actions.push_back(size(o.max_actions));
    for (int j = 0; j < o.posts; ++j)
      s.observations.push_back(std::max(2, size(o.max_observations)));
  }
  m.initial = dist(m.steps[0].states);
  for (int t = 0; t < o.horizon; ++t) {
    auto& s = m.steps[t];
    const int ja = joint_action_count(s);
    if (t > 0) {
      const auto& prev = m.steps[t - 1];
      for (int r = 0; r < prev.states * joint_action_count(prev); ++r)
        s.transition.push_back(dist(s.states));
      s.state_reference = dist(s.states);
    }
    for (int j = 0; j < o.posts; ++j) {
      std::vector<std::vector<double>> q;
      for (int r = 0; r < s.states * ja; ++r)
        q.push_back(dist(s.observations[j]));
      s.observation_kernel.push_back(std::move(q));
      s.observation_reference.push_back(dist(s.observations[j]));
    }
    if (t < o.horizon - 1) {
      s.stage_cost.assign(s.states, std::vector<double>(ja));
      for (auto& r : s.stage_cost)
        for (auto& c : r)
          c = cost(gen);
    }
    for (int k = 0; k < o.stations; ++k) {
      InfoPattern ip;
      for (int tau = 0; tau < t; ++tau) {
        for (int j = 0; j < o.posts; ++j)
          if (gen() & 1)
            ip.observations.push_back({tau, j});
        for (int kk = 0; kk < o.stations; ++kk)
          if (kk != k && (gen() & 1))
            ip.actions.push_back({tau, kk});
      }
      s.information.push_back(ip);
    }
  }
  m.terminal_cost.resize(m.steps.back().states);
  for (auto& c : m.terminal_cost)
    c = cost(gen);
  return m;
}

inline StrategyProfile random_profile(const FiniteTeamModel& m, std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  StrategyProfile p = constant_profile(m);
  for (int k = 0; k < m.stations; ++k)
    for (int t = 0; t < m.horizon; ++t)
      for (auto& a : p.table[k][t])
        a = std::uniform_int_distribution<int>(0, m.steps[t].actions[k] - 1)(gen);
  return p;
}

} // namespace witsen
