#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "witsen/measure_change.hpp"

using namespace witsen;

namespace {

// Horizon n, |X|=sx, one station with `acts` actions, one post with sy outcomes,
// every kernel and reference uniform. Station reads every past observation.
FiniteTeamModel uniform_model(int n, int sx, int sy, int acts = 1)
{
  FiniteTeamModel m;
  m.horizon = n;
  m.stations = 1;
  m.posts = 1;
  m.initial.assign(sx, 1.0 / sx);
  for (int t = 0; t < n; ++t) {
    TimeStep s;
    s.states = sx;
    s.actions = {acts};
    s.observations = {sy};
    if (t > 0) {
      s.transition.assign(sx * acts, std::vector<double>(sx, 1.0 / sx));
      s.state_reference.assign(sx, 1.0 / sx);
    }
    s.observation_kernel = {std::vector<std::vector<double>>(sx * acts, std::vector<double>(sy, 1.0 / sy))};
    s.observation_reference = {std::vector<double>(sy, 1.0 / sy)};
    if (t < n - 1)
      s.stage_cost.assign(sx, std::vector<double>(acts, 0.0));
    InfoPattern ip;
    for (int tau = 0; tau < t; ++tau)
      ip.observations.push_back({tau, 0});
    s.information = {ip};
    m.steps.push_back(s);
  }
  m.terminal_cost.assign(sx, 0.0);
  return m;
}

// Two steps, two states, two observations, one station with two actions that
// reads y_0. Numbers chosen by hand.
FiniteTeamModel hand_model()
{
  FiniteTeamModel m = uniform_model(2, 2, 2, 2);
  m.initial = {0.3, 0.7};
  m.steps[0].observation_kernel[0] = {{0.9, 0.1}, {0.6, 0.4}, {0.2, 0.8}, {0.5, 0.5}};
  m.steps[0].observation_reference[0] = {0.4, 0.6};
  m.steps[0].stage_cost = {{1.0, 2.0}, {0.5, 3.0}};
  m.steps[1].transition = {{0.8, 0.2}, {0.1, 0.9}, {0.35, 0.65}, {0.7, 0.3}};
  m.steps[1].state_reference = {0.25, 0.75};
  m.steps[1].observation_kernel[0] = {{0.3, 0.7}, {0.45, 0.55}, {0.15, 0.85}, {0.6, 0.4}};
  m.steps[1].observation_reference[0] = {0.5, 0.5};
  m.terminal_cost = {4.0, -1.0};
  return m;
}

FiniteTeamModel two_station_one_shot(const std::vector<std::vector<double>>& cost)
{
  FiniteTeamModel m;
  m.horizon = 2;
  m.stations = 2;
  m.posts = 0;
  m.initial = {1.0};
  TimeStep s0;
  s0.states = 1;
  s0.actions = {2, 2};
  s0.stage_cost = cost;
  s0.information = {InfoPattern{}, InfoPattern{}};
  TimeStep s1;
  s1.states = 1;
  s1.actions = {1, 1};
  s1.transition.assign(4, {1.0});
  s1.state_reference = {1.0};
  s1.information = {InfoPattern{}, InfoPattern{}};
  m.steps = {s0, s1};
  m.terminal_cost = {0.0};
  return m;
}

} // namespace

TEST(JointMeasure, SingleTrajectory)
{
  auto m = uniform_model(1, 1, 1);
  auto d = joint_measure_original(m, constant_profile(m));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].probability, 1.0);
}

TEST(JointMeasure, UniformOverSixteen)
{
  auto m = uniform_model(2, 2, 2);
  auto d = joint_measure_original(m, constant_profile(m));
  ASSERT_EQ(d.size(), 16u);
  KahanSum s;
  for (const auto& w : d) {
    EXPECT_NEAR(w.probability, 1.0 / 16.0, 1e-15);
    s.add(w.probability);
  }
  EXPECT_NEAR(s.value(), 1.0, 1e-12);
}

TEST(JointMeasure, MatchesHandEnumeration)
{
  auto m = hand_model();
  StrategyProfile p = constant_profile(m);
  p.table[0][1] = {1, 0}; // u_1 = 1 if y_0 = 0 else 0
  std::map<std::vector<int>, double> oracle;
  for (int x0 = 0; x0 < 2; ++x0)
    for (int y0 = 0; y0 < 2; ++y0)
      for (int x1 = 0; x1 < 2; ++x1)
        for (int y1 = 0; y1 < 2; ++y1) {
          int u0 = 0, u1 = y0 == 0 ? 1 : 0;
          double pr = m.initial[x0] * m.steps[0].observation_kernel[0][x0 * 2 + u0][y0] *
                      m.steps[1].transition[x0 * 2 + u0][x1] * m.steps[1].observation_kernel[0][x1 * 2 + u1][y1];
          oracle[{x0, y0, x1, y1}] = pr;
        }
  auto d = joint_measure_original(m, p);
  ASSERT_EQ(d.size(), 16u);
  for (const auto& w : d) {
    std::vector<int> key{w.path.x[0], w.path.y[0], w.path.x[1], w.path.y[1]};
    EXPECT_NEAR(w.probability, oracle.at(key), 1e-15);
  }
  // hand cost: E[l(x0,u0) + kappa(x1)]
  double j = 0;
  for (auto& [k, pr] : oracle)
    j += pr * (m.steps[0].stage_cost[k[0]][0] + m.terminal_cost[k[2]]);
  EXPECT_NEAR(expected_cost(m, p), j, 1e-14);
}

TEST(JointMeasure, ExplosionGuard)
{
  auto m = uniform_model(8, 4, 4);
  EXPECT_THROW(joint_measure_original(m, constant_profile(m)), ConfigError);
}

TEST(Rnd, IdenticalMeasuresGiveOne)
{
  auto m = uniform_model(3, 2, 3);
  for (const auto& w : joint_measure_original(m, constant_profile(m)))
    for (double th : rnd_process(m, constant_profile(m), w.path))
      EXPECT_EQ(th, 1.0);
}

TEST(Rnd, DeterministicKernelsDoublePerFactor)
{
  auto m = uniform_model(3, 2, 2);
  for (int t = 0; t < 3; ++t) {
    m.steps[t].observation_kernel[0] = {{1.0, 0.0}, {0.0, 1.0}};
    if (t > 0)
      m.steps[t].transition = {{1.0, 0.0}, {0.0, 1.0}};
  }
  auto p = constant_profile(m);
  Trajectory path{{1, 1, 1}, {1, 1, 1}, {}};
  auto th = rnd_process(m, p, path);
  // factors: Q at t=0,1,2 and S at t=1,2
  EXPECT_DOUBLE_EQ(th[0], 2.0);
  EXPECT_DOUBLE_EQ(th[1], 8.0);
  EXPECT_DOUBLE_EQ(th[2], 32.0);
}

TEST(Rnd, ZeroReferenceRejected)
{
  auto m = uniform_model(2, 2, 2);
  m.steps[1].state_reference = {1.0, 0.0};
  Trajectory path{{0, 1}, {0, 0}, {}};
  EXPECT_THROW(rnd_process(m, constant_profile(m), path), PreconditionError);
}

TEST(Martingale, IdenticalMeasuresExact)
{
  auto m = uniform_model(3, 2, 2);
  auto r = verify_martingale(m, constant_profile(m));
  EXPECT_EQ(r.max_violation(), 0.0);
  EXPECT_TRUE(r.min_theta_positive);
}

TEST(Martingale, HandModel)
{
  auto m = hand_model();
  auto r = verify_martingale(m, constant_profile(m));
  EXPECT_LE(r.max_violation(), 1e-14);
  ASSERT_EQ(r.mean_theta.size(), 2u);
}

TEST(Martingale, RandomModels)
{
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto m = random_model(seed);
    ASSERT_TRUE(stochastic_issues(m).empty()) << seed;
    auto p = random_profile(m, seed + 1000);
    auto r = verify_martingale(m, p);
    EXPECT_LE(r.max_violation(), 1e-12) << seed;
    EXPECT_TRUE(r.min_theta_positive);
    auto e = payoff_equivalence(m, p);
    EXPECT_LE(std::abs(e.difference), 1e-12) << seed;
    KahanSum s;
    for (const auto& w : joint_measure_original(m, p))
      s.add(w.probability);
    EXPECT_NEAR(s.value(), 1.0, 1e-12);
  }
}

TEST(Martingale, CorruptedKernelIsLocalised)
{
  auto m = random_model(7);
  for (auto& v : m.steps[1].transition[0])
    v *= 0.9;
  EXPECT_FALSE(stochastic_issues(m).empty());
  auto r = verify_martingale(m, constant_profile(m));
  EXPECT_GT(r.max_violation(), 0.05);
  EXPECT_EQ(r.worst_step, 1);
  EXPECT_NE(r.worst_history.find("x=(0)"), std::string::npos) << r.worst_history;
}

TEST(Payoff, IdenticalMeasures)
{
  auto m = uniform_model(2, 2, 2);
  m.steps[0].stage_cost = {{1.0}, {3.0}};
  m.terminal_cost = {2.0, 5.0};
  auto e = payoff_equivalence(m, constant_profile(m));
  EXPECT_DOUBLE_EQ(e.j_original, 2.0 + 3.5);
  EXPECT_EQ(e.difference, 0.0);
}

TEST(Payoff, ZeroCost)
{
  auto m = random_model(3);
  for (auto& s : m.steps)
    for (auto& r : s.stage_cost)
      std::fill(r.begin(), r.end(), 0.0);
  std::fill(m.terminal_cost.begin(), m.terminal_cost.end(), 0.0);
  auto e = payoff_equivalence(m, random_profile(m, 1));
  EXPECT_EQ(e.j_original, 0.0);
  EXPECT_EQ(e.j_reference, 0.0);
}

TEST(Pbp, SingleStationMatchesGlobal)
{
  auto m = hand_model();
  auto r = brute_force_pbp(m);
  EXPECT_EQ(r.pbp, r.global);
  EXPECT_EQ(r.station_counts[0], 2 * 4);
}

TEST(Pbp, ConstantCostEverythingIsPbp)
{
  auto m = two_station_one_shot({{1.0, 1.0, 1.0, 1.0}});
  auto r = brute_force_pbp(m);
  EXPECT_EQ(r.pbp.size(), 4u);
  EXPECT_EQ(r.global.size(), 4u);
}

TEST(Pbp, CoordinationGame)
{
  // cost (u0, u1): (0,0)=0, (0,1)=2, (1,0)=2, (1,1)=1 -> both diagonals PbP, only (0,0) global
  auto m = two_station_one_shot({{0.0, 2.0, 2.0, 1.0}});
  auto r = brute_force_pbp(m);
  EXPECT_EQ(r.global, (std::vector<std::int64_t>{0}));
  EXPECT_EQ(r.pbp, (std::vector<std::int64_t>{0, 3}));
  EXPECT_DOUBLE_EQ(r.global_value, 0.0);
}

TEST(Pbp, GlobalSubsetOfPbpOnRandomModels)
{
  RandomModelOptions o;
  o.posts = 1;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto m = random_model(seed, o);
    PbpResult r;
    try {
      r = brute_force_pbp(m);
    } catch (const ConfigError&) {
      continue;
    }
    std::set<std::int64_t> pbp(r.pbp.begin(), r.pbp.end());
    for (auto g : r.global)
      EXPECT_TRUE(pbp.count(g)) << seed;
  }
}

TEST(Structure, RejectsNonCausalPattern)
{
  auto m = uniform_model(2, 2, 2);
  m.steps[0].information[0].observations.push_back({0, 0});
  EXPECT_THROW(check_structure(m), ConfigError);
}

TEST(Structure, RejectsWrongProfile)
{
  auto m = uniform_model(2, 2, 2);
  auto p = constant_profile(m);
  p.table[0][1].pop_back();
  EXPECT_THROW(check_profile(m, p), ConfigError);
}
