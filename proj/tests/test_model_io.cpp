#include <string>

#include <gtest/gtest.h>

#include "witsen/model_io.hpp"

using namespace witsen;

namespace {

std::string error_of(const std::string& text)
{
  try {
    parse_model(text, "m.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kSmall = R"({
  "horizon": 1, "stations": 1, "posts": 1,
  "initial": [0.5, 0.5], "terminal_cost": [1, 2],
  "steps": [
    {"states": 2, "actions": [1], "observations": [2],
     "observation_kernel": [[[0.5, 0.5], [0.5, 0.5]]],
     "observation_reference": [[0.5, 0.5]],
     "information": [{}]}
  ]
})";

} // namespace

TEST(ModelIo, ParsesSmallModel)
{
  auto d = parse_model(kSmall);
  EXPECT_EQ(d.model.horizon, 1);
  EXPECT_EQ(d.model.steps[0].states, 2);
  EXPECT_FALSE(d.profile.has_value());
  EXPECT_DOUBLE_EQ(expected_cost(d.model, constant_profile(d.model)), 1.5);
}

TEST(ModelIo, RoundTrip)
{
  auto m = random_model(11);
  auto p = random_profile(m, 12);
  auto d = parse_model(model_to_json(m, &p).dump());
  EXPECT_EQ(model_to_json(d.model, &*d.profile), model_to_json(m, &p));
  auto e1 = payoff_equivalence(m, p), e2 = payoff_equivalence(d.model, *d.profile);
  EXPECT_EQ(e1.j_original, e2.j_original);
}

TEST(ModelIo, SyntaxErrorHasLineAndColumn)
{
  std::string bad = "{\n  \"horizon\": 1,\n  \"stations\" 1\n}";
  auto msg = error_of(bad);
  EXPECT_EQ(msg.rfind("m.json:3:", 0), 0u) << msg;
  EXPECT_NE(msg.find("syntax error"), std::string::npos);
}

TEST(ModelIo, MissingFieldReportsPath)
{
  std::string s = kSmall;
  s.replace(s.find("\"observation_reference\""), 9, "\"obs_ref");
  auto msg = error_of(s);
  EXPECT_NE(msg.find("/steps/0"), std::string::npos) << msg;
  EXPECT_NE(msg.find("observation_reference"), std::string::npos) << msg;
}

TEST(ModelIo, WrongTypeReportsPath)
{
  std::string s = kSmall;
  s.replace(s.find("\"horizon\": 1"), 12, "\"horizon\": \"one\"");
  auto msg = error_of(s);
  EXPECT_NE(msg.find("/horizon"), std::string::npos) << msg;
}

TEST(ModelIo, NonCausalPatternRejected)
{
  auto m = random_model(2);
  auto j = model_to_json(m);
  j["steps"][0]["information"][0]["observations"] = {{0, 0}};
  auto msg = error_of(j.dump());
  EXPECT_NE(msg.find("not in the past"), std::string::npos) << msg;
}

TEST(ModelIo, BundledModels)
{
  const std::string dir = std::string(WITSEN_SOURCE_DIR) + "/models/";
  for (const char* name : {"identity.json", "random_seed1.json", "random_seed2.json"}) {
    auto d = load_model(dir + name);
    auto p = d.profile ? *d.profile : constant_profile(d.model);
    EXPECT_TRUE(stochastic_issues(d.model).empty()) << name;
    EXPECT_LE(verify_martingale(d.model, p).max_violation(), 1e-12) << name;
  }
  auto c = load_model(dir + "corrupted.json");
  EXPECT_FALSE(stochastic_issues(c.model).empty());
  EXPECT_GT(verify_martingale(c.model, constant_profile(c.model)).max_violation(), 0.05);
}

TEST(ModelIo, MissingFile)
{
  EXPECT_THROW(load_model("/nonexistent/model.json"), ConfigError);
}
