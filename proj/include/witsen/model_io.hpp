#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "witsen/error.hpp"
#include "witsen/measure_change.hpp"

namespace witsen {

struct ModelDocument {
  FiniteTeamModel model;
  std::optional<StrategyProfile> profile;
};

namespace detail {

using nlohmann::json;

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte)
{
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Typed access with the JSON path in error messages.
class Reader {
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const
  {
    throw ConfigError(source_ + ": at " + (path.empty() ? "/" : path) + ": " + msg);
  }

  const json& field(const json& j, const std::string& path, const char* key) const
  {
    if (!j.is_object())
      fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
      fail(path, std::string("missing field \"") + key + "\"");
    return *it;
  }

  int integer(const json& j, const std::string& path) const
  {
    if (!j.is_number_integer())
      fail(path, "expected an integer");
    return j.get<int>();
  }

  double number(const json& j, const std::string& path) const
  {
    if (!j.is_number())
      fail(path, "expected a number");
    return j.get<double>();
  }

  std::vector<int> ints(const json& j, const std::string& path) const
  {
    if (!j.is_array())
      fail(path, "expected an array of integers");
    std::vector<int> v;
    for (std::size_t i = 0; i < j.size(); ++i)
      v.push_back(integer(j[i], path + "/" + std::to_string(i)));
    return v;
  }

  std::vector<double> numbers(const json& j, const std::string& path) const
  {
    if (!j.is_array())
      fail(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i)
      v.push_back(number(j[i], path + "/" + std::to_string(i)));
    return v;
  }

  std::vector<std::vector<double>> matrix(const json& j, const std::string& path) const
  {
    if (!j.is_array())
      fail(path, "expected an array of rows");
    std::vector<std::vector<double>> v;
    for (std::size_t i = 0; i < j.size(); ++i)
      v.push_back(numbers(j[i], path + "/" + std::to_string(i)));
    return v;
  }

  std::vector<std::pair<int, int>> index_pairs(const json& j, const std::string& path) const
  {
    if (!j.is_array())
      fail(path, "expected an array of [step, index] pairs");
    std::vector<std::pair<int, int>> v;
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto p = ints(j[i], path + "/" + std::to_string(i));
      if (p.size() != 2)
        fail(path + "/" + std::to_string(i), "expected [step, index]");
      v.push_back({p[0], p[1]});
    }
    return v;
  }

private:
  std::string source_;
};

} // namespace detail

inline ModelDocument parse_model(const std::string& text, const std::string& source = "<model>")
{
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = detail::line_col(text, e.byte);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": syntax error: " + e.what());
  }

  detail::Reader rd(source);
  ModelDocument out;
  auto& m = out.model;
  m.horizon = rd.integer(rd.field(doc, "", "horizon"), "/horizon");
  m.stations = rd.integer(rd.field(doc, "", "stations"), "/stations");
  m.posts = rd.integer(rd.field(doc, "", "posts"), "/posts");
  m.initial = rd.numbers(rd.field(doc, "", "initial"), "/initial");
  m.terminal_cost = rd.numbers(rd.field(doc, "", "terminal_cost"), "/terminal_cost");
  const auto& steps = rd.field(doc, "", "steps");
  if (!steps.is_array())
    rd.fail("/steps", "expected an array");
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const std::string at = "/steps/" + std::to_string(t);
    const auto& js = steps[t];
    TimeStep s;
    s.states = rd.integer(rd.field(js, at, "states"), at + "/states");
    s.actions = rd.ints(rd.field(js, at, "actions"), at + "/actions");
    s.observations = rd.ints(rd.field(js, at, "observations"), at + "/observations");
    if (t > 0) {
      s.transition = rd.matrix(rd.field(js, at, "transition"), at + "/transition");
      s.state_reference = rd.numbers(rd.field(js, at, "state_reference"), at + "/state_reference");
    }
    const auto& ok = rd.field(js, at, "observation_kernel");
    if (!ok.is_array())
      rd.fail(at + "/observation_kernel", "expected one table per post");
    for (std::size_t j = 0; j < ok.size(); ++j)
      s.observation_kernel.push_back(rd.matrix(ok[j], at + "/observation_kernel/" + std::to_string(j)));
    s.observation_reference = rd.matrix(rd.field(js, at, "observation_reference"), at + "/observation_reference");
    if (js.contains("stage_cost"))
      s.stage_cost = rd.matrix(js["stage_cost"], at + "/stage_cost");
    const auto& info = rd.field(js, at, "information");
    if (!info.is_array())
      rd.fail(at + "/information", "expected one pattern per station");
    for (std::size_t k = 0; k < info.size(); ++k) {
      const std::string ik = at + "/information/" + std::to_string(k);
      InfoPattern ip;
      if (info[k].contains("observations"))
        ip.observations = rd.index_pairs(info[k]["observations"], ik + "/observations");
      if (info[k].contains("actions"))
        ip.actions = rd.index_pairs(info[k]["actions"], ik + "/actions");
      s.information.push_back(std::move(ip));
    }
    m.steps.push_back(std::move(s));
  }
  try {
    check_structure(m);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }

  if (doc.contains("profile")) {
    const auto& jp = doc["profile"];
    StrategyProfile p;
    if (!jp.is_array())
      rd.fail("/profile", "expected one entry per station");
    for (std::size_t k = 0; k < jp.size(); ++k) {
      const std::string pk = "/profile/" + std::to_string(k);
      if (!jp[k].is_array())
        rd.fail(pk, "expected one table per step");
      std::vector<std::vector<int>> tables;
      for (std::size_t t = 0; t < jp[k].size(); ++t)
        tables.push_back(rd.ints(jp[k][t], pk + "/" + std::to_string(t)));
      p.table.push_back(std::move(tables));
    }
    try {
      check_profile(m, p);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ": " + e.what());
    }
    out.profile = std::move(p);
  }
  return out;
}

inline ModelDocument load_model(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

inline nlohmann::json model_to_json(const FiniteTeamModel& m, const StrategyProfile* profile = nullptr)
{
  using nlohmann::json;
  json j;
  j["horizon"] = m.horizon;
  j["stations"] = m.stations;
  j["posts"] = m.posts;
  j["initial"] = m.initial;
  j["terminal_cost"] = m.terminal_cost;
  j["steps"] = json::array();
  for (std::size_t t = 0; t < m.steps.size(); ++t) {
    const auto& s = m.steps[t];
    json js;
    js["states"] = s.states;
    js["actions"] = s.actions;
    js["observations"] = s.observations;
    if (t > 0) {
      js["transition"] = s.transition;
      js["state_reference"] = s.state_reference;
    }
    js["observation_kernel"] = s.observation_kernel;
    js["observation_reference"] = s.observation_reference;
    if (!s.stage_cost.empty())
      js["stage_cost"] = s.stage_cost;
    js["information"] = json::array();
    for (const auto& ip : s.information) {
      json a = json::array(), b = json::array();
      for (auto [tau, i] : ip.observations)
        a.push_back({tau, i});
      for (auto [tau, i] : ip.actions)
        b.push_back({tau, i});
      js["information"].push_back({{"observations", a}, {"actions", b}});
    }
    j["steps"].push_back(js);
  }
  if (profile)
    j["profile"] = profile->table;
  return j;
}

} // namespace witsen
