// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include "scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include "blockdvfs/error.hpp"

namespace blockdvfs::cli {

namespace {

using nlohmann::json;

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

double json_n(const json& v) {
  if (v.is_string()) return parse_n(v.get<std::string>());
  if (!v.is_number()) throw ParseError("scenario: partition.n must be a number or \"inf\"");
  return v.get<double>();
}

}  // namespace

GovernorPolicy Scenario::policy_as(PolicyKind kind) const {
  GovernorPolicy p = policy;
  p.kind = kind;
  return p;
}

double parse_n(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "infinity") return PartitionConfig::kInfinity;
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError("n", "invalid N '" + text + "'");
  }
  return value;
}

GovernorPolicy parse_policy(const json& doc) {
  if (!doc.is_object()) throw ParseError("scenario: 'policy' must be an object");
  GovernorPolicy p;
  if (doc.contains("kind")) {
    if (!doc["kind"].is_string()) throw ParseError("scenario: policy.kind must be a string");
    p.kind = policy_kind_from_string(doc["kind"].get<std::string>());
  }
  if (doc.contains("up")) p.reactive.up_threshold = number(doc, "up", "policy");
  if (doc.contains("down")) p.reactive.down_threshold = number(doc, "down", "policy");
  if (doc.contains("period")) p.reactive.sampling_period = number(doc, "period", "policy");
  if (doc.contains("lead") && !doc["lead"].is_null()) p.lookahead_lead = number(doc, "lead", "policy");
  if (doc.contains("initial")) {
    const json& f = doc["initial"];
    if (!f.is_object()) throw ParseError("scenario: policy.initial must be an object");
    p.reactive.initial = FrequencyTriplet{f.at("cpu").get<Hz>(), f.at("gpu").get<Hz>(),
                                          f.at("mem").get<Hz>()};
  }
  validate_policy(p);
  return p;
}

ComputationGraph resolve_graph(const std::string& spec, std::uint64_t seed) {
  constexpr std::string_view kRandom = "random:";
  if (spec.rfind(kRandom, 0) == 0) {
    const std::string count = spec.substr(kRandom.size());
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
    if (ec != std::errc{} || ptr != count.data() + count.size() || n == 0) {
      throw ValidationError("graph", "bad random graph spec '" + spec + "'");
    }
    return random_graph(n, seed);
  }
  return load_graph(spec);
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir,
                        std::uint64_t seed) {
  if (!doc.is_object()) throw ParseError("scenario: top level must be an object");
  Scenario s;
  s.echo = doc;

  auto path_field = [&](const char* key) -> std::optional<std::string> {
    if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
    if (!doc[key].is_string()) throw ParseError(std::string("scenario: '") + key + "' must be a path");
    const std::string v = doc[key].get<std::string>();
    if (v.rfind("random:", 0) == 0) return v;
    return resolve(base_dir, v).string();
  };

  if (auto g = path_field("graph")) s.graph = resolve_graph(*g, seed);
  if (auto p = path_field("profile")) s.profile = load_profile(*p);
  if (doc.contains("policy")) s.policy = parse_policy(doc["policy"]);

  if (doc.contains("partition")) {
    const json& part = doc["partition"];
    if (part.contains("n")) s.partition.n_factor = json_n(part["n"]);
    if (part.contains("eps")) s.partition.similarity_eps = number(part, "eps", "partition");
    if (part.contains("budget") && !part["budget"].is_null()) {
      s.partition.latency_budget = number(part, "budget", "partition");
    }
    validate_config(s.partition);
  }
  if (doc.contains("thermal")) {
    const json& th = doc["thermal"];
    if (th.contains("t0")) s.t0 = number(th, "t0", "thermal");
    if (th.contains("limit") && !th["limit"].is_null()) {
      s.sim.throttle_limit = number(th, "limit", "thermal");
    }
  } else if (doc.contains("profile")) {
    s.t0 = s.profile.t_ambient;
  }
  if (doc.contains("sim")) {
    const json& sim = doc["sim"];
    if (sim.contains("iterations")) {
      const auto it = sim["iterations"];
      if (!it.is_number_unsigned() || it.get<std::size_t>() == 0) {
        throw ValidationError("iterations", "scenario: sim.iterations must be a positive integer");
      }
      s.sim.iterations = it.get<std::size_t>();
    }
    if (sim.contains("amortized")) s.sim.amortized = sim["amortized"].get<bool>();
  }
  if (auto t = path_field("trace")) {
    s.trace = load_trace(*t);
    validate_trace(s.graph, *s.trace);
  }
  if (doc.contains("sweep")) {
    for (const auto& v : doc["sweep"].at("n_values")) s.sweep_n.push_back(json_n(v));
  }
  if (doc.contains("compare")) {
    const json& cmp = doc["compare"];
    if (cmp.contains("policies")) {
      for (const auto& v : cmp["policies"]) {
        s.compare_policies.push_back(policy_kind_from_string(v.get<std::string>()));
      }
    }
    if (cmp.contains("baseline")) {
      s.baseline = policy_kind_from_string(cmp["baseline"].get<std::string>());
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
  try {
    return parse_scenario(doc, path.parent_path(), seed);
  } catch (const json::exception& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace blockdvfs::cli
