// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "blockdvfs/error.hpp"

namespace blockdvfs::cli {

namespace {

const std::vector<PolicyKind> kDefaultComparison = {
    PolicyKind::max_static, PolicyKind::reactive_default, PolicyKind::operator_level_serial,
    PolicyKind::sparse_dvfs_lookahead};

const std::vector<double> kDefaultSweep = {1, 2, 3, 5, 8, 10, 20};

// Written once, complete, via a temporary file and rename.
void write_file(const std::string& path, const std::string& text) {
  std::filesystem::path tmp(path);
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + tmp.string() + "'");
    f << text;
    if (!f.flush()) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void emit(const Request& req, std::ostream& out, const std::string& text) {
  if (req.out) write_file(*req.out, text);
  else out << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::vector<PolicyKind> requested_policies(const Request& req) {
  std::vector<PolicyKind> kinds;
  for (const auto& p : req.policies) kinds.push_back(policy_kind_from_string(p));
  return kinds;
}

}  // namespace

Scenario resolve(const Request& req) {
  Scenario s;
  if (req.scenario) s = load_scenario(*req.scenario, req.seed);
  if (req.graph) {
    s.graph = resolve_graph(*req.graph, req.seed);
    s.echo["graph"] = *req.graph;
  }
  if (req.profile) {
    s.profile = load_profile(*req.profile);
    s.echo["profile"] = *req.profile;
    if (!req.scenario) s.t0 = s.profile.t_ambient;
  }
  if (!req.scenario && !req.graph) throw ValidationError("graph", "no graph given (--graph or --scenario)");
  if (!req.scenario && !req.profile) {
    throw ValidationError("profile", "no profile given (--profile or --scenario)");
  }
  if (s.trace) validate_trace(s.graph, *s.trace);
  if (req.n.size() == 1) {
    s.partition.n_factor = parse_n(req.n.front());
    s.echo["partition"]["n"] = req.n.front();
  }
  if (req.eps) {
    s.partition.similarity_eps = *req.eps;
    s.echo["partition"]["eps"] = *req.eps;
  }
  validate_config(s.partition);
  return s;
}

void cmd_partition(const Request& req, std::ostream& out) {
  if (req.n.size() > 1) throw ValidationError("n", "partition takes a single N");
  const Scenario s = resolve(req);
  const Schedule schedule = partition(s.graph, s.profile, s.partition, s.t0);
  if (req.out) {
    write_file(*req.out, req.format == Format::csv ? schedule_to_csv(schedule)
                                                   : dump(schedule_to_json(schedule)));
  }
  out << "blocks: " << schedule.blocks.size() << '\n'
      << "operators: " << schedule.op_count() << '\n'
      << "switching_total: " << format_double(switching_totals(schedule, s.profile)) << '\n';
}

void cmd_simulate(const Request& req, std::ostream& out) {
  if (req.n.size() > 1) throw ValidationError("n", "simulate takes a single N");
  if (req.policies.size() > 1) throw ValidationError("policy", "simulate takes a single policy");
  Scenario s = resolve(req);
  if (!req.policies.empty()) s.policy.kind = policy_kind_from_string(req.policies.front());
  validate_policy(s.policy);

  std::vector<ExecutionTrace> traces;
  if (s.trace) {
    traces = simulate_samples(s.graph, s.profile, s.policy, s.partition, s.thermal(), *s.trace, s.sim);
  } else {
    traces.push_back(simulate(s.graph, s.profile, s.policy, s.partition, s.thermal(), s.sim));
  }
  if (req.format == Format::csv) {
    emit(req, out, traces_to_csv(traces));
    return;
  }
  if (!s.trace) {
    emit(req, out, dump(trace_to_json(traces.front())));
    return;
  }
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& t : traces) samples.push_back(trace_to_json(t));
  emit(req, out, dump({{"samples", std::move(samples)}}));
}

RunReport cmd_compare(const Request& req, std::ostream& out) {
  if (req.n.size() > 1) throw ValidationError("n", "compare takes a single N");
  const Scenario s = resolve(req);
  std::vector<PolicyKind> kinds = requested_policies(req);
  if (kinds.empty()) kinds = s.compare_policies;
  if (kinds.empty()) kinds = kDefaultComparison;
  PolicyKind baseline = s.baseline.value_or(PolicyKind::reactive_default);
  if (req.baseline) baseline = policy_kind_from_string(*req.baseline);
  if (std::find(kinds.begin(), kinds.end(), baseline) == kinds.end()) {
    throw ValidationError("baseline", "baseline '" + std::string(to_string(baseline)) +
                                          "' is not among the compared policies");
  }

  std::vector<ExecutionTrace> runs;
  for (PolicyKind k : kinds) {
    if (std::any_of(runs.begin(), runs.end(), [&](const auto& r) { return r.policy == to_string(k); })) {
      throw ValidationError("policy", "policy '" + std::string(to_string(k)) + "' listed twice");
    }
    runs.push_back(simulate(s.graph, s.profile, s.policy_as(k), s.partition, s.thermal(), s.sim));
  }
  RunReport report = make_report(s.echo, runs, std::string(to_string(baseline)));
  emit(req, out, req.format == Format::csv ? report_to_csv(report) : dump(report_to_json(report)));
  return report;
}

std::vector<SweepRow> cmd_sweep(const Request& req, std::ostream& out) {
  Request base = req;
  base.n.clear();
  Scenario s = resolve(base);
  if (!req.policies.empty()) {
    if (req.policies.size() > 1) throw ValidationError("policy", "sweep takes a single policy");
    s.policy.kind = policy_kind_from_string(req.policies.front());
  }
  std::vector<double> n_values;
  for (const auto& n : req.n) n_values.push_back(parse_n(n));
  if (n_values.empty()) n_values = s.sweep_n;
  if (n_values.empty()) n_values = kDefaultSweep;

  auto rows = sweep_n(s.graph, s.profile, s.policy, s.partition, s.thermal(), n_values, s.sim);
  emit(req, out, req.format == Format::csv ? sweep_to_csv(rows) : dump(sweep_to_json(rows)));
  return rows;
}

void cmd_validate(const Request& req, std::ostream& out) {
  const Scenario s = resolve(req);
  out << "graph: ok (" << s.graph.size() << " operators, " << s.graph.edges().size()
      << " edges)\n";
  out << "profile: ok (" << s.profile.name << ", " << s.profile.levels.cpu.size() << "x"
      << s.profile.levels.gpu.size() << "x" << s.profile.levels.mem.size() << " levels)\n";
  if (s.trace) out << "trace: ok (" << s.trace->size() << " samples)\n";
  if (req.scenario) out << "scenario: ok\n";
}

}  // namespace blockdvfs::cli
