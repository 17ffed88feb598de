// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "blockdvfs/error.hpp"
#include "cli/commands.hpp"

namespace bc = blockdvfs::cli;

namespace {

void add_common(CLI::App* cmd, bc::Request& req) {
  cmd->add_option("--scenario", req.scenario, "Scenario JSON file");
  cmd->add_option("--graph", req.graph, "Graph JSON file, or random:<ops>");
  cmd->add_option("--profile", req.profile, "Device profile JSON file");
  cmd->add_option("--n", req.n, "Amortization factor N (number or inf); a list for sweep")
      ->delimiter(',');
  cmd->add_option("--eps", req.eps, "Triplet similarity tolerance");
  cmd->add_option("--out", req.out, "Write data here instead of standard output");
  cmd->add_option("--format", req.format, "Output format")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, bc::Format>{{"json", bc::Format::json}, {"csv", bc::Format::csv}}));
  cmd->add_option("--seed", req.seed, "Seed for random:<ops> graphs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-level DVFS planner and simulator"};
  app.require_subcommand(1);
  bc::Request req;

  auto* partition = app.add_subcommand("partition", "Partition a graph into super-blocks");
  auto* simulate = app.add_subcommand("simulate", "Simulate one policy and emit its trace");
  auto* compare = app.add_subcommand("compare", "Run several policies against a baseline");
  auto* sweep = app.add_subcommand("sweep", "Sweep the amortization factor N");
  auto* validate = app.add_subcommand("validate", "Check graph, profile, scenario and trace");
  for (auto* cmd : {partition, simulate, compare, sweep, validate}) add_common(cmd, req);
  for (auto* cmd : {simulate, compare, sweep}) {
    cmd->add_option("--policy", req.policies, "Policy name (a list for compare)")->delimiter(',');
  }
  compare->add_option("--baseline", req.baseline, "Baseline policy for derived metrics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, std::cerr, std::cerr);
  }

  try {
    if (*partition) bc::cmd_partition(req, std::cout);
    else if (*simulate) bc::cmd_simulate(req, std::cout);
    else if (*compare) bc::cmd_compare(req, std::cout);
    else if (*sweep) bc::cmd_sweep(req, std::cout);
    else if (*validate) bc::cmd_validate(req, std::cout);
  } catch (const blockdvfs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout.flush();
  return std::cout ? 0 : 1;
}
