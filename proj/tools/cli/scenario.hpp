// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockdvfs/device.hpp"
#include "blockdvfs/governor.hpp"
#include "blockdvfs/graph.hpp"
#include "blockdvfs/partitioner.hpp"
#include "blockdvfs/sim.hpp"

namespace blockdvfs::cli {

/// Everything one run needs, resolved from a scenario file and/or flags.
/// Relative paths inside a scenario file are relative to that file.
struct Scenario {
  nlohmann::json echo = nlohmann::json::object();
  ComputationGraph graph;
  DeviceProfile profile;
  GovernorPolicy policy;
  PartitionConfig partition;
  double t0 = 25.0;
  SimOptions sim;
  std::optional<SparsityTrace> trace;
  std::vector<double> sweep_n;
  std::vector<PolicyKind> compare_policies;
  std::optional<PolicyKind> baseline;

  ThermalState thermal() const { return ThermalState::from_profile(profile, t0); }
  /// Same knobs, different kind.
  GovernorPolicy policy_as(PolicyKind kind) const;
};

/// Parses "inf"/"infinity" as the N = infinity sentinel.
double parse_n(const std::string& text);

GovernorPolicy parse_policy(const nlohmann::json& doc);

/// Loads a graph from a path, or builds one from "random:<ops>" with `seed`.
ComputationGraph resolve_graph(const std::string& spec, std::uint64_t seed);

Scenario load_scenario(const std::filesystem::path& path, std::uint64_t seed = 0);
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                        std::uint64_t seed = 0);

}  // namespace blockdvfs::cli
