// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "blockdvfs/device.hpp"
#include "blockdvfs/graph.hpp"

namespace blockdvfs {

struct PartitionConfig {
  /// Amortization factor: a block may only be closed once its estimated
  /// time reaches n_factor * t_switch_base. Infinity merges everything.
  double n_factor = 5.0;
  /// Per-component relative tolerance for treating two triplets as equal.
  double similarity_eps = 0.05;
  std::optional<double> latency_budget;

  static constexpr double kInfinity = std::numeric_limits<double>::infinity();
};

/// Throws ValidationError on n_factor <= 0 or similarity_eps < 0.
void validate_config(const PartitionConfig& cfg);

/// A contiguous run of operators executed at one triplet.
struct SuperBlock {
  std::size_t first = 0;  // position of ops.front() in the topological order
  std::vector<Operator> ops;
  FrequencyTriplet f_block;
  double t_block = 0.0;

  friend bool operator==(const SuperBlock&, const SuperBlock&) = default;
};

struct Schedule {
  std::vector<SuperBlock> blocks;

  std::size_t op_count() const;
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// |a_c - b_c| <= eps * b_c for every component.
bool similar(const FrequencyTriplet& a, const FrequencyTriplet& b, double eps);

/// Greedy super-block construction over the topological order.
///
/// Walks the operators keeping an open block at triplet f_curr. For each
/// next operator the block's estimated time at f_curr is compared with
/// N * t_switch_base; the operator joins the block if that time is still
/// below the threshold or its own optimal triplet is similar to f_curr, and
/// f_curr then becomes the componentwise maximum of both. Otherwise the open
/// block is emitted and a new one starts at the operator's optimum.
Schedule partition(const ComputationGraph& graph, const DeviceProfile& profile,
                   const PartitionConfig& cfg, double temp);

/// One block per operator at its own optimal triplet.
Schedule operator_level_schedule(const ComputationGraph& graph, const DeviceProfile& profile,
                                 const PartitionConfig& cfg, double temp);

/// Energy objective shared by the greedy and DP schedules: operator energy
/// at each block's triplet plus, for every block after the first,
/// switch_power(f_block) * t_switch_base.
double schedule_energy(const Schedule& schedule, const DeviceProfile& profile, double temp);

inline constexpr std::size_t kMaxDpOperators = 512;

/// Minimum-energy contiguous partition under `schedule_energy`, each segment
/// at the triplet that minimizes its own cost. Reference oracle for the
/// greedy; throws DomainError above kMaxDpOperators operators.
Schedule dp_optimal_partition(const ComputationGraph& graph, const DeviceProfile& profile,
                              const PartitionConfig& cfg, double temp);

/// Sum of switch_latency over consecutive blocks.
double switching_totals(const Schedule& schedule, const DeviceProfile& profile);

nlohmann::json schedule_to_json(const Schedule& schedule);

}  // namespace blockdvfs
