// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "blockdvfs/device.hpp"
#include "blockdvfs/governor.hpp"
#include "blockdvfs/graph.hpp"
#include "blockdvfs/partitioner.hpp"

namespace blockdvfs {

enum class EventKind { block_exec, switch_stall, cpu_boost, throttle };

std::string_view to_string(EventKind kind);

struct TimelineEvent {
  double t_start = 0.0;
  double t_end = 0.0;
  EventKind kind = EventKind::block_exec;
  FrequencyTriplet triplet;  // in effect during the event
  double power = 0.0;        // mean watts over the event
  double temp_end = 0.0;
  std::optional<std::size_t> block_index;
  std::string op_id;  // empty for stalls
  std::size_t iteration = 0;

  double duration() const { return t_end - t_start; }
  friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

struct ExecutionTrace {
  std::string policy;
  std::vector<TimelineEvent> events;
  double makespan = 0.0;
  double total_energy = 0.0;
  double total_switch_stall = 0.0;
  double peak_temp = 0.0;
  double final_temp = 0.0;
  std::vector<double> block_energies;  // stall energy is charged to the destination block
  std::size_t block_count = 0;
  std::size_t switch_count = 0;
  /// End of the first event whose temperature reached the throttle limit.
  std::optional<double> limit_crossing_time;

  double mean_power() const { return makespan > 0.0 ? total_energy / makespan : 0.0; }
  friend bool operator==(const ExecutionTrace&, const ExecutionTrace&) = default;
};

struct SimOptions {
  /// Back-to-back inferences; > 1 models sustained load.
  std::size_t iterations = 1;
  std::optional<double> throttle_limit;
  /// With a sparsity trace: partition once on static sparsity instead of
  /// per sample.
  bool amortized = false;
};

/// What a policy decided before execution: blocks with their triplets, the
/// look-ahead lead (0 = serial) and whether CPU boost windows are inserted.
struct PolicyPlan {
  Schedule schedule;
  std::optional<double> lead = 0.0;
  bool cpu_boost = false;
};

/// Planning step for every policy except reactive_default.
PolicyPlan plan_policy(const ComputationGraph& graph, const DeviceProfile& profile,
                       const GovernorPolicy& policy, const PartitionConfig& cfg, double temp);

/// Whole-graph energy argmin over the level grid (model-level DVFS).
FrequencyTriplet model_level_triplet(const ComputationGraph& graph, const DeviceProfile& profile,
                                     const PartitionConfig& cfg, double temp);

ExecutionTrace simulate(const ComputationGraph& graph, const DeviceProfile& profile,
                        const GovernorPolicy& policy, const PartitionConfig& cfg,
                        const ThermalState& thermal_init, const SimOptions& options = {});

/// One trace per sample of `samples`.
std::vector<ExecutionTrace> simulate_samples(const ComputationGraph& graph,
                                             const DeviceProfile& profile,
                                             const GovernorPolicy& policy,
                                             const PartitionConfig& cfg,
                                             const ThermalState& thermal_init,
                                             const SparsityTrace& samples,
                                             const SimOptions& options = {});

/// 100 * (E_baseline - E) / E_baseline. Throws DomainError on zero baseline.
double energy_efficiency_gain(const ExecutionTrace& trace, const ExecutionTrace& baseline);

/// 100 * latency-increase fraction / energy-gain fraction; lower is better.
/// Throws DomainError when the energy gain is not positive.
double cost_gain_ratio(const ExecutionTrace& trace, const ExecutionTrace& baseline);

struct SweepRow {
  double n = 0.0;
  std::size_t blocks = 0;
  double makespan = 0.0;
  double switch_stall = 0.0;
  double energy = 0.0;
};

std::vector<SweepRow> sweep_n(const ComputationGraph& graph, const DeviceProfile& profile,
                              const GovernorPolicy& policy, const PartitionConfig& cfg,
                              const ThermalState& thermal_init, std::span<const double> n_values,
                              const SimOptions& options = {});

nlohmann::json trace_to_json(const ExecutionTrace& trace);

}  // namespace blockdvfs
