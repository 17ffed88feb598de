// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "blockdvfs/device.hpp"
#include "blockdvfs/modeler.hpp"
#include "blockdvfs/partitioner.hpp"

namespace blockdvfs {

enum class PolicyKind {
  sparse_dvfs_lookahead,
  sparse_dvfs_serial,
  max_static,
  model_level_static,
  operator_level_serial,
  reactive_default,
};

std::string_view to_string(PolicyKind kind);
/// Throws ValidationError for an unknown policy name.
PolicyKind policy_kind_from_string(std::string_view name);

/// Knobs of the utilization-driven baseline (schedutil / simple_ondemand
/// stand-in).
struct ReactiveParams {
  double up_threshold = 0.8;
  double down_threshold = 0.3;
  double sampling_period = 0.010;
  /// Start state; the maximum triplet (boot clocks) when unset.
  std::optional<FrequencyTriplet> initial;
};

struct GovernorPolicy {
  PolicyKind kind = PolicyKind::sparse_dvfs_lookahead;
  ReactiveParams reactive;
  /// How far ahead of a block's end the next switch command is issued.
  /// Unset means at the block's start (the whole block masks the switch).
  std::optional<double> lookahead_lead;
};

/// Throws ValidationError if the parameters do not fit the policy kind.
void validate_policy(const GovernorPolicy& policy);

// --- FUSE: race-to-submit ---------------------------------------------------

struct FuseBlock {
  SuperBlock block;
  FrequencyTriplet boosted;  // block triplet with the CPU pinned at max
  double offset = 0.0;       // block start assuming back-to-back execution
  double boost_window = 0.0;
};

struct FusePlan {
  std::vector<FuseBlock> blocks;
};

/// Adds a CPU boost window of min(t_prefill, t_block) at the start of every
/// block. GPU and EMC stay at the block's planned levels.
FusePlan plan_fuse(const Schedule& schedule, const DeviceProfile& profile);

/// Extra energy the boost windows cost over running the planned triplets,
/// integrated operator by operator across each window.
double fuse_energy_delta(const FusePlan& plan, const DeviceProfile& profile, double temp);

// --- Memory coordination ----------------------------------------------------

struct MemoryCoordination {
  FrequencyTriplet triplet;
  Bound bound = Bound::memory;  // aggregate classification at f_block
  bool flagged = false;         // no level met the balance condition
};

/// Memory-bound blocks get the EMC at max and the GPU lowered to the smallest
/// level whose compute term stays within the memory term; compute-bound
/// blocks keep the GPU and get the smallest EMC level whose memory term
/// stays within the compute term. A candidate level is only taken if the
/// block's estimated time does not grow. CPU is left alone.
MemoryCoordination coordinate_memory(const SuperBlock& block, const DeviceProfile& profile);

/// Returns a copy of `schedule` with each block's triplet coordinated and
/// t_block re-estimated.
Schedule coordinate_schedule(const Schedule& schedule, const DeviceProfile& profile);

// --- Look-ahead switching ---------------------------------------------------

struct Transition {
  std::size_t from_block = 0;
  double block_start = 0.0;
  double block_end = 0.0;
  double issue = 0.0;
  double latency = 0.0;
  double residual_stall = 0.0;
};

struct LookaheadPlan {
  std::vector<Transition> transitions;
  double total_stall = 0.0;
  double makespan = 0.0;
};

/// Issues the switch for block i+1 at max(start_i, end_i - lead); the
/// pipeline stalls for whatever part of the switch latency is still
/// outstanding when block i ends. lead = 0 is the serial governor.
LookaheadPlan plan_lookahead(const Schedule& schedule, const DeviceProfile& profile,
                             std::optional<double> lead);

/// Residual stall of a single transition.
double residual_stall(double latency, double block_duration, std::optional<double> lead);

// --- Reactive baseline ------------------------------------------------------

/// Utilization proxies from the latency terms: GPU = compute / dominant,
/// EMC = memory / dominant, CPU = launch overhead / dominant; each clamped
/// to [0,1].
PerComponent<double> utilization_proxy(const PerfEstimate& est, const DeviceProfile& profile);

/// One governor tick: every component independently moves one level up
/// above the up threshold, one level down below the down threshold.
FrequencyTriplet reactive_step(const PerComponent<double>& utilization,
                               const FrequencyTriplet& current, const ReactiveParams& params,
                               const DeviceProfile& profile);

// --- Thermal ----------------------------------------------------------------

inline constexpr double kThrottleHysteresis = 5.0;

struct ThermalState {
  double temp = 25.0;
  double r_th = 0.0;
  double tau_th = 1.0;
  double t_ambient = 25.0;
  bool throttled = false;

  static ThermalState from_profile(const DeviceProfile& profile, double t0);
};

/// First-order RC step at constant power.
ThermalState thermal_update(const ThermalState& state, double p_total, double dt);

/// Minimum triplet while temp >= limit, and afterwards until temp drops
/// below limit - kThrottleHysteresis.
std::optional<FrequencyTriplet> throttle_check(const ThermalState& state,
                                               const DeviceProfile& profile, double limit);

}  // namespace blockdvfs
