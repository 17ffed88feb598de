// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "blockdvfs/device.hpp"
#include "blockdvfs/graph.hpp"

namespace blockdvfs {

/// Which branch of the latency model dominated. `overhead` means both the
/// compute and memory terms vanished.
enum class Bound { compute, memory, overhead };

std::string_view to_string(Bound b);

struct PerfEstimate {
  double t_exe = 0.0;
  Bound bound = Bound::overhead;
  double compute_term = 0.0;  // effective FLOPs / peak FLOP/s
  double memory_term = 0.0;   // effective bytes / bandwidth
};

struct PowerEstimate {
  double p_total = 0.0;
  double p_dynamic = 0.0;
  double p_static = 0.0;
};

/// Bottleneck latency: max(compute, memory) + constant per-operator overhead.
/// Ties classify as memory-bound.
PerfEstimate predict_exec_time(const Operator& op, const FrequencyTriplet& f,
                               const DeviceProfile& profile);

/// Effective switched capacitance, affine and decreasing in sparsity.
double activity_factor(double s_comp, Component c, const DeviceProfile& profile);

/// Dynamic plus temperature-dependent static power, summed over CPU, GPU
/// and EMC.
PowerEstimate predict_power(const FrequencyTriplet& f, double temp, double s_comp,
                            const DeviceProfile& profile);

double predict_energy(const Operator& op, const FrequencyTriplet& f, double temp,
                      const DeviceProfile& profile);

/// Energy-minimizing triplet over the full level grid, optionally subject to
/// t_exe <= budget. Ties go to lower GPU, then lower CPU, then lower EMC
/// frequency. Throws InfeasibleBudgetError when no triplet meets the budget.
FrequencyTriplet optimal_triplet(const Operator& op, double temp, const DeviceProfile& profile,
                                 std::optional<double> latency_budget = std::nullopt);

/// True when `a` wins the optimal_triplet tie-break against `b`.
bool tie_break_less(const FrequencyTriplet& a, const FrequencyTriplet& b);

/// Sum of per-operator latencies at one triplet. Throws DomainError on an
/// empty list.
double block_exec_time(std::span<const Operator> ops, const FrequencyTriplet& f,
                       const DeviceProfile& profile);

/// Sum of per-operator energies at one triplet.
double block_energy(std::span<const Operator> ops, const FrequencyTriplet& f, double temp,
                    const DeviceProfile& profile);

/// Power drawn while the pipeline waits on a frequency transition: the
/// device sits at `f` with full switching activity.
double switch_power(const FrequencyTriplet& f, double temp, const DeviceProfile& profile);

}  // namespace blockdvfs
