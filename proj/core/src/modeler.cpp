// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blockdvfs/modeler.hpp"

#include <limits>
#include <tuple>

#include "blockdvfs/error.hpp"

namespace blockdvfs {

std::string_view to_string(Bound b) {
  switch (b) {
    case Bound::compute: return "compute";
    case Bound::memory: return "memory";
    case Bound::overhead: return "overhead";
  }
  return "?";
}

PerfEstimate predict_exec_time(const Operator& op, const FrequencyTriplet& f,
                               const DeviceProfile& profile) {
  PerfEstimate est;
  est.compute_term = op.effective_work() / peak_perf(profile, f.cpu, f.gpu);
  est.memory_term = op.effective_bytes() / mem_bandwidth(profile, f.mem);
  if (est.compute_term == 0.0 && est.memory_term == 0.0) {
    est.bound = Bound::overhead;
  } else if (est.memory_term >= est.compute_term) {
    est.bound = Bound::memory;
  } else {
    est.bound = Bound::compute;
  }
  est.t_exe = std::max(est.compute_term, est.memory_term) + profile.t_overhead;
  return est;
}

double activity_factor(double s_comp, Component c, const DeviceProfile& profile) {
  if (!(s_comp >= 0.0 && s_comp <= 1.0)) {
    throw DomainError("activity factor: sparsity " + std::to_string(s_comp) + " outside [0,1]");
  }
  return profile.alpha_max[c] - (profile.alpha_max[c] - profile.alpha_min[c]) * s_comp;
}

PowerEstimate predict_power(const FrequencyTriplet& f, double temp, double s_comp,
                            const DeviceProfile& profile) {
  PowerEstimate est;
  const double leakage = profile.k1 * temp + profile.k2;
  for (Component c : kComponents) {
    const double v = voltage_of(profile, c, f[c]);
    est.p_dynamic += activity_factor(s_comp, c, profile) * v * v * static_cast<double>(f[c]);
    est.p_static += leakage * v;
  }
  est.p_total = est.p_dynamic + est.p_static;
  return est;
}

double predict_energy(const Operator& op, const FrequencyTriplet& f, double temp,
                      const DeviceProfile& profile) {
  return predict_power(f, temp, op.s_comp, profile).p_total *
         predict_exec_time(op, f, profile).t_exe;
}

bool tie_break_less(const FrequencyTriplet& a, const FrequencyTriplet& b) {
  return std::tie(a.gpu, a.cpu, a.mem) < std::tie(b.gpu, b.cpu, b.mem);
}

FrequencyTriplet optimal_triplet(const Operator& op, double temp, const DeviceProfile& profile,
                                 std::optional<double> latency_budget) {
  std::optional<FrequencyTriplet> best;
  double best_energy = std::numeric_limits<double>::infinity();
  double min_t_exe = std::numeric_limits<double>::infinity();

  for_each_triplet(profile, [&](const FrequencyTriplet& f) {
    const double t = predict_exec_time(op, f, profile).t_exe;
    min_t_exe = std::min(min_t_exe, t);
    if (latency_budget && t > *latency_budget) return;
    const double e = predict_power(f, temp, op.s_comp, profile).p_total * t;
    if (!best || e < best_energy || (e == best_energy && tie_break_less(f, *best))) {
      best = f;
      best_energy = e;
    }
  });

  if (!best) throw InfeasibleBudgetError(*latency_budget, min_t_exe);
  return *best;
}

double block_exec_time(std::span<const Operator> ops, const FrequencyTriplet& f,
                       const DeviceProfile& profile) {
  if (ops.empty()) throw DomainError("block_exec_time: empty operator list");
  double total = 0.0;
  for (const auto& op : ops) total += predict_exec_time(op, f, profile).t_exe;
  return total;
}

double block_energy(std::span<const Operator> ops, const FrequencyTriplet& f, double temp,
                    const DeviceProfile& profile) {
  double total = 0.0;
  for (const auto& op : ops) total += predict_energy(op, f, temp, profile);
  return total;
}

double switch_power(const FrequencyTriplet& f, double temp, const DeviceProfile& profile) {
  return predict_power(f, temp, 0.0, profile).p_total;
}

InfeasibleBudgetError::InfeasibleBudgetError(double budget, double min_t_exe)
    : Error("latency budget " + std::to_string(budget) + " s is infeasible; minimum t_exe is " +
            std::to_string(min_t_exe) + " s"),
      budget_(budget),
      min_t_exe_(min_t_exe) {}

}  // namespace blockdvfs
