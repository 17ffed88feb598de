// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blockdvfs/governor.hpp"

#include <algorithm>
#include <cmath>

#include "blockdvfs/error.hpp"

namespace blockdvfs {

namespace {

constexpr std::pair<PolicyKind, std::string_view> kPolicyNames[] = {
    {PolicyKind::sparse_dvfs_lookahead, "sparse_dvfs_lookahead"},
    {PolicyKind::sparse_dvfs_serial, "sparse_dvfs_serial"},
    {PolicyKind::max_static, "max_static"},
    {PolicyKind::model_level_static, "model_level_static"},
    {PolicyKind::operator_level_serial, "operator_level_serial"},
    {PolicyKind::reactive_default, "reactive_default"},
};

struct AggregateTerms {
  double compute = 0.0;
  double memory = 0.0;
};

AggregateTerms aggregate_terms(const SuperBlock& block, const FrequencyTriplet& f,
                               const DeviceProfile& profile) {
  double work = 0.0;
  double bytes = 0.0;
  for (const auto& op : block.ops) {
    work += op.effective_work();
    bytes += op.effective_bytes();
  }
  return {work / peak_perf(profile, f.cpu, f.gpu), bytes / mem_bandwidth(profile, f.mem)};
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  for (const auto& [k, name] : kPolicyNames) {
    if (k == kind) return name;
  }
  return "?";
}

PolicyKind policy_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kPolicyNames) {
    if (n == name) return k;
  }
  throw ValidationError(std::string(name), "unknown policy '" + std::string(name) + "'");
}

void validate_policy(const GovernorPolicy& policy) {
  const auto& r = policy.reactive;
  if (policy.kind == PolicyKind::reactive_default) {
    if (!(r.down_threshold >= 0.0 && r.down_threshold < r.up_threshold && r.up_threshold <= 1.0)) {
      throw ValidationError("reactive", "reactive policy needs 0 <= down < up <= 1");
    }
    if (!(r.sampling_period > 0.0)) {
      throw ValidationError("reactive", "reactive sampling period must be > 0");
    }
  }
  if (policy.lookahead_lead && !(*policy.lookahead_lead >= 0.0)) {
    throw ValidationError("lead", "look-ahead lead must be >= 0");
  }
}

FusePlan plan_fuse(const Schedule& schedule, const DeviceProfile& profile) {
  FusePlan plan;
  double offset = 0.0;
  for (const auto& block : schedule.blocks) {
    FuseBlock fb;
    fb.block = block;
    fb.boosted = block.f_block;
    fb.boosted.cpu = profile.levels.cpu.back();
    fb.offset = offset;
    fb.boost_window = std::min(profile.t_prefill, block.t_block);
    offset += block.t_block;
    plan.blocks.push_back(std::move(fb));
  }
  return plan;
}

double fuse_energy_delta(const FusePlan& plan, const DeviceProfile& profile, double temp) {
  double delta = 0.0;
  for (const auto& fb : plan.blocks) {
    double remaining = fb.boost_window;
    for (const auto& op : fb.block.ops) {
      if (remaining <= 0.0) break;
      const double dt = std::min(remaining, predict_exec_time(op, fb.block.f_block, profile).t_exe);
      delta += (predict_power(fb.boosted, temp, op.s_comp, profile).p_total -
                predict_power(fb.block.f_block, temp, op.s_comp, profile).p_total) *
               dt;
      remaining -= dt;
    }
  }
  return delta;
}

MemoryCoordination coordinate_memory(const SuperBlock& block, const DeviceProfile& profile) {
  MemoryCoordination out;
  out.triplet = block.f_block;
  const AggregateTerms at_plan = aggregate_terms(block, block.f_block, profile);
  const double t_plan = block_exec_time(block.ops, block.f_block, profile);
  out.bound = at_plan.memory >= at_plan.compute ? Bound::memory : Bound::compute;

  if (out.bound == Bound::memory) {
    out.triplet.mem = profile.levels.mem.back();
    const FrequencyTriplet emc_maxed = out.triplet;
    bool found = false;
    for (Hz g : profile.levels.gpu) {
      FrequencyTriplet candidate = emc_maxed;
      candidate.gpu = g;
      const AggregateTerms terms = aggregate_terms(block, candidate, profile);
      if (terms.compute <= terms.memory &&
          block_exec_time(block.ops, candidate, profile) <= t_plan) {
        out.triplet = candidate;
        found = true;
        break;
      }
    }
    if (!found) {
      out.triplet.gpu = profile.levels.gpu.back();
      out.flagged = true;
    }
  } else {
    bool found = false;
    for (Hz m : profile.levels.mem) {
      FrequencyTriplet candidate = block.f_block;
      candidate.mem = m;
      const AggregateTerms terms = aggregate_terms(block, candidate, profile);
      if (terms.memory <= terms.compute &&
          block_exec_time(block.ops, candidate, profile) <= t_plan) {
        out.triplet = candidate;
        found = true;
        break;
      }
    }
    if (!found) out.flagged = true;
  }
  return out;
}

Schedule coordinate_schedule(const Schedule& schedule, const DeviceProfile& profile) {
  Schedule out = schedule;
  for (auto& block : out.blocks) {
    block.f_block = coordinate_memory(block, profile).triplet;
    block.t_block = block_exec_time(block.ops, block.f_block, profile);
  }
  return out;
}

double residual_stall(double latency, double block_duration, std::optional<double> lead) {
  const double overlap = lead ? std::min(*lead, block_duration) : block_duration;
  return std::max(0.0, latency - overlap);
}

LookaheadPlan plan_lookahead(const Schedule& schedule, const DeviceProfile& profile,
                             std::optional<double> lead) {
  if (lead && !(*lead >= 0.0)) throw DomainError("plan_lookahead: lead must be >= 0");
  LookaheadPlan plan;
  double t = 0.0;
  for (std::size_t i = 0; i < schedule.blocks.size(); ++i) {
    const auto& block = schedule.blocks[i];
    const double start = t;
    const double end = start + block.t_block;
    t = end;
    if (i + 1 == schedule.blocks.size()) break;
    Transition tr;
    tr.from_block = i;
    tr.block_start = start;
    tr.block_end = end;
    tr.issue = lead ? std::max(start, end - *lead) : start;
    tr.latency = switch_latency(profile, block.f_block, schedule.blocks[i + 1].f_block);
    tr.residual_stall = residual_stall(tr.latency, block.t_block, lead);
    plan.total_stall += tr.residual_stall;
    t += tr.residual_stall;
    plan.transitions.push_back(tr);
  }
  plan.makespan = t;
  return plan;
}

PerComponent<double> utilization_proxy(const PerfEstimate& est, const DeviceProfile& profile) {
  const double dominant = std::max(est.compute_term, est.memory_term);
  auto ratio = [&](double term) {
    if (dominant <= 0.0) return term > 0.0 ? 1.0 : 0.0;
    return std::clamp(term / dominant, 0.0, 1.0);
  };
  PerComponent<double> u;
  u.gpu = ratio(est.compute_term);
  u.mem = ratio(est.memory_term);
  u.cpu = dominant <= 0.0 ? (profile.t_overhead > 0.0 ? 1.0 : 0.0)
                          : std::clamp(profile.t_overhead / dominant, 0.0, 1.0);
  return u;
}

FrequencyTriplet reactive_step(const PerComponent<double>& utilization,
                               const FrequencyTriplet& current, const ReactiveParams& params,
                               const DeviceProfile& profile) {
  FrequencyTriplet next = current;
  for (Component c : kComponents) {
    const double u = utilization[c];
    if (!(u >= 0.0 && u <= 1.0)) {
      throw DomainError("reactive_step: utilization outside [0,1] for " + std::string(to_string(c)));
    }
    const auto& table = profile.levels[c];
    std::size_t idx = profile.level_index(c, current[c]);
    if (u > params.up_threshold && idx + 1 < table.size()) {
      ++idx;
    } else if (u < params.down_threshold && idx > 0) {
      --idx;
    }
    const Hz level = table[idx];
    if (c == Component::cpu) next.cpu = level;
    else if (c == Component::gpu) next.gpu = level;
    else next.mem = level;
  }
  return next;
}

ThermalState ThermalState::from_profile(const DeviceProfile& profile, double t0) {
  ThermalState s;
  s.temp = t0;
  s.r_th = profile.r_th;
  s.tau_th = profile.tau_th;
  s.t_ambient = profile.t_ambient;
  return s;
}

ThermalState thermal_update(const ThermalState& state, double p_total, double dt) {
  if (!(dt > 0.0)) throw DomainError("thermal_update: dt must be > 0");
  ThermalState next = state;
  const double decay = std::exp(-dt / state.tau_th);
  next.temp = state.t_ambient + (state.temp - state.t_ambient) * decay +
              state.r_th * p_total * (1.0 - decay);
  return next;
}

std::optional<FrequencyTriplet> throttle_check(const ThermalState& state,
                                               const DeviceProfile& profile, double limit) {
  if (!(limit > state.t_ambient)) {
    throw DomainError("throttle_check: limit must exceed the ambient temperature");
  }
  if (state.temp >= limit || (state.throttled && state.temp >= limit - kThrottleHysteresis)) {
    return profile.min_triplet();
  }
  return std::nullopt;
}

}  // namespace blockdvfs
