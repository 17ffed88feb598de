// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blockdvfs/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "blockdvfs/error.hpp"
#include "blockdvfs/modeler.hpp"

namespace blockdvfs {

namespace {

// Appends gap-free events and advances the thermal state one step per event.
class Recorder {
 public:
  Recorder(const DeviceProfile& profile, const ThermalState& init, std::optional<double> limit,
           std::string policy, std::size_t block_count)
      : profile_(profile), state_(init), limit_(limit) {
    trace_.policy = std::move(policy);
    trace_.block_count = block_count;
    trace_.block_energies.assign(block_count, 0.0);
    trace_.peak_temp = init.temp;
  }

  double now() const { return now_; }
  double temp() const { return state_.temp; }

  /// Forced triplet while thermally throttled; updates the hysteresis flag.
  std::optional<FrequencyTriplet> throttle() {
    if (!limit_) return std::nullopt;
    auto forced = throttle_check(state_, profile_, *limit_);
    state_.throttled = forced.has_value();
    return forced;
  }

  void emit(EventKind kind, const FrequencyTriplet& f, double power, double dt,
            std::size_t block, const std::string& op_id, std::size_t iteration) {
    if (!(dt > 0.0)) return;
    TimelineEvent ev;
    ev.t_start = now_;
    ev.t_end = now_ + dt;
    ev.kind = kind;
    ev.triplet = f;
    ev.power = power;
    state_ = thermal_update(state_, power, dt);
    ev.temp_end = state_.temp;
    ev.block_index = block;
    ev.op_id = op_id;
    ev.iteration = iteration;

    const double energy = power * dt;
    trace_.total_energy += energy;
    trace_.block_energies[block] += energy;
    if (kind == EventKind::switch_stall) trace_.total_switch_stall += dt;
    trace_.peak_temp = std::max(trace_.peak_temp, state_.temp);
    if (limit_ && !trace_.limit_crossing_time && state_.temp >= *limit_) {
      trace_.limit_crossing_time = ev.t_end;
    }
    now_ = ev.t_end;
    trace_.events.push_back(std::move(ev));
  }

  void count_switch() { ++trace_.switch_count; }

  ExecutionTrace finish() {
    trace_.makespan = trace_.events.empty() ? 0.0 : trace_.events.back().t_end;
    trace_.final_temp = state_.temp;
    return std::move(trace_);
  }

 private:
  const DeviceProfile& profile_;
  ThermalState state_;
  std::optional<double> limit_;
  ExecutionTrace trace_;
  double now_ = 0.0;
};

void run_op(Recorder& rec, const DeviceProfile& profile, const Operator& op,
            const FrequencyTriplet& f, double& boost_left, const FrequencyTriplet& boosted,
            std::size_t block, std::size_t iteration) {
  if (auto forced = rec.throttle()) {
    const double t = predict_exec_time(op, *forced, profile).t_exe;
    rec.emit(EventKind::throttle, *forced, predict_power(*forced, rec.temp(), op.s_comp, profile).p_total,
             t, block, op.id, iteration);
    return;
  }
  const double t_exe = predict_exec_time(op, f, profile).t_exe;
  double rest = t_exe;
  if (boost_left > 0.0) {
    const double b = std::min(boost_left, t_exe);
    rec.emit(EventKind::cpu_boost, boosted,
             predict_power(boosted, rec.temp(), op.s_comp, profile).p_total, b, block, op.id,
             iteration);
    boost_left -= b;
    rest = t_exe - b;
  }
  rec.emit(EventKind::block_exec, f, predict_power(f, rec.temp(), op.s_comp, profile).p_total,
           rest, block, op.id, iteration);
}

ExecutionTrace run_plan(const PolicyPlan& plan, const DeviceProfile& profile,
                        const GovernorPolicy& policy, const ThermalState& init,
                        const SimOptions& options) {
  const auto& blocks = plan.schedule.blocks;
  Recorder rec(profile, init, options.throttle_limit, std::string(to_string(policy.kind)),
               blocks.size());
  if (blocks.empty()) return rec.finish();

  FrequencyTriplet current = blocks.front().f_block;
  double prev_duration = 0.0;
  for (std::size_t it = 0; it < options.iterations; ++it) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& block = blocks[b];
      if (it > 0 || b > 0) {
        const double latency = switch_latency(profile, current, block.f_block);
        if (latency > 0.0) rec.count_switch();
        const double stall = residual_stall(latency, prev_duration, plan.lead);
        rec.emit(EventKind::switch_stall, current, switch_power(current, rec.temp(), profile),
                 stall, b, "", it);
        current = block.f_block;
      }
      const double start = rec.now();
      double boost_left = plan.cpu_boost ? std::min(profile.t_prefill, block.t_block) : 0.0;
      FrequencyTriplet boosted = current;
      boosted.cpu = profile.levels.cpu.back();
      for (const auto& op : block.ops) {
        run_op(rec, profile, op, current, boost_left, boosted, b, it);
      }
      prev_duration = rec.now() - start;
    }
  }
  return rec.finish();
}

// Utilization-driven baseline: every component follows its own proxy with
// one-level steps per sampling period; each change stalls the pipeline for
// the full switch latency.
ExecutionTrace run_reactive(const ComputationGraph& graph, const DeviceProfile& profile,
                            const GovernorPolicy& policy, const ThermalState& init,
                            const SimOptions& options) {
  const auto ops = topo_order(graph);
  const ReactiveParams& params = policy.reactive;
  Recorder rec(profile, init, options.throttle_limit, std::string(to_string(policy.kind)),
               ops.size());
  FrequencyTriplet current = params.initial.value_or(profile.max_triplet());
  profile.check_triplet(current);

  const double period = params.sampling_period;
  double next_sample = period;
  PerComponent<double> busy;  // utilization-weighted time since the last sample

  for (std::size_t it = 0; it < options.iterations; ++it) {
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const Operator& op = ops[i];
      double progress = 0.0;
      while (progress < 1.0) {
        FrequencyTriplet f = current;
        EventKind kind = EventKind::block_exec;
        if (auto forced = rec.throttle()) {
          f = *forced;
          kind = EventKind::throttle;
        }
        const PerfEstimate est = predict_exec_time(op, f, profile);
        const double remaining = (1.0 - progress) * est.t_exe;
        const double window = next_sample - rec.now();
        double dt = remaining;
        if (window < remaining) {
          dt = window;
          progress += dt / est.t_exe;
        } else {
          progress = 1.0;
        }
        const auto util = utilization_proxy(est, profile);
        for (Component c : kComponents) busy[c] += util[c] * dt;
        rec.emit(kind, f, predict_power(f, rec.temp(), op.s_comp, profile).p_total, dt, i,
                 op.id, it);

        if (rec.now() >= next_sample) {
          PerComponent<double> u;
          for (Component c : kComponents) u[c] = std::clamp(busy[c] / period, 0.0, 1.0);
          busy = {};
          const FrequencyTriplet next = reactive_step(u, current, params, profile);
          if (next != current) {
            const double latency = switch_latency(profile, current, next);
            rec.count_switch();
            rec.emit(EventKind::switch_stall, current, switch_power(current, rec.temp(), profile),
                     latency, i, "", it);
            current = next;
          }
          next_sample = rec.now() + period;
        }
      }
    }
  }
  return rec.finish();
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::block_exec: return "block_exec";
    case EventKind::switch_stall: return "switch_stall";
    case EventKind::cpu_boost: return "cpu_boost";
    case EventKind::throttle: return "throttle";
  }
  return "?";
}

FrequencyTriplet model_level_triplet(const ComputationGraph& graph, const DeviceProfile& profile,
                                     const PartitionConfig& cfg, double temp) {
  const auto& ops = graph.operators();
  std::optional<FrequencyTriplet> best;
  double best_energy = std::numeric_limits<double>::infinity();
  for_each_triplet(profile, [&](const FrequencyTriplet& f) {
    double e = 0.0;
    for (const auto& op : ops) {
      if (cfg.latency_budget && predict_exec_time(op, f, profile).t_exe > *cfg.latency_budget) {
        return;
      }
      e += predict_energy(op, f, temp, profile);
    }
    if (!best || e < best_energy || (e == best_energy && tie_break_less(f, *best))) {
      best = f;
      best_energy = e;
    }
  });
  if (!best) {
    throw InfeasibleBudgetError(cfg.latency_budget.value_or(0.0),
                                std::numeric_limits<double>::infinity());
  }
  return *best;
}

PolicyPlan plan_policy(const ComputationGraph& graph, const DeviceProfile& profile,
                       const GovernorPolicy& policy, const PartitionConfig& cfg, double temp) {
  validate_policy(policy);
  validate_config(cfg);
  PolicyPlan plan;
  auto single_block = [&](const FrequencyTriplet& f) {
    Schedule s;
    if (graph.size() == 0) return s;
    SuperBlock block;
    block.ops = topo_order(graph);
    block.f_block = f;
    block.t_block = block_exec_time(block.ops, f, profile);
    s.blocks.push_back(std::move(block));
    return s;
  };

  switch (policy.kind) {
    case PolicyKind::sparse_dvfs_lookahead:
      plan.schedule = coordinate_schedule(partition(graph, profile, cfg, temp), profile);
      plan.lead = policy.lookahead_lead;
      plan.cpu_boost = true;
      break;
    case PolicyKind::sparse_dvfs_serial:
      plan.schedule = coordinate_schedule(partition(graph, profile, cfg, temp), profile);
      plan.lead = 0.0;
      plan.cpu_boost = true;
      break;
    case PolicyKind::max_static:
      plan.schedule = single_block(profile.max_triplet());
      break;
    case PolicyKind::model_level_static:
      plan.schedule = single_block(model_level_triplet(graph, profile, cfg, temp));
      break;
    case PolicyKind::operator_level_serial:
      plan.schedule = operator_level_schedule(graph, profile, cfg, temp);
      break;
    case PolicyKind::reactive_default:
      throw ValidationError("reactive_default", "reactive_default has no static plan");
  }
  return plan;
}

ExecutionTrace simulate(const ComputationGraph& graph, const DeviceProfile& profile,
                        const GovernorPolicy& policy, const PartitionConfig& cfg,
                        const ThermalState& thermal_init, const SimOptions& options) {
  validate_policy(policy);
  validate_config(cfg);
  if (options.iterations == 0) throw ValidationError("iterations", "iterations must be >= 1");
  if (policy.kind == PolicyKind::reactive_default) {
    return run_reactive(graph, profile, policy, thermal_init, options);
  }
  const PolicyPlan plan = plan_policy(graph, profile, policy, cfg, thermal_init.temp);
  return run_plan(plan, profile, policy, thermal_init, options);
}

std::vector<ExecutionTrace> simulate_samples(const ComputationGraph& graph,
                                             const DeviceProfile& profile,
                                             const GovernorPolicy& policy,
                                             const PartitionConfig& cfg,
                                             const ThermalState& thermal_init,
                                             const SparsityTrace& samples,
                                             const SimOptions& options) {
  validate_trace(graph, samples);
  std::vector<ExecutionTrace> out;
  out.reserve(samples.size());

  std::optional<PolicyPlan> shared;
  const bool planned = policy.kind != PolicyKind::reactive_default;
  if (options.amortized && planned) {
    shared = plan_policy(graph, profile, policy, cfg, thermal_init.temp);
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const ComputationGraph g = apply_trace(graph, samples, s);
    if (!shared) {
      out.push_back(simulate(g, profile, policy, cfg, thermal_init, options));
      continue;
    }
    // Same blocks and triplets, this sample's sparsities.
    PolicyPlan plan = *shared;
    const auto& ops = g.operators();
    for (auto& block : plan.schedule.blocks) {
      for (std::size_t k = 0; k < block.ops.size(); ++k) block.ops[k] = ops[block.first + k];
      block.t_block = block_exec_time(block.ops, block.f_block, profile);
    }
    out.push_back(run_plan(plan, profile, policy, thermal_init, options));
  }
  return out;
}

double energy_efficiency_gain(const ExecutionTrace& trace, const ExecutionTrace& baseline) {
  if (!(baseline.total_energy != 0.0)) {
    throw DomainError("energy_efficiency_gain: baseline energy is zero");
  }
  return 100.0 * (baseline.total_energy - trace.total_energy) / baseline.total_energy;
}

double cost_gain_ratio(const ExecutionTrace& trace, const ExecutionTrace& baseline) {
  const double gain = energy_efficiency_gain(trace, baseline) / 100.0;
  if (!(gain > 0.0)) {
    throw DomainError("cost_gain_ratio: energy gain is not positive");
  }
  if (!(baseline.makespan > 0.0)) throw DomainError("cost_gain_ratio: baseline makespan is zero");
  const double latency_cost = (trace.makespan - baseline.makespan) / baseline.makespan;
  return 100.0 * latency_cost / gain;
}

std::vector<SweepRow> sweep_n(const ComputationGraph& graph, const DeviceProfile& profile,
                              const GovernorPolicy& policy, const PartitionConfig& cfg,
                              const ThermalState& thermal_init, std::span<const double> n_values,
                              const SimOptions& options) {
  if (n_values.empty()) throw ValidationError("n_values", "sweep needs at least one N");
  std::vector<SweepRow> rows;
  for (double n : n_values) {
    PartitionConfig c = cfg;
    c.n_factor = n;
    validate_config(c);
    const ExecutionTrace trace = simulate(graph, profile, policy, c, thermal_init, options);
    rows.push_back({n, trace.block_count, trace.makespan, trace.total_switch_stall,
                    trace.total_energy});
  }
  return rows;
}

nlohmann::json trace_to_json(const ExecutionTrace& trace) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& ev : trace.events) {
    nlohmann::json j = {{"t_start", ev.t_start},
                        {"t_end", ev.t_end},
                        {"kind", std::string(to_string(ev.kind))},
                        {"f_cpu", ev.triplet.cpu},
                        {"f_gpu", ev.triplet.gpu},
                        {"f_mem", ev.triplet.mem},
                        {"power", ev.power},
                        {"temp_end", ev.temp_end},
                        {"iteration", ev.iteration}};
    if (ev.block_index) j["block_index"] = *ev.block_index;
    if (!ev.op_id.empty()) j["op_id"] = ev.op_id;
    events.push_back(std::move(j));
  }
  nlohmann::json out = {{"policy", trace.policy},
                        {"makespan", trace.makespan},
                        {"total_energy", trace.total_energy},
                        {"total_switch_stall", trace.total_switch_stall},
                        {"peak_temp", trace.peak_temp},
                        {"final_temp", trace.final_temp},
                        {"block_count", trace.block_count},
                        {"switch_count", trace.switch_count},
                        {"block_energies", trace.block_energies},
                        {"events", std::move(events)}};
  if (trace.limit_crossing_time) out["limit_crossing_time"] = *trace.limit_crossing_time;
  return out;
}

}  // namespace blockdvfs
