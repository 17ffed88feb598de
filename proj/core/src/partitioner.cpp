// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blockdvfs/partitioner.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "blockdvfs/error.hpp"
#include "blockdvfs/modeler.hpp"

namespace blockdvfs {

void validate_config(const PartitionConfig& cfg) {
  if (!(cfg.n_factor > 0.0)) {
    throw ValidationError("n", "partition: N must be > 0");
  }
  if (!(cfg.similarity_eps >= 0.0)) {
    throw ValidationError("eps", "partition: similarity tolerance must be >= 0");
  }
  if (cfg.latency_budget && !(*cfg.latency_budget > 0.0)) {
    throw ValidationError("budget", "partition: latency budget must be > 0");
  }
}

std::size_t Schedule::op_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.ops.size();
  return n;
}

bool similar(const FrequencyTriplet& a, const FrequencyTriplet& b, double eps) {
  for (Component c : kComponents) {
    const double diff = std::fabs(static_cast<double>(a[c]) - static_cast<double>(b[c]));
    if (diff > eps * static_cast<double>(b[c])) return false;
  }
  return true;
}

Schedule partition(const ComputationGraph& graph, const DeviceProfile& profile,
                   const PartitionConfig& cfg, double temp) {
  validate_config(cfg);
  const auto ops = topo_order(graph);
  Schedule schedule;
  if (ops.empty()) return schedule;

  const double threshold = cfg.n_factor * profile.t_switch_base;
  auto close = [&](SuperBlock& block) {
    block.t_block = block_exec_time(block.ops, block.f_block, profile);
    schedule.blocks.push_back(std::move(block));
  };

  SuperBlock current;
  current.first = 0;
  current.ops.push_back(ops.front());
  current.f_block = optimal_triplet(ops.front(), temp, profile, cfg.latency_budget);

  for (std::size_t i = 1; i < ops.size(); ++i) {
    const FrequencyTriplet f_next = optimal_triplet(ops[i], temp, profile, cfg.latency_budget);
    const double t_est = block_exec_time(current.ops, current.f_block, profile);
    if (t_est < threshold || similar(f_next, current.f_block, cfg.similarity_eps)) {
      current.ops.push_back(ops[i]);
      current.f_block = max(current.f_block, f_next);
    } else {
      close(current);
      current = SuperBlock{};
      current.first = i;
      current.ops.push_back(ops[i]);
      current.f_block = f_next;
    }
  }
  close(current);
  return schedule;
}

Schedule operator_level_schedule(const ComputationGraph& graph, const DeviceProfile& profile,
                                 const PartitionConfig& cfg, double temp) {
  const auto ops = topo_order(graph);
  Schedule schedule;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    SuperBlock block;
    block.first = i;
    block.ops.push_back(ops[i]);
    block.f_block = optimal_triplet(ops[i], temp, profile, cfg.latency_budget);
    block.t_block = block_exec_time(block.ops, block.f_block, profile);
    schedule.blocks.push_back(std::move(block));
  }
  return schedule;
}

double schedule_energy(const Schedule& schedule, const DeviceProfile& profile, double temp) {
  double total = 0.0;
  for (std::size_t b = 0; b < schedule.blocks.size(); ++b) {
    const auto& block = schedule.blocks[b];
    total += block_energy(block.ops, block.f_block, temp, profile);
    if (b > 0) total += switch_power(block.f_block, temp, profile) * profile.t_switch_base;
  }
  return total;
}

Schedule dp_optimal_partition(const ComputationGraph& graph, const DeviceProfile& profile,
                              const PartitionConfig& cfg, double temp) {
  validate_config(cfg);
  const auto ops = topo_order(graph);
  const std::size_t n = ops.size();
  if (n > kMaxDpOperators) {
    throw DomainError("dp_optimal_partition: " + std::to_string(n) + " operators exceeds the " +
                      std::to_string(kMaxDpOperators) + "-operator limit");
  }
  Schedule schedule;
  if (n == 0) return schedule;

  std::vector<FrequencyTriplet> grid;
  for_each_triplet(profile, [&](const FrequencyTriplet& f) { grid.push_back(f); });
  const std::size_t m = grid.size();

  // energy[i * m + k]: operator i at grid point k; +inf when over budget.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> energy(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const double t = predict_exec_time(ops[i], grid[k], profile).t_exe;
      energy[i * m + k] = (cfg.latency_budget && t > *cfg.latency_budget)
                              ? kInf
                              : predict_energy(ops[i], grid[k], temp, profile);
    }
  }
  std::vector<double> switch_energy(m);
  for (std::size_t k = 0; k < m; ++k) {
    switch_energy[k] = switch_power(grid[k], temp, profile) * profile.t_switch_base;
  }

  struct Choice {
    double cost = kInf;
    std::size_t start = 0;
    std::size_t point = 0;
  };
  // best[j]: cheapest partition of ops[0, j).
  std::vector<Choice> best(n + 1);
  best[0].cost = 0.0;
  std::vector<double> acc(m);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(best[i].cost)) continue;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t j = i; j < n; ++j) {
      double seg_cost = kInf;
      std::size_t seg_point = 0;
      for (std::size_t k = 0; k < m; ++k) {
        acc[k] += energy[j * m + k];
        const double c = acc[k] + (i > 0 ? switch_energy[k] : 0.0);
        if (c < seg_cost || (c == seg_cost && tie_break_less(grid[k], grid[seg_point]))) {
          seg_cost = c;
          seg_point = k;
        }
      }
      const double total = best[i].cost + seg_cost;
      if (total < best[j + 1].cost) best[j + 1] = {total, i, seg_point};
    }
  }
  if (!std::isfinite(best[n].cost)) {
    throw InfeasibleBudgetError(cfg.latency_budget.value_or(0.0), kInf);
  }

  std::vector<SuperBlock> reversed;
  for (std::size_t end = n; end > 0;) {
    const Choice& c = best[end];
    SuperBlock block;
    block.first = c.start;
    block.ops.assign(ops.begin() + static_cast<std::ptrdiff_t>(c.start),
                     ops.begin() + static_cast<std::ptrdiff_t>(end));
    block.f_block = grid[c.point];
    block.t_block = block_exec_time(block.ops, block.f_block, profile);
    reversed.push_back(std::move(block));
    end = c.start;
  }
  schedule.blocks.assign(std::make_move_iterator(reversed.rbegin()),
                         std::make_move_iterator(reversed.rend()));
  return schedule;
}

double switching_totals(const Schedule& schedule, const DeviceProfile& profile) {
  double total = 0.0;
  for (std::size_t b = 1; b < schedule.blocks.size(); ++b) {
    total += switch_latency(profile, schedule.blocks[b - 1].f_block, schedule.blocks[b].f_block);
  }
  return total;
}

nlohmann::json schedule_to_json(const Schedule& schedule) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& block : schedule.blocks) {
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& op : block.ops) ids.push_back(op.id);
    blocks.push_back({{"op_ids", std::move(ids)},
                      {"f_cpu", block.f_block.cpu},
                      {"f_gpu", block.f_block.gpu},
                      {"f_mem", block.f_block.mem},
                      {"t_block", block.t_block}});
  }
  return {{"blocks", std::move(blocks)}};
}

}  // namespace blockdvfs
