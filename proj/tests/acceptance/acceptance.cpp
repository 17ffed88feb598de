// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails, except those named with --known-failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "blockdvfs/device.hpp"
#include "blockdvfs/governor.hpp"
#include "blockdvfs/graph.hpp"
#include "blockdvfs/modeler.hpp"
#include "blockdvfs/partitioner.hpp"
#include "blockdvfs/sim.hpp"
#include "support/test_support.hpp"

using namespace blockdvfs;
namespace ts = testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure messages of a criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ << (failures_ > 1 ? "; " : "") << what;
  }
  void note(const std::string& s) { info_ << (info_.tellp() > 0 ? "; " : "") << s; }
  Outcome outcome() const {
    if (failures_ == 0) return {true, info_.str()};
    std::ostringstream out;
    out << failures_ << " failure(s): " << notes_.str();
    return {false, out.str()};
  }

 private:
  std::size_t failures_ = 0;
  std::ostringstream notes_;
  std::ostringstream info_;
};

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

const DeviceProfile& profile() {
  static const DeviceProfile p = load_profile(ts::data_path("profiles/orin_nano.json"));
  return p;
}

const ts::RawProfile& raw() {
  static const ts::RawProfile r(ts::read_json(ts::data_path("profiles/orin_nano.json")));
  return r;
}

ComputationGraph fixture(const std::string& name) {
  return load_graph(ts::data_path("graphs/" + name + ".json"));
}

// Look-ahead lead stored with each fixture scenario.
std::optional<double> fixture_lead(const std::string& name) {
  const auto doc = ts::read_json(ts::data_path("scenarios/" + name + ".json"));
  if (doc.contains("policy") && doc["policy"].contains("lead")) {
    return doc["policy"]["lead"].get<double>();
  }
  return std::nullopt;
}

GovernorPolicy policy(PolicyKind kind, std::optional<double> lead = std::nullopt) {
  GovernorPolicy p;
  p.kind = kind;
  if (kind == PolicyKind::sparse_dvfs_lookahead) p.lookahead_lead = lead;
  return p;
}

ThermalState ambient() { return ThermalState::from_profile(profile(), profile().t_ambient); }

bool rel_le(double a, double b) { return a <= b * (1.0 + 1e-12) + 1e-18; }

// --- criteria ---------------------------------------------------------------

Outcome latency_and_power_exact() {
  Checker c;
  const auto& p = profile();
  const Operator probes[] = {
      ts::make_op("conv_dense", 2.3e8, 9e5),
      ts::make_op("conv_sparse", 2.3e8, 9e5, 0.7),
      ts::make_op("unstructured", 4.1e8, 2.2e6, 0.6, 0.0),
      ts::make_op("memory_heavy", 1e6, 8e6, 0.0, 0.5),
      ts::make_op("balanced", 3.0e7, 1.2e6, 0.25, 0.25),
      ts::make_op("tiny", 1e3, 1e3),
      ts::make_op("fully_sparse", 1e8, 1e6, 1.0, 1.0),
      ts::make_op("attention", 1.9e9, 1.4e7, 0.45, 0.3)};
  std::size_t points = 0;
  for (const auto& op : probes) {
    for_each_triplet(p, [&](const FrequencyTriplet& f) {
      ++points;
      const double t = predict_exec_time(op, f, p).t_exe;
      const double t_ref =
          ts::oracle_time(raw(), op.w_comp, op.d_mem, op.s_comp, op.s_mem, f.cpu, f.gpu, f.mem);
      c.expect(ts::rel_close(t, t_ref, 1e-12), "latency mismatch at " + op.id);
      for (double temp : {25.0, 70.0}) {
        const double pw = predict_power(f, temp, op.s_comp, p).p_total;
        const double pw_ref = ts::oracle_power(raw(), f.cpu, f.gpu, f.mem, temp, op.s_comp);
        c.expect(ts::rel_close(pw, pw_ref, 1e-12), "power mismatch at " + op.id);
      }
    });
  }
  c.note(std::to_string(points) + " grid points");
  return c.outcome();
}

// Lowest GPU, then CPU, then EMC wins an exact energy tie.
bool earlier(const FrequencyTriplet& a, const FrequencyTriplet& b) {
  if (a.gpu != b.gpu) return a.gpu < b.gpu;
  if (a.cpu != b.cpu) return a.cpu < b.cpu;
  return a.mem < b.mem;
}

Outcome optimal_triplet_oracle() {
  Checker c;
  const auto& p = profile();
  const double temp = p.t_ambient;
  std::size_t cases = 0;
  for (const char* name : ts::kFixtures) {
    const auto g = fixture(name);
    for (const auto& op : g.operators()) {
      const double fastest = predict_exec_time(op, p.max_triplet(), p).t_exe;
      const std::optional<double> budgets[] = {std::nullopt, fastest * 3.0, fastest * 1.05};
      for (const auto& budget : budgets) {
        ++cases;
        std::optional<FrequencyTriplet> best;
        double best_e = std::numeric_limits<double>::infinity();
        for (Hz cpu : p.levels.cpu) {
          for (Hz gpu : p.levels.gpu) {
            for (Hz mem : p.levels.mem) {
              const FrequencyTriplet f{cpu, gpu, mem};
              if (budget && predict_exec_time(op, f, p).t_exe > *budget) continue;
              const double e = predict_energy(op, f, temp, p);
              if (!best || e < best_e || (e == best_e && earlier(f, *best))) {
                best = f;
                best_e = e;
              }
            }
          }
        }
        const FrequencyTriplet got = budget ? optimal_triplet(op, temp, p, *budget)
                                            : optimal_triplet(op, temp, p);
        c.expect(best && got == *best, std::string(name) + "/" + op.id);
      }
    }
  }
  c.note(std::to_string(cases) + " operator/budget cases");
  return c.outcome();
}

Outcome partition_invariants() {
  Checker c;
  const auto& p = profile();
  const double n_values[] = {1.0, 2.0, 5.0, 10.0};
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto g = random_graph(1 + seed % 64, seed);
    const std::string tag = "seed " + std::to_string(seed);
    PartitionConfig cfg;
    cfg.n_factor = n_values[seed % 4];
    const Schedule s = partition(g, p, cfg, p.t_ambient);

    std::vector<std::string> ids;
    std::size_t first = 0;
    for (const auto& b : s.blocks) {
      c.expect(!b.ops.empty(), tag + ": empty block");
      c.expect(b.first == first, tag + ": block offset");
      first += b.ops.size();
      for (const auto& op : b.ops) ids.push_back(op.id);
    }
    std::vector<std::string> expected;
    for (const auto& op : g.operators()) expected.push_back(op.id);
    c.expect(ids == expected, tag + ": coverage/order");

    for (std::size_t i = 0; i + 1 < s.blocks.size(); ++i) {
      const auto& b = s.blocks[i];
      c.expect(block_exec_time(b.ops, b.f_block, p) >= cfg.n_factor * p.t_switch_base,
               tag + ": short non-final block");
    }
    c.expect(partition(g, p, cfg, p.t_ambient) == s, tag + ": nondeterministic");

    PartitionConfig inf;
    inf.n_factor = PartitionConfig::kInfinity;
    c.expect(partition(g, p, inf, p.t_ambient).blocks.size() == 1, tag + ": N=inf");
  }
  c.note("500 graphs");
  return c.outcome();
}

Outcome dp_dominance() {
  Checker c;
  const auto& p = profile();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = random_graph(1 + seed % 8, 1000 + seed);
    const double dp = schedule_energy(dp_optimal_partition(g, p, {}, p.t_ambient), p, p.t_ambient);
    const double greedy = schedule_energy(partition(g, p, {}, p.t_ambient), p, p.t_ambient);
    c.expect(rel_le(dp, greedy), "seed " + std::to_string(seed));
    worst = std::max(worst, greedy > 0 ? dp / greedy : 0.0);
  }
  c.note("max dp/greedy " + fmt(worst, 6));
  return c.outcome();
}

Outcome fixture_block_counts() {
  Checker c;
  const std::pair<const char*, std::size_t> expected[] = {
      {"resnet18", 2}, {"resnet101", 16}, {"vit_b16", 8}, {"vit_l16", 12}};
  std::string counts;
  for (const auto& [name, want] : expected) {
    const auto g = fixture(name);
    const auto s = partition(g, profile(), {}, profile().t_ambient);
    c.expect(s.blocks.size() == want,
             std::string(name) + " gave " + std::to_string(s.blocks.size()));
    counts += (counts.empty() ? "" : " ") + std::to_string(g.size()) + "->" +
              std::to_string(s.blocks.size());
  }
  c.note(counts);
  return c.outcome();
}

Outcome stall_reduction() {
  Checker c;
  struct Target {
    const char* name;
    double serial_ms;
    double lookahead_ms;
  };
  const Target targets[] = {{"resnet18", 7.23, 0.12},
                            {"resnet101", 10.81, 1.45},
                            {"vit_b16", 5.44, 0.72},
                            {"vit_l16", 7.92, 1.08}};
  auto within = [](double got, double want) { return std::abs(got - want) <= 0.2 * want; };
  std::string pairs;
  for (const auto& t : targets) {
    const auto g = fixture(t.name);
    const auto serial = simulate(g, profile(), policy(PolicyKind::sparse_dvfs_serial), {}, ambient());
    const auto look = simulate(g, profile(),
                               policy(PolicyKind::sparse_dvfs_lookahead, fixture_lead(t.name)), {},
                               ambient());
    const double s_ms = serial.total_switch_stall * 1e3;
    const double l_ms = look.total_switch_stall * 1e3;
    c.expect(within(s_ms, t.serial_ms), std::string(t.name) + " serial " + fmt(s_ms));
    c.expect(within(l_ms, t.lookahead_ms), std::string(t.name) + " look-ahead " + fmt(l_ms));
    pairs += (pairs.empty() ? "" : " ") + std::string("(") + fmt(s_ms) + "->" + fmt(l_ms) + ")";
  }
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto g = random_graph(1 + seed % 64, seed);
    const auto serial = simulate(g, profile(), policy(PolicyKind::sparse_dvfs_serial), {}, ambient());
    for (std::optional<double> lead : {std::optional<double>{}, std::optional<double>{0.002}}) {
      const auto look =
          simulate(g, profile(), policy(PolicyKind::sparse_dvfs_lookahead, lead), {}, ambient());
      c.expect(look.total_switch_stall <= serial.total_switch_stall &&
                   look.makespan <= serial.makespan,
               "random seed " + std::to_string(seed));
    }
  }
  c.note("ms " + pairs + "; 500 random graphs");
  return c.outcome();
}

Outcome switching_ratios() {
  Checker c;
  const std::pair<const char*, double> targets[] = {{"resnet18", 7.0}, {"vit_b16", 8.5}};
  std::string got;
  for (const auto& [name, floor] : targets) {
    const auto g = fixture(name);
    const auto& p = profile();
    const double op_level = switching_totals(operator_level_schedule(g, p, {}, p.t_ambient), p);
    const double block_level = switching_totals(partition(g, p, {}, p.t_ambient), p);
    const double ratio = block_level > 0 ? op_level / block_level
                                         : std::numeric_limits<double>::infinity();
    c.expect(ratio >= floor, std::string(name) + " ratio " + fmt(ratio));
    got += (got.empty() ? "" : " ") + std::string(name) + " " + fmt(ratio) + "x";
  }
  c.note(got);
  return c.outcome();
}

Outcome governor_properties() {
  Checker c;
  const auto& p = profile();
  std::size_t blocks = 0;
  for (const char* name : ts::kFixtures) {
    const auto s = partition(fixture(name), p, {}, p.t_ambient);
    for (const auto& b : s.blocks) {
      ++blocks;
      const auto mc = coordinate_memory(b, p);
      c.expect(block_exec_time(b.ops, mc.triplet, p) <= block_exec_time(b.ops, b.f_block, p),
               std::string(name) + ": t_block grew");
    }
  }

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> n_dist(1.0, 10.0);
  std::vector<double> leads;
  for (int i = 0; i <= 40; ++i) leads.push_back(i * 0.0005);
  for (std::uint64_t k = 0; k < 200; ++k) {
    PartitionConfig cfg;
    cfg.n_factor = n_dist(rng);
    const auto g = random_graph(2 + k % 63, 5000 + k);
    const auto s = coordinate_schedule(partition(g, p, cfg, p.t_ambient), p);
    double prev = std::numeric_limits<double>::infinity();
    for (double lead : leads) {
      const double stall = plan_lookahead(s, p, lead).total_stall;
      c.expect(stall <= prev, "schedule " + std::to_string(k) + " lead " + fmt(lead));
      prev = stall;
    }
    c.expect(plan_lookahead(s, p, std::nullopt).total_stall <= prev,
             "schedule " + std::to_string(k) + " block-start lead");
  }

  const auto alt = fixture("alternating_phases");
  const auto doc = ts::read_json(ts::data_path("scenarios/alternating_phases.json"));
  GovernorPolicy reactive = policy(PolicyKind::reactive_default);
  reactive.reactive.up_threshold = doc["policy"]["up"].get<double>();
  reactive.reactive.down_threshold = doc["policy"]["down"].get<double>();
  reactive.reactive.sampling_period = doc["policy"]["period"].get<double>();
  const auto trace = simulate(alt, p, reactive, {}, ambient());
  std::size_t lagging = 0;
  std::size_t phases = 0;
  std::set<std::string> seen;
  for (const auto& ev : trace.events) {
    if (ev.kind != EventKind::block_exec) continue;
    const auto& id = ev.op_id;
    if (id.size() < 6 || id.compare(id.size() - 6, 6, ".cpu.0") != 0) continue;
    if (!seen.insert(id).second) continue;
    ++phases;
    if (ev.triplet.cpu < p.levels.cpu.back()) ++lagging;
  }
  c.expect(lagging >= 1, "no CPU lag at a CPU-phase start");
  c.note(std::to_string(blocks) + " fixture blocks; 200 schedules; CPU below max at " +
         std::to_string(lagging) + "/" + std::to_string(phases) + " CPU-phase starts");
  return c.outcome();
}

Outcome thermal_model() {
  Checker c;
  const auto& p = profile();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dt(1e-4, 5.0);
  std::uniform_real_distribution<double> pw(0.5, 15.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ThermalState s0 = ThermalState::from_profile(p, 25.0 + (i % 40));
    const double a = dt(rng);
    const double b = dt(rng);
    const double power = pw(rng);
    const double two = thermal_update(thermal_update(s0, power, a), power, b).temp;
    const double one = thermal_update(s0, power, a + b).temp;
    worst = std::max(worst, std::abs(two - one) / std::abs(one));
  }
  c.expect(worst < 1e-9, "composition error " + fmt(worst));

  for (double power : {1.0, 7.5, 14.0}) {
    const auto s = thermal_update(ThermalState::from_profile(p, 30.0), power, 1e4 * p.tau_th);
    const double want = p.t_ambient + p.r_th * power;
    c.expect(std::abs(s.temp - want) <= 1e-9 * want, "steady state at " + fmt(power) + " W");
  }

  const auto doc = ts::read_json(ts::data_path("scenarios/vit_b16_sustained.json"));
  SimOptions opts;
  opts.iterations = doc["sim"]["iterations"].get<std::size_t>();
  opts.throttle_limit = doc["thermal"]["limit"].get<double>();
  const auto g = fixture("vit_b16");
  const auto hot = simulate(g, p, policy(PolicyKind::max_static), {}, ambient(), opts);
  const auto cool = simulate(g, p, policy(PolicyKind::sparse_dvfs_lookahead), {}, ambient(), opts);
  c.expect(hot.limit_crossing_time.has_value(), "max_static never crossed the limit");
  c.expect(hot.limit_crossing_time &&
               (!cool.limit_crossing_time || *cool.limit_crossing_time > *hot.limit_crossing_time),
           "look-ahead crossed first");
  c.note("composition " + fmt(worst, 3) + "; max_static crosses at " +
         (hot.limit_crossing_time ? fmt(*hot.limit_crossing_time) + " s" : "never") +
         ", look-ahead " +
         (cool.limit_crossing_time ? fmt(*cool.limit_crossing_time) + " s" : "never"));
  return c.outcome();
}

// An undefined ratio (no energy gain) ranks worse than any defined one.
double ratio_or_inf(const ExecutionTrace& t, const ExecutionTrace& base) {
  if (!(energy_efficiency_gain(t, base) > 0.0)) return std::numeric_limits<double>::infinity();
  return cost_gain_ratio(t, base);
}

Outcome end_to_end_ordering() {
  Checker c;
  const auto& p = profile();
  std::string ratios;
  for (const char* name : ts::kFixtures) {
    const auto g = fixture(name);
    const auto run = [&](PolicyKind k) {
      return simulate(g, p, policy(k, fixture_lead(name)), {}, ambient());
    };
    const auto look = run(PolicyKind::sparse_dvfs_lookahead);
    const auto reactive = run(PolicyKind::reactive_default);
    const auto max_static = run(PolicyKind::max_static);
    const auto op_serial = run(PolicyKind::operator_level_serial);
    const std::string n(name);
    c.expect(look.total_energy < reactive.total_energy, n + ": energy vs reactive");
    c.expect(look.total_energy < max_static.total_energy, n + ": energy vs max_static");
    c.expect(max_static.makespan <= look.makespan, n + ": makespan vs max_static");
    const double r_look = ratio_or_inf(look, reactive);
    const double r_op = ratio_or_inf(op_serial, reactive);
    c.expect(r_look < r_op, n + ": cost-gain " + fmt(r_look) + " vs " + fmt(r_op));
    ratios += (ratios.empty() ? "" : " ") + n + " " + fmt(r_look) + "<" + fmt(r_op);
  }
  c.note("cost-gain vs reactive_default: " + ratios);
  return c.outcome();
}

Outcome n_sweep_u_shape() {
  Checker c;
  const double ns[] = {1, 2, 3, 5, 8, 10, 20};
  const auto rows = sweep_n(fixture("vit_l16"), profile(),
                            policy(PolicyKind::sparse_dvfs_lookahead, fixture_lead("vit_l16")), {},
                            ambient(), ns);
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].energy < rows[best].energy) best = i;
  }
  c.expect(best > 0 && best + 1 < rows.size(), "minimum at the sweep edge");
  c.note("minimum at N=" + fmt(rows[best].n) + " (" + fmt(rows[best].energy, 6) + " J)");
  return c.outcome();
}

struct Criterion {
  int id;
  const char* title;
  double limit_s;  // 0 = no runtime limit
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-failure" && i + 1 < argc) {
      known.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--known-failure <criterion>]...\n", argv[0]);
      return 2;
    }
  }

  const Criterion criteria[] = {
      {1, "latency/power formulas match an independent evaluation", 5, latency_and_power_exact},
      {2, "optimal triplet equals exhaustive argmin", 10, optimal_triplet_oracle},
      {3, "partition invariants on random graphs", 30, partition_invariants},
      {4, "DP oracle never worse than greedy", 30, dp_dominance},
      {5, "fixture block counts at N=5", 0, fixture_block_counts},
      {6, "serial vs look-ahead switching stall", 0, stall_reduction},
      {7, "operator-level / block-level switching ratio", 0, switching_ratios},
      {8, "governor properties", 0, governor_properties},
      {9, "thermal model", 0, thermal_model},
      {10, "end-to-end policy ordering", 0, end_to_end_ordering},
      {11, "U-shaped energy vs N", 0, n_sweep_u_shape},
  };

  int unexpected = 0;
  for (const auto& crit : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = crit.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (crit.limit_s > 0 && secs > crit.limit_s) {
      out.pass = false;
      out.detail += " [over the " + fmt(crit.limit_s) + " s limit]";
    }
    const bool tolerated = !out.pass && known.count(crit.id);
    if (!out.pass && !tolerated) ++unexpected;
    std::printf("%s C%-2d %-55s %7.3f s  %s%s\n", out.pass ? "PASS" : "FAIL", crit.id, crit.title,
                secs, out.detail.c_str(), tolerated ? " (known failure)" : "");
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
