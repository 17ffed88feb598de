// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "blockdvfs/error.hpp"

namespace blockdvfs::cli {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

SummaryRow summarize(const ExecutionTrace& trace) {
  return {trace.policy,      trace.makespan,    trace.total_energy, trace.mean_power(),
          trace.total_switch_stall, trace.block_count, trace.peak_temp};
}

RunReport make_report(const nlohmann::json& scenario, const std::vector<ExecutionTrace>& runs,
                      const std::string& baseline) {
  RunReport report;
  report.scenario = scenario;
  const ExecutionTrace* base = nullptr;
  for (const auto& r : runs) {
    report.rows.push_back(summarize(r));
    if (r.policy == baseline) base = &r;
  }
  if (!base) throw ValidationError("baseline", "baseline '" + baseline + "' is not among the policies");
  for (const auto& r : runs) {
    if (r.policy == baseline) continue;
    DerivedRow d;
    d.policy = r.policy;
    d.baseline = baseline;
    d.efficiency_gain = energy_efficiency_gain(r, *base);
    if (d.efficiency_gain > 0.0) d.cost_gain_ratio = cost_gain_ratio(r, *base);
    report.derived.push_back(std::move(d));
  }
  return report;
}

nlohmann::json report_to_json(const RunReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"policy", r.policy},
                    {"makespan", r.makespan},
                    {"energy", r.energy},
                    {"mean_power", r.mean_power},
                    {"switch_stall", r.switch_stall},
                    {"block_count", r.block_count},
                    {"peak_temp", r.peak_temp}});
  }
  nlohmann::json derived = nlohmann::json::array();
  for (const auto& d : report.derived) {
    nlohmann::json j = {{"policy", d.policy},
                        {"baseline", d.baseline},
                        {"efficiency_gain", d.efficiency_gain},
                        {"cost_gain_ratio", nullptr}};
    if (d.cost_gain_ratio) j["cost_gain_ratio"] = *d.cost_gain_ratio;
    derived.push_back(std::move(j));
  }
  return {{"scenario", report.scenario}, {"summary", std::move(rows)}, {"derived", std::move(derived)}};
}

std::string report_to_csv(const RunReport& report) {
  std::ostringstream out;
  out << kReportCsvTag << '\n'
      << "record,policy,baseline,makespan,energy,mean_power,switch_stall,block_count,peak_temp,"
         "efficiency_gain,cost_gain_ratio\n";
  for (const auto& r : report.rows) {
    out << "summary," << r.policy << ",," << format_double(r.makespan) << ','
        << format_double(r.energy) << ',' << format_double(r.mean_power) << ','
        << format_double(r.switch_stall) << ',' << r.block_count << ','
        << format_double(r.peak_temp) << ",,\n";
  }
  for (const auto& d : report.derived) {
    out << "derived," << d.policy << ',' << d.baseline << ",,,,,,,"
        << format_double(d.efficiency_gain) << ','
        << (d.cost_gain_ratio ? format_double(*d.cost_gain_ratio) : "") << '\n';
  }
  return out.str();
}

std::string traces_to_csv(const std::vector<ExecutionTrace>& traces) {
  std::ostringstream out;
  out << kTraceCsvTag << '\n'
      << "record,run,policy,iteration,t_start,t_end,kind,block_index,op_id,f_cpu,f_gpu,f_mem,"
         "power,temp_end,makespan,energy,switch_stall,peak_temp,block_count\n";
  for (std::size_t run = 0; run < traces.size(); ++run) {
    const auto& t = traces[run];
    for (const auto& ev : t.events) {
      out << "event," << run << ',' << t.policy << ',' << ev.iteration << ','
          << format_double(ev.t_start) << ',' << format_double(ev.t_end) << ','
          << to_string(ev.kind) << ','
          << (ev.block_index ? std::to_string(*ev.block_index) : "") << ',' << csv_field(ev.op_id) << ','
          << ev.triplet.cpu << ',' << ev.triplet.gpu << ',' << ev.triplet.mem << ','
          << format_double(ev.power) << ',' << format_double(ev.temp_end) << ",,,,,\n";
    }
  }
  for (std::size_t run = 0; run < traces.size(); ++run) {
    const auto& t = traces[run];
    out << "summary," << run << ',' << t.policy << ",,,,,,,,,,,,"
        << format_double(t.makespan) << ',' << format_double(t.total_energy) << ','
        << format_double(t.total_switch_stall) << ',' << format_double(t.peak_temp) << ','
        << t.block_count << '\n';
  }
  return out.str();
}

nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"blocks", r.blocks},
                        {"makespan", r.makespan},
                        {"switch_stall", r.switch_stall},
                        {"energy", r.energy}};
    if (std::isinf(r.n)) j["n"] = "inf";
    else j["n"] = r.n;
    out.push_back(std::move(j));
  }
  return out;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepCsvTag << '\n' << "n,blocks,makespan,switch_stall,energy\n";
  for (const auto& r : rows) {
    out << format_double(r.n) << ',' << r.blocks << ',' << format_double(r.makespan) << ','
        << format_double(r.switch_stall) << ',' << format_double(r.energy) << '\n';
  }
  return out.str();
}

std::string schedule_to_csv(const Schedule& schedule) {
  std::ostringstream out;
  out << kScheduleCsvTag << '\n' << "block,first,ops,f_cpu,f_gpu,f_mem,t_block,op_ids\n";
  for (std::size_t b = 0; b < schedule.blocks.size(); ++b) {
    const auto& block = schedule.blocks[b];
    out << b << ',' << block.first << ',' << block.ops.size() << ',' << block.f_block.cpu << ','
        << block.f_block.gpu << ',' << block.f_block.mem << ',' << format_double(block.t_block)
        << ',';
    std::string ids;
    for (std::size_t i = 0; i < block.ops.size(); ++i) {
      ids += (i ? ";" : "") + block.ops[i].id;
    }
    out << csv_field(ids) << '\n';
  }
  return out.str();
}

}  // namespace blockdvfs::cli
