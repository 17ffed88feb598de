// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockdvfs/partitioner.hpp"
#include "blockdvfs/sim.hpp"

namespace blockdvfs::cli {

// First line of every CSV we emit; bump the version when columns change.
inline constexpr const char* kTraceCsvTag = "# blockdvfs-trace v1";
inline constexpr const char* kReportCsvTag = "# blockdvfs-report v1";
inline constexpr const char* kSweepCsvTag = "# blockdvfs-sweep v1";
inline constexpr const char* kScheduleCsvTag = "# blockdvfs-schedule v1";

struct SummaryRow {
  std::string policy;
  double makespan = 0.0;
  double energy = 0.0;
  double mean_power = 0.0;
  double switch_stall = 0.0;
  std::size_t block_count = 0;
  double peak_temp = 0.0;
};

struct DerivedRow {
  std::string policy;
  std::string baseline;
  double efficiency_gain = 0.0;
  /// Unset when the policy does not save energy (ratio undefined).
  std::optional<double> cost_gain_ratio;
};

struct RunReport {
  nlohmann::json scenario;
  std::vector<SummaryRow> rows;
  std::vector<DerivedRow> derived;  // one per non-baseline policy
};

SummaryRow summarize(const ExecutionTrace& trace);

/// `runs` must contain the baseline policy.
RunReport make_report(const nlohmann::json& scenario,
                      const std::vector<ExecutionTrace>& runs, const std::string& baseline);

nlohmann::json report_to_json(const RunReport& report);
std::string report_to_csv(const RunReport& report);

/// One row per event, then one summary row per run.
std::string traces_to_csv(const std::vector<ExecutionTrace>& traces);

nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

std::string schedule_to_csv(const Schedule& schedule);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

}  // namespace blockdvfs::cli
