// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "report.hpp"
#include "scenario.hpp"

namespace blockdvfs::cli {

enum class Format { json, csv };

/// Flag values as given on the command line; flags override the scenario.
struct Request {
  std::optional<std::string> scenario;
  std::optional<std::string> graph;  // path or "random:<ops>"
  std::optional<std::string> profile;
  std::vector<std::string> policies;
  std::optional<std::string> baseline;
  std::vector<std::string> n;  // numbers or "inf"
  std::optional<double> eps;
  std::optional<std::string> out;
  Format format = Format::json;
  std::uint64_t seed = 0;
};

/// Scenario with flag overrides applied. Throws if no graph or profile.
Scenario resolve(const Request& req);

// Each command writes data to `out` (or to --out) and throws on any error.
void cmd_partition(const Request& req, std::ostream& out);
void cmd_simulate(const Request& req, std::ostream& out);
RunReport cmd_compare(const Request& req, std::ostream& out);
std::vector<SweepRow> cmd_sweep(const Request& req, std::ostream& out);
void cmd_validate(const Request& req, std::ostream& out);

}  // namespace blockdvfs::cli
