// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace blockdvfs {

enum class OpKind { conv, linear, activation, normalization, attention, other };

std::string_view to_string(OpKind kind);
OpKind op_kind_from_string(std::string_view name);

/// One node of an annotated computation graph.
///
/// `w_comp` is the theoretical workload in FLOPs and `d_mem` the total data
/// volume in bytes. `s_comp` is the fraction of the workload that can be
/// skipped because of zero activations, `s_mem` the fraction of the data
/// volume that need not be moved.
struct Operator {
  std::string id;
  OpKind kind = OpKind::other;
  double w_comp = 0.0;
  double d_mem = 0.0;
  double s_comp = 0.0;
  double s_mem = 0.0;
  bool structured = false;

  double effective_work() const { return w_comp * (1.0 - s_comp); }
  double effective_bytes() const { return d_mem * (1.0 - s_mem); }

  friend bool operator==(const Operator&, const Operator&) = default;
};

/// Throws ValidationError (subject = operator id) on invariant violation.
void validate_operator(const Operator& op);

using Edge = std::pair<std::string, std::string>;

/// A validated DAG whose `operators` are stored in topological order.
class ComputationGraph {
 public:
  ComputationGraph() = default;

  /// Validates operators and edges, then reorders operators topologically
  /// (ties broken by the order given here).
  ComputationGraph(std::string name, std::vector<Operator> operators,
                   std::vector<Edge> edges);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Operator>& operators() const noexcept { return operators_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return operators_.size(); }

  /// Position of `id` in the stored order; throws ValidationError if absent.
  std::size_t index_of(std::string_view id) const;
  bool contains(std::string_view id) const;
  const Operator& at(std::string_view id) const { return operators_[index_of(id)]; }

  /// Copy with one operator's sparsity replaced. Keeps order and edges.
  ComputationGraph with_sparsity(std::size_t index, double s_comp, double s_mem) const;

  friend bool operator==(const ComputationGraph&, const ComputationGraph&) = default;

 private:
  std::string name_;
  std::vector<Operator> operators_;
  std::vector<Edge> edges_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Per-input sparsity overrides: one record per input sample, each mapping
/// operator id to (s_comp, s_mem).
struct SparsityTrace {
  using Record = std::map<std::string, std::pair<double, double>, std::less<>>;
  std::vector<Record> records;

  std::size_t size() const noexcept { return records.size(); }
};

ComputationGraph parse_graph(const nlohmann::json& doc);
nlohmann::json graph_to_json(const ComputationGraph& graph);
ComputationGraph load_graph(const std::filesystem::path& path);
void save_graph(const ComputationGraph& graph, const std::filesystem::path& path);

/// Deterministic topological order; ties go to the operator listed first.
std::vector<Operator> topo_order(const ComputationGraph& graph);

SparsityTrace parse_trace(const nlohmann::json& doc);
SparsityTrace load_trace(const std::filesystem::path& path);

/// Checks every id in `trace` against `graph`.
void validate_trace(const ComputationGraph& graph, const SparsityTrace& trace);

/// Graph copy with sparsities overridden by record `sample_index`.
ComputationGraph apply_trace(const ComputationGraph& graph, const SparsityTrace& trace,
                             std::size_t sample_index);

/// Effective FLOPs per effective byte.
double arithmetic_intensity(const Operator& op);

/// Random DAG with `n` operators, used by property tests and the CLI's
/// `--seed` generator. Edges only point forward in creation order.
ComputationGraph random_graph(std::size_t n, std::uint64_t seed);

}  // namespace blockdvfs
