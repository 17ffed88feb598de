// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blockdvfs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "blockdvfs/error.hpp"
#include "json_util.hpp"

namespace blockdvfs {

using nlohmann::json;

namespace {

constexpr std::pair<OpKind, std::string_view> kKindNames[] = {
    {OpKind::conv, "conv"},
    {OpKind::linear, "linear"},
    {OpKind::activation, "activation"},
    {OpKind::normalization, "normalization"},
    {OpKind::attention, "attention"},
    {OpKind::other, "other"},
};

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

// Kahn's algorithm over positions in `ops`; the ready set is ordered by
// position so ties resolve to the earlier operator.
std::vector<std::size_t> kahn_order(const std::vector<Operator>& ops,
                                    const std::vector<Edge>& edges,
                                    const std::map<std::string, std::size_t, std::less<>>& index) {
  const std::size_t n = ops.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& [from, to] : edges) {
    const std::size_t u = index.find(from)->second;
    const std::size_t v = index.find(to)->second;
    succ[u].push_back(v);
    ++indegree[v];
  }

  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t u = ready.top();
    ready.pop();
    order.push_back(u);
    for (std::size_t v : succ[u]) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  if (order.size() != n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (indegree[i] != 0) {
        throw ValidationError(ops[i].id, "cycle detected through operator '" + ops[i].id + "'");
      }
    }
  }
  return order;
}

}  // namespace

std::string_view to_string(OpKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "other";
}

OpKind op_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw ParseError("unknown operator kind '" + std::string(name) + "'");
}

void validate_operator(const Operator& op) {
  auto fail = [&](const std::string& what) {
    throw ValidationError(op.id, "operator '" + op.id + "': " + what);
  };
  if (op.id.empty()) throw ValidationError("", "operator with empty id");
  if (!std::isfinite(op.w_comp) || op.w_comp < 0.0) fail("w_comp must be finite and >= 0");
  if (!std::isfinite(op.d_mem) || op.d_mem < 0.0) fail("d_mem must be finite and >= 0");
  if (op.w_comp == 0.0 && op.d_mem == 0.0) fail("w_comp and d_mem are both zero");
  if (!in_unit_interval(op.s_comp)) fail("s_comp outside [0,1]");
  if (!in_unit_interval(op.s_mem)) fail("s_mem outside [0,1]");
  if (op.structured && op.s_mem > op.s_comp) fail("structured operator has s_mem > s_comp");
}

ComputationGraph::ComputationGraph(std::string name, std::vector<Operator> operators,
                                   std::vector<Edge> edges)
    : name_(std::move(name)), edges_(std::move(edges)) {
  std::map<std::string, std::size_t, std::less<>> given;
  for (std::size_t i = 0; i < operators.size(); ++i) {
    validate_operator(operators[i]);
    if (!given.emplace(operators[i].id, i).second) {
      throw ValidationError(operators[i].id, "duplicate operator id '" + operators[i].id + "'");
    }
  }
  for (const auto& [from, to] : edges_) {
    for (const auto* end : {&from, &to}) {
      if (!given.contains(*end)) {
        throw ValidationError(*end, "dangling edge endpoint '" + *end + "'");
      }
    }
    if (from == to) throw ValidationError(from, "self-loop on operator '" + from + "'");
  }

  const auto order = kahn_order(operators, edges_, given);
  operators_.reserve(order.size());
  for (std::size_t pos : order) {
    index_.emplace(operators[pos].id, operators_.size());
    operators_.push_back(std::move(operators[pos]));
  }
}

std::size_t ComputationGraph::index_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw ValidationError(std::string(id), "unknown operator id '" + std::string(id) + "'");
  }
  return it->second;
}

bool ComputationGraph::contains(std::string_view id) const { return index_.find(id) != index_.end(); }

ComputationGraph ComputationGraph::with_sparsity(std::size_t index, double s_comp,
                                                 double s_mem) const {
  ComputationGraph copy = *this;
  Operator& op = copy.operators_.at(index);
  op.s_comp = s_comp;
  op.s_mem = s_mem;
  validate_operator(op);
  return copy;
}

ComputationGraph parse_graph(const json& doc) {
  if (!doc.is_object()) throw ParseError("graph document must be a JSON object");
  const std::string name = doc.value("name", std::string("graph"));
  if (!doc.contains("operators") || !doc["operators"].is_array()) {
    throw ParseError("graph document lacks an 'operators' array");
  }

  std::vector<Operator> ops;
  for (const auto& item : doc["operators"]) {
    if (!item.is_object()) throw ParseError("operator entry must be an object");
    Operator op;
    op.id = detail::require<std::string>(item, "id", "operator");
    const std::string where = "operator '" + op.id + "'";
    op.kind = op_kind_from_string(item.value("kind", std::string("other")));
    op.w_comp = detail::require<double>(item, "w_comp", where);
    op.d_mem = detail::require<double>(item, "d_mem", where);
    op.s_comp = detail::require<double>(item, "s_comp", where);
    op.structured = detail::optional<bool>(item, "structured", where).value_or(false);
    op.s_mem = detail::optional<double>(item, "s_mem", where)
                   .value_or(op.structured ? op.s_comp : 0.0);
    ops.push_back(std::move(op));
  }

  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw ParseError("'edges' must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        throw ParseError("edge must be a [from, to] pair of ids");
      }
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
  return ComputationGraph(name, std::move(ops), std::move(edges));
}

json graph_to_json(const ComputationGraph& graph) {
  json ops = json::array();
  for (const auto& op : graph.operators()) {
    ops.push_back({{"id", op.id},
                   {"kind", std::string(to_string(op.kind))},
                   {"w_comp", op.w_comp},
                   {"d_mem", op.d_mem},
                   {"s_comp", op.s_comp},
                   {"s_mem", op.s_mem},
                   {"structured", op.structured}});
  }
  json edges = json::array();
  for (const auto& [from, to] : graph.edges()) edges.push_back({from, to});
  return {{"name", graph.name()}, {"operators", std::move(ops)}, {"edges", std::move(edges)}};
}

ComputationGraph load_graph(const std::filesystem::path& path) {
  return parse_graph(detail::read_json_file(path));
}

void save_graph(const ComputationGraph& graph, const std::filesystem::path& path) {
  detail::write_text_file(path, graph_to_json(graph).dump(2) + "\n");
}

std::vector<Operator> topo_order(const ComputationGraph& graph) { return graph.operators(); }

SparsityTrace parse_trace(const json& doc) {
  if (!doc.is_array()) throw ParseError("sparsity trace must be a JSON array of records");
  SparsityTrace trace;
  for (const auto& rec : doc) {
    if (!rec.is_object()) throw ParseError("trace record must be an object");
    SparsityTrace::Record record;
    for (const auto& [id, pair] : rec.items()) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
        throw ParseError("trace entry '" + id + "' must be [s_comp, s_mem]");
      }
      const double s_comp = pair[0].get<double>();
      const double s_mem = pair[1].get<double>();
      if (!in_unit_interval(s_comp) || !in_unit_interval(s_mem)) {
        throw ValidationError(id, "trace entry '" + id + "' has sparsity outside [0,1]");
      }
      record.emplace(id, std::make_pair(s_comp, s_mem));
    }
    trace.records.push_back(std::move(record));
  }
  return trace;
}

SparsityTrace load_trace(const std::filesystem::path& path) {
  return parse_trace(detail::read_json_file(path));
}

void validate_trace(const ComputationGraph& graph, const SparsityTrace& trace) {
  for (const auto& record : trace.records) {
    for (const auto& [id, values] : record) {
      if (!graph.contains(id)) {
        throw ValidationError(id, "trace references unknown operator '" + id + "'");
      }
    }
  }
}

ComputationGraph apply_trace(const ComputationGraph& graph, const SparsityTrace& trace,
                             std::size_t sample_index) {
  if (sample_index >= trace.size()) {
    throw DomainError("trace sample index " + std::to_string(sample_index) +
                      " out of range (trace has " + std::to_string(trace.size()) + " records)");
  }
  ComputationGraph out = graph;
  for (const auto& [id, values] : trace.records[sample_index]) {
    out = out.with_sparsity(graph.index_of(id), values.first, values.second);
  }
  return out;
}

double arithmetic_intensity(const Operator& op) {
  const double bytes = op.effective_bytes();
  if (!(bytes > 0.0)) {
    throw DomainError("arithmetic intensity undefined for operator '" + op.id +
                      "': effective data volume is zero");
  }
  return op.effective_work() / bytes;
}

ComputationGraph random_graph(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_work(7.0, 10.0);
  std::uniform_real_distribution<double> intensity_exp(-0.5, 2.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  constexpr OpKind kinds[] = {OpKind::conv, OpKind::linear, OpKind::activation,
                              OpKind::normalization, OpKind::attention};

  std::vector<Operator> ops;
  ops.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Operator op;
    op.id = "op" + std::to_string(i);
    op.kind = kinds[rng() % std::size(kinds)];
    op.w_comp = std::pow(10.0, log_work(rng));
    op.d_mem = op.w_comp / std::pow(10.0, intensity_exp(rng));
    op.s_comp = std::round(unit(rng) * 100.0) / 100.0;
    op.structured = coin(rng);
    op.s_mem = op.structured ? op.s_comp * unit(rng) : 0.0;
    ops.push_back(std::move(op));
  }

  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v) {
    edges.emplace_back(ops[v - 1].id, ops[v].id);
    if (v >= 2 && coin(rng)) {
      const std::size_t u = rng() % (v - 1);
      edges.emplace_back(ops[u].id, ops[v].id);
    }
  }
  return ComputationGraph("random_" + std::to_string(n) + "_" + std::to_string(seed),
                          std::move(ops), std::move(edges));
}

}  // namespace blockdvfs
