// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blockdvfs/device.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "blockdvfs/error.hpp"
#include "json_util.hpp"

namespace blockdvfs {

using nlohmann::json;

namespace {

Hz parse_hz(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<Hz>();
  if (v.is_number_integer() && v.get<std::int64_t>() > 0) return static_cast<Hz>(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d > 0.0 && std::floor(d) == d && d < 1e15) return static_cast<Hz>(d);
  }
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    std::size_t used = 0;
    try {
      const auto value = std::stoull(s, &used);
      if (used == s.size()) return value;
    } catch (const std::exception&) {
    }
  }
  throw ParseError(where + ": expected a positive integer frequency in Hz");
}

std::vector<Hz> parse_levels(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) {
    throw ParseError(std::string("profile: missing level array '") + key + "'");
  }
  std::vector<Hz> out;
  for (const auto& v : *it) out.push_back(parse_hz(v, key));
  return out;
}

// Reads {"<hz>": value, ...} into a vector aligned with `levels`.
std::vector<double> parse_level_map(const json& obj, const std::vector<Hz>& levels,
                                    const std::string& where, bool all_required) {
  if (!obj.is_object()) throw ParseError(where + " must be an object keyed by frequency");
  std::vector<double> out(levels.size(), all_required ? std::nan("") : 0.0);
  for (const auto& [key, value] : obj.items()) {
    const Hz f = parse_hz(json(key), where);
    const auto pos = std::find(levels.begin(), levels.end(), f);
    if (pos == levels.end()) {
      throw ValidationError(where + "/" + key, where + ": key " + key + " is not a table level");
    }
    if (!value.is_number()) throw ParseError(where + "/" + key + " must be a number");
    out[static_cast<std::size_t>(pos - levels.begin())] = value.get<double>();
  }
  if (all_required) {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (std::isnan(out[i])) {
        const auto k = std::to_string(levels[i]);
        throw ValidationError(where + "/" + k, where + ": missing entry for level " + k);
      }
    }
  }
  return out;
}

std::vector<double> parse_pair_map(const json& obj, const std::vector<Hz>& rows,
                                   const std::vector<Hz>& cols, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be an object keyed by \"a/b\"");
  std::vector<double> out(rows.size() * cols.size(), std::nan(""));
  for (const auto& [key, value] : obj.items()) {
    const auto slash = key.find('/');
    if (slash == std::string::npos) throw ParseError(where + ": key '" + key + "' is not \"a/b\"");
    const Hz a = parse_hz(json(key.substr(0, slash)), where);
    const Hz b = parse_hz(json(key.substr(slash + 1)), where);
    const auto ra = std::find(rows.begin(), rows.end(), a);
    const auto cb = std::find(cols.begin(), cols.end(), b);
    if (ra == rows.end() || cb == cols.end()) {
      throw ValidationError(where + "/" + key, where + ": key " + key + " is not a level pair");
    }
    if (!value.is_number()) throw ParseError(where + "/" + key + " must be a number");
    out[static_cast<std::size_t>(ra - rows.begin()) * cols.size() +
        static_cast<std::size_t>(cb - cols.begin())] = value.get<double>();
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (std::isnan(out[i * cols.size() + j])) {
        const auto k = std::to_string(rows[i]) + "/" + std::to_string(cols[j]);
        throw ValidationError(where + "/" + k, where + ": missing entry " + k);
      }
    }
  }
  return out;
}

PerComponent<double> parse_per_component(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_object()) {
    throw ParseError(std::string("profile: missing per-component object '") + key + "'");
  }
  PerComponent<double> out;
  for (Component c : kComponents) {
    out[c] = detail::require<double>(*it, std::string(to_string(c)).c_str(),
                                     std::string("profile/") + key);
  }
  return out;
}

json level_map_json(const std::vector<Hz>& levels, const std::vector<double>& values,
                    bool skip_zero) {
  json out = json::object();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (skip_zero && values[i] == 0.0) continue;
    out[std::to_string(levels[i])] = values[i];
  }
  return out;
}

json pair_map_json(const std::vector<Hz>& rows, const std::vector<Hz>& cols,
                   const std::vector<double>& values) {
  json out = json::object();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out[std::to_string(rows[i]) + "/" + std::to_string(cols[j])] = values[i * cols.size() + j];
    }
  }
  return out;
}

json per_component_json(const PerComponent<double>& v) {
  return {{"cpu", v.cpu}, {"gpu", v.gpu}, {"mem", v.mem}};
}

void require_positive(double v, const std::string& subject) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(subject, "profile: " + subject + " must be finite and > 0");
  }
}

}  // namespace

std::string_view to_string(Component c) {
  switch (c) {
    case Component::cpu: return "cpu";
    case Component::gpu: return "gpu";
    case Component::mem: return "mem";
  }
  return "?";
}

std::string to_string(const FrequencyTriplet& f) {
  return "(" + std::to_string(f.cpu) + ", " + std::to_string(f.gpu) + ", " +
         std::to_string(f.mem) + ")";
}

FrequencyTriplet max(const FrequencyTriplet& a, const FrequencyTriplet& b) {
  return {std::max(a.cpu, b.cpu), std::max(a.gpu, b.gpu), std::max(a.mem, b.mem)};
}

std::size_t DeviceProfile::level_index(Component c, Hz f) const {
  const auto& table = levels[c];
  const auto it = std::lower_bound(table.begin(), table.end(), f);
  if (it == table.end() || *it != f) {
    throw UnknownLevelError("frequency " + std::to_string(f) + " Hz is not a " +
                            std::string(to_string(c)) + " level of profile '" + name + "'");
  }
  return static_cast<std::size_t>(it - table.begin());
}

bool DeviceProfile::has_level(Component c, Hz f) const {
  return std::binary_search(levels[c].begin(), levels[c].end(), f);
}

FrequencyTriplet DeviceProfile::min_triplet() const {
  return {levels.cpu.front(), levels.gpu.front(), levels.mem.front()};
}

FrequencyTriplet DeviceProfile::max_triplet() const {
  return {levels.cpu.back(), levels.gpu.back(), levels.mem.back()};
}

void DeviceProfile::check_triplet(const FrequencyTriplet& f) const {
  for (Component c : kComponents) level_index(c, f[c]);
}

void validate_profile(const DeviceProfile& p) {
  for (Component c : kComponents) {
    const auto& table = p.levels[c];
    const std::string name = std::string(to_string(c)) + "_levels";
    if (table.empty()) throw ValidationError(name, "profile: " + name + " is empty");
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i] == 0) throw ValidationError(name, "profile: " + name + " has a zero level");
      if (i > 0 && table[i] <= table[i - 1]) {
        throw ValidationError(name + "/" + std::to_string(table[i]),
                              "profile: " + name + " is not strictly increasing at " +
                                  std::to_string(table[i]));
      }
    }
    const auto& volts = p.voltage[c];
    const std::string vname = "voltage/" + std::string(to_string(c));
    if (volts.size() != table.size()) {
      throw ValidationError(vname, "profile: " + vname + " size does not match levels");
    }
    for (std::size_t i = 0; i < volts.size(); ++i) {
      const auto subject = vname + "/" + std::to_string(table[i]);
      require_positive(volts[i], subject);
      if (i > 0 && volts[i] < volts[i - 1]) {
        throw ValidationError(subject, "profile: " + vname + " decreases at " +
                                           std::to_string(table[i]));
      }
    }
    const std::string a = "alpha/" + std::string(to_string(c));
    if (!(p.alpha_min[c] >= 0.0) || !(p.alpha_min[c] <= p.alpha_max[c])) {
      throw ValidationError(a, "profile: " + a + " needs 0 <= alpha_min <= alpha_max");
    }
  }

  const std::size_t nc = p.levels.cpu.size();
  const std::size_t ng = p.levels.gpu.size();
  if (p.peak_perf.size() != nc * ng) {
    throw ValidationError("peak_perf", "profile: peak_perf must cover every cpu/gpu level pair");
  }
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < ng; ++j) {
      const double v = p.peak_perf_at(i, j);
      const auto subject =
          "peak_perf/" + std::to_string(p.levels.cpu[i]) + "/" + std::to_string(p.levels.gpu[j]);
      require_positive(v, subject);
      if ((i > 0 && v < p.peak_perf_at(i - 1, j)) || (j > 0 && v < p.peak_perf_at(i, j - 1))) {
        throw ValidationError(subject, "profile: peak_perf is not monotone at " + subject);
      }
    }
  }

  if (p.mem_bandwidth.size() != p.levels.mem.size()) {
    throw ValidationError("mem_bandwidth", "profile: mem_bandwidth must cover every mem level");
  }
  for (std::size_t i = 0; i < p.mem_bandwidth.size(); ++i) {
    const auto subject = "mem_bandwidth/" + std::to_string(p.levels.mem[i]);
    require_positive(p.mem_bandwidth[i], subject);
    if (i > 0 && p.mem_bandwidth[i] < p.mem_bandwidth[i - 1]) {
      throw ValidationError(subject, "profile: mem_bandwidth decreases at " + subject);
    }
  }

  require_positive(p.t_switch_base, "t_switch_base");
  if (p.t_switch_penalty.size() != ng) {
    throw ValidationError("t_switch_penalty", "profile: t_switch_penalty must align with gpu levels");
  }
  for (std::size_t j = 0; j < ng; ++j) {
    if (!(p.t_switch_penalty[j] >= 0.0)) {
      throw ValidationError("t_switch_penalty/" + std::to_string(p.levels.gpu[j]),
                            "profile: switching penalties must be >= 0");
    }
  }
  if (p.t_switch_matrix) {
    if (p.t_switch_matrix->size() != ng * ng) {
      throw ValidationError("t_switch_matrix", "profile: t_switch_matrix must be |gpu| x |gpu|");
    }
    for (std::size_t i = 0; i < ng; ++i) {
      for (std::size_t j = 0; j < ng; ++j) {
        require_positive((*p.t_switch_matrix)[i * ng + j],
                         "t_switch_matrix/" + std::to_string(p.levels.gpu[i]) + "/" +
                             std::to_string(p.levels.gpu[j]));
      }
    }
  }

  if (!(p.t_overhead >= 0.0) || !std::isfinite(p.t_overhead)) {
    throw ValidationError("t_overhead", "profile: t_overhead must be finite and >= 0");
  }
  if (!(p.k1 >= 0.0)) throw ValidationError("k1", "profile: k1 must be >= 0");
  if (!std::isfinite(p.k2)) throw ValidationError("k2", "profile: k2 must be finite");
  if (!(p.r_th >= 0.0)) throw ValidationError("r_th", "profile: r_th must be >= 0");
  require_positive(p.tau_th, "tau_th");
  if (!std::isfinite(p.t_ambient)) throw ValidationError("t_ambient", "profile: t_ambient must be finite");
  if (!(p.t_prefill >= 0.0)) throw ValidationError("t_prefill", "profile: t_prefill must be >= 0");
}

DeviceProfile parse_profile(const json& doc) {
  if (!doc.is_object()) throw ParseError("profile document must be a JSON object");
  DeviceProfile p;
  const std::string where = "profile";
  p.name = doc.value("name", std::string("device"));
  p.levels.cpu = parse_levels(doc, "cpu_levels");
  p.levels.gpu = parse_levels(doc, "gpu_levels");
  p.levels.mem = parse_levels(doc, "mem_levels");
  // Monotone level tables are a precondition for the keyed lookups below.
  for (Component c : kComponents) {
    auto& t = p.levels[c];
    const std::string name = std::string(to_string(c)) + "_levels";
    if (t.empty()) throw ValidationError(name, "profile: " + name + " is empty");
    if (!std::is_sorted(t.begin(), t.end()) || std::adjacent_find(t.begin(), t.end()) != t.end()) {
      throw ValidationError(name, "profile: " + name + " is not strictly increasing");
    }
  }

  if (!doc.contains("peak_perf")) throw ParseError("profile: missing 'peak_perf'");
  p.peak_perf = parse_pair_map(doc["peak_perf"], p.levels.cpu, p.levels.gpu, "peak_perf");
  if (!doc.contains("mem_bandwidth")) throw ParseError("profile: missing 'mem_bandwidth'");
  p.mem_bandwidth = parse_level_map(doc["mem_bandwidth"], p.levels.mem, "mem_bandwidth", true);
  if (!doc.contains("voltage") || !doc["voltage"].is_object()) {
    throw ParseError("profile: missing 'voltage' object");
  }
  for (Component c : kComponents) {
    const std::string key(to_string(c));
    if (!doc["voltage"].contains(key)) throw ParseError("profile: missing voltage/" + key);
    p.voltage[c] = parse_level_map(doc["voltage"][key], p.levels[c], "voltage/" + key, true);
  }

  p.t_overhead = detail::require<double>(doc, "t_overhead", where);
  p.t_switch_base = detail::require<double>(doc, "t_switch_base", where);
  p.t_switch_penalty.assign(p.levels.gpu.size(), 0.0);
  if (doc.contains("t_switch_penalty")) {
    p.t_switch_penalty =
        parse_level_map(doc["t_switch_penalty"], p.levels.gpu, "t_switch_penalty", false);
  }
  if (doc.contains("t_switch_matrix")) {
    p.t_switch_matrix =
        parse_pair_map(doc["t_switch_matrix"], p.levels.gpu, p.levels.gpu, "t_switch_matrix");
  }
  p.alpha_max = parse_per_component(doc, "alpha_max");
  p.alpha_min = parse_per_component(doc, "alpha_min");
  p.k1 = detail::require<double>(doc, "k1", where);
  p.k2 = detail::require<double>(doc, "k2", where);
  p.r_th = detail::require<double>(doc, "r_th", where);
  p.tau_th = detail::require<double>(doc, "tau_th", where);
  p.t_ambient = detail::require<double>(doc, "t_ambient", where);
  p.t_prefill = detail::optional<double>(doc, "t_prefill", where).value_or(0.0005);

  validate_profile(p);
  return p;
}

json profile_to_json(const DeviceProfile& p) {
  json doc = {
      {"name", p.name},
      {"cpu_levels", p.levels.cpu},
      {"gpu_levels", p.levels.gpu},
      {"mem_levels", p.levels.mem},
      {"peak_perf", pair_map_json(p.levels.cpu, p.levels.gpu, p.peak_perf)},
      {"mem_bandwidth", level_map_json(p.levels.mem, p.mem_bandwidth, false)},
      {"voltage",
       {{"cpu", level_map_json(p.levels.cpu, p.voltage.cpu, false)},
        {"gpu", level_map_json(p.levels.gpu, p.voltage.gpu, false)},
        {"mem", level_map_json(p.levels.mem, p.voltage.mem, false)}}},
      {"t_overhead", p.t_overhead},
      {"t_switch_base", p.t_switch_base},
      {"t_switch_penalty", level_map_json(p.levels.gpu, p.t_switch_penalty, true)},
      {"alpha_max", per_component_json(p.alpha_max)},
      {"alpha_min", per_component_json(p.alpha_min)},
      {"k1", p.k1},
      {"k2", p.k2},
      {"r_th", p.r_th},
      {"tau_th", p.tau_th},
      {"t_ambient", p.t_ambient},
      {"t_prefill", p.t_prefill},
  };
  if (p.t_switch_matrix) {
    doc["t_switch_matrix"] = pair_map_json(p.levels.gpu, p.levels.gpu, *p.t_switch_matrix);
  }
  return doc;
}

DeviceProfile load_profile(const std::filesystem::path& path) {
  return parse_profile(detail::read_json_file(path));
}

double peak_perf(const DeviceProfile& profile, Hz f_cpu, Hz f_gpu) {
  return profile.peak_perf_at(profile.level_index(Component::cpu, f_cpu),
                              profile.level_index(Component::gpu, f_gpu));
}

double mem_bandwidth(const DeviceProfile& profile, Hz f_mem) {
  return profile.mem_bandwidth[profile.level_index(Component::mem, f_mem)];
}

double voltage_of(const DeviceProfile& profile, Component c, Hz f) {
  return profile.voltage[c][profile.level_index(c, f)];
}

double switch_latency(const DeviceProfile& profile, const FrequencyTriplet& from,
                      const FrequencyTriplet& to) {
  profile.check_triplet(from);
  profile.check_triplet(to);
  if (from == to) return 0.0;
  const std::size_t g_to = profile.level_index(Component::gpu, to.gpu);
  if (profile.t_switch_matrix) {
    const std::size_t g_from = profile.level_index(Component::gpu, from.gpu);
    return (*profile.t_switch_matrix)[g_from * profile.levels.gpu.size() + g_to];
  }
  return profile.t_switch_base + profile.t_switch_penalty[g_to];
}

}  // namespace blockdvfs
