// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace blockdvfs {

using Hz = std::uint64_t;

enum class Component { cpu, gpu, mem };
inline constexpr std::array<Component, 3> kComponents{Component::cpu, Component::gpu,
                                                      Component::mem};

std::string_view to_string(Component c);

template <typename T>
struct PerComponent {
  T cpu{};
  T gpu{};
  T mem{};

  T& operator[](Component c) { return c == Component::cpu ? cpu : c == Component::gpu ? gpu : mem; }
  const T& operator[](Component c) const {
    return c == Component::cpu ? cpu : c == Component::gpu ? gpu : mem;
  }

  friend bool operator==(const PerComponent&, const PerComponent&) = default;
};

/// The coupled (CPU, GPU, EMC) frequency vector applied atomically.
struct FrequencyTriplet {
  Hz cpu = 0;
  Hz gpu = 0;
  Hz mem = 0;

  Hz operator[](Component c) const {
    return c == Component::cpu ? cpu : c == Component::gpu ? gpu : mem;
  }

  friend auto operator<=>(const FrequencyTriplet&, const FrequencyTriplet&) = default;
};

std::string to_string(const FrequencyTriplet& f);

/// Componentwise maximum.
FrequencyTriplet max(const FrequencyTriplet& a, const FrequencyTriplet& b);

/// Hardware description of one device. All quantities in SI units.
///
/// Tables are keyed by discrete level: `peak_perf` is row-major over
/// (cpu level, gpu level), `mem_bandwidth` and each voltage table are indexed
/// like the matching level list. Construct through `parse_profile` or call
/// `validate_profile` after filling the fields by hand.
struct DeviceProfile {
  std::string name;
  PerComponent<std::vector<Hz>> levels;
  std::vector<double> peak_perf;      // FLOP/s, size = |cpu| * |gpu|
  std::vector<double> mem_bandwidth;  // bytes/s, size = |mem|
  PerComponent<std::vector<double>> voltage;
  double t_overhead = 0.0;
  double t_switch_base = 0.0;
  // Additive switching penalty per destination GPU level; 0 where absent.
  std::vector<double> t_switch_penalty;
  // Optional |gpu| x |gpu| latency matrix (row = source GPU level). When
  // present it replaces base + penalty for every transition; the diagonal
  // applies to transitions that only retune CPU and/or EMC.
  std::optional<std::vector<double>> t_switch_matrix;
  PerComponent<double> alpha_max;
  PerComponent<double> alpha_min;
  double k1 = 0.0;
  double k2 = 0.0;
  double r_th = 0.0;
  double tau_th = 1.0;
  double t_ambient = 25.0;
  double t_prefill = 0.0;

  std::size_t level_count(Component c) const { return levels[c].size(); }

  /// Index of `f` in the level table of `c`; throws UnknownLevelError.
  std::size_t level_index(Component c, Hz f) const;
  bool has_level(Component c, Hz f) const;

  double peak_perf_at(std::size_t cpu_index, std::size_t gpu_index) const {
    return peak_perf[cpu_index * levels.gpu.size() + gpu_index];
  }

  FrequencyTriplet min_triplet() const;
  FrequencyTriplet max_triplet() const;

  /// Throws UnknownLevelError unless every component is a table level.
  void check_triplet(const FrequencyTriplet& f) const;
};

/// Throws ValidationError naming the offending table/entry.
void validate_profile(const DeviceProfile& profile);

DeviceProfile parse_profile(const nlohmann::json& doc);
nlohmann::json profile_to_json(const DeviceProfile& profile);
DeviceProfile load_profile(const std::filesystem::path& path);

double peak_perf(const DeviceProfile& profile, Hz f_cpu, Hz f_gpu);
double mem_bandwidth(const DeviceProfile& profile, Hz f_mem);
double voltage_of(const DeviceProfile& profile, Component c, Hz f);

/// Seconds to move from one triplet to another; 0 when they are equal.
double switch_latency(const DeviceProfile& profile, const FrequencyTriplet& from,
                      const FrequencyTriplet& to);

/// Calls `fn(triplet)` for every grid point, CPU outermost, then GPU, then
/// EMC, each ascending.
template <typename Fn>
void for_each_triplet(const DeviceProfile& profile, Fn&& fn) {
  for (Hz c : profile.levels.cpu) {
    for (Hz g : profile.levels.gpu) {
      for (Hz m : profile.levels.mem) fn(FrequencyTriplet{c, g, m});
    }
  }
}

}  // namespace blockdvfs
