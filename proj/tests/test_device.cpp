// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "blockdvfs/device.hpp"
#include "blockdvfs/error.hpp"
#include "support/test_support.hpp"

using namespace blockdvfs;
using testing_support::data_path;
using json = nlohmann::json;

namespace {

const DeviceProfile& fixture() {
  static const DeviceProfile p = load_profile(data_path("profiles/orin_nano.json"));
  return p;
}

}  // namespace

TEST_CASE("fixture profile frequency grid", "[device]") {
  const auto& p = fixture();
  REQUIRE(p.levels.cpu.size() == 20);
  CHECK(p.levels.cpu.front() == 115'200'000);
  CHECK(p.levels.cpu.back() == 1'510'400'000);
  CHECK(p.levels.gpu == std::vector<Hz>{306'000'000, 408'000'000, 510'000'000, 612'000'000,
                                        624'000'000});
  CHECK(p.levels.mem.size() == 4);
  CHECK(p.min_triplet() == FrequencyTriplet{115'200'000, 306'000'000, 204'000'000});
  CHECK(p.max_triplet() == FrequencyTriplet{1'510'400'000, 624'000'000, 3'199'000'000});
}

TEST_CASE("peak_perf reads the stored table", "[device]") {
  const auto& p = fixture();
  const auto doc = testing_support::read_json(data_path("profiles/orin_nano.json"));
  CHECK(peak_perf(p, 1'510'400'000, 624'000'000) ==
        doc["peak_perf"]["1510400000/624000000"].get<double>());
  CHECK_THROWS_AS(peak_perf(p, 999, 624'000'000), UnknownLevelError);
  CHECK_THROWS_AS(mem_bandwidth(p, 999), UnknownLevelError);

  const auto single = testing_support::single_level_profile();
  CHECK(peak_perf(single, 1'000'000'000, 1'000'000'000) == 1e9);
}

TEST_CASE("voltage table endpoints", "[device]") {
  const auto& p = fixture();
  CHECK(voltage_of(p, Component::cpu, p.levels.cpu.front()) ==
        *std::min_element(p.voltage.cpu.begin(), p.voltage.cpu.end()));
  CHECK(voltage_of(p, Component::gpu, p.levels.gpu.back()) ==
        *std::max_element(p.voltage.gpu.begin(), p.voltage.gpu.end()));
  CHECK_THROWS_AS(voltage_of(p, Component::gpu, 1), UnknownLevelError);
}

TEST_CASE("switch latency", "[device]") {
  auto p = testing_support::tiny_profile();
  const FrequencyTriplet lo = p.min_triplet();
  const FrequencyTriplet hi = p.max_triplet();
  CHECK(switch_latency(p, lo, lo) == 0.0);
  CHECK(switch_latency(p, lo, hi) == 0.007);

  p.t_switch_penalty = {0.015, 0.0};
  CHECK(switch_latency(p, hi, lo) == Catch::Approx(0.022).epsilon(1e-15));
  CHECK(switch_latency(p, lo, hi) == 0.007);

  SECTION("matrix keyed by source and destination GPU level") {
    p.t_switch_matrix = std::vector<double>{0.001, 0.004, 0.003, 0.002};
    validate_profile(p);
    FrequencyTriplet cpu_only = lo;
    cpu_only.cpu = p.levels.cpu.back();
    CHECK(switch_latency(p, lo, cpu_only) == 0.001);
    CHECK(switch_latency(p, lo, hi) == 0.004);
    CHECK(switch_latency(p, hi, lo) == 0.003);
  }
  CHECK_THROWS_AS(switch_latency(p, lo, FrequencyTriplet{1, 2, 3}), UnknownLevelError);
}

TEST_CASE("fixture switch matrix", "[device]") {
  const auto& p = fixture();
  REQUIRE(p.t_switch_matrix);
  const FrequencyTriplet a{1'267'200'000, 624'000'000, 204'000'000};
  const FrequencyTriplet b{1'036'800'000, 510'000'000, 665'600'000};
  CHECK(switch_latency(p, a, b) == Catch::Approx(0.007195).epsilon(1e-12));
  CHECK(switch_latency(p, a, b) == switch_latency(p, b, a));
}

TEST_CASE("profile validation", "[device]") {
  SECTION("decreasing bandwidth") {
    auto doc = testing_support::read_json(data_path("profiles/orin_nano.json"));
    doc["mem_bandwidth"]["3199000000"] = 1.0;
    try {
      parse_profile(doc);
      FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
      CHECK_THAT(e.subject(), Catch::Matchers::ContainsSubstring("mem_bandwidth"));
    }
  }
  SECTION("single-level profile is legal") {
    CHECK_NOTHROW(validate_profile(testing_support::single_level_profile()));
  }
  SECTION("field checks") {
    auto p = testing_support::tiny_profile();
    p.levels.gpu = {1'000'000'000, 500'000'000};
    CHECK_THROWS_AS(validate_profile(p), ValidationError);
    p = testing_support::tiny_profile();
    p.voltage.cpu = {1.0, 0.8};
    CHECK_THROWS_AS(validate_profile(p), ValidationError);
    p = testing_support::tiny_profile();
    p.peak_perf = {2e9, 1e9, 1.5e9, 3e9};
    CHECK_THROWS_AS(validate_profile(p), ValidationError);
    p = testing_support::tiny_profile();
    p.alpha_min.gpu = 3e-9;
    CHECK_THROWS_AS(validate_profile(p), ValidationError);
    p = testing_support::tiny_profile();
    p.k1 = -1.0;
    CHECK_THROWS_AS(validate_profile(p), ValidationError);
    p = testing_support::tiny_profile();
    p.t_switch_base = 0.0;
    CHECK_THROWS_AS(validate_profile(p), ValidationError);
    p = testing_support::tiny_profile();
    p.levels.mem.clear();
    CHECK_THROWS_AS(validate_profile(p), ValidationError);
  }
  SECTION("missing fields") {
    auto doc = testing_support::read_json(data_path("profiles/orin_nano.json"));
    doc.erase("peak_perf");
    CHECK_THROWS_AS(parse_profile(doc), ParseError);
    CHECK_THROWS_AS(parse_profile(json::array()), ParseError);
    CHECK_THROWS_AS(load_profile("/nonexistent/profile.json"), Error);
  }
}

TEST_CASE("profile json round trip", "[device]") {
  const auto& p = fixture();
  const auto again = parse_profile(profile_to_json(p));
  CHECK(again.levels == p.levels);
  CHECK(again.peak_perf == p.peak_perf);
  CHECK(again.voltage == p.voltage);
  CHECK(again.t_switch_matrix == p.t_switch_matrix);
  CHECK(again.k1 == p.k1);
}

TEST_CASE("triplet helpers", "[device]") {
  const FrequencyTriplet a{1, 5, 3};
  const FrequencyTriplet b{2, 4, 3};
  CHECK(max(a, b) == FrequencyTriplet{2, 5, 3});
  CHECK(a[Component::gpu] == 5);
  CHECK(to_string(Component::mem) == "mem");
}
