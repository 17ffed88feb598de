// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include "blockdvfs/error.hpp"
#include "blockdvfs/modeler.hpp"
#include "blockdvfs/partitioner.hpp"
#include "support/test_support.hpp"

using namespace blockdvfs;
using testing_support::chain;
using testing_support::data_path;
using testing_support::make_op;

namespace {

const DeviceProfile& fixture() {
  static const DeviceProfile p = load_profile(data_path("profiles/orin_nano.json"));
  return p;
}

std::size_t covered(const Schedule& s) {
  std::size_t n = 0;
  for (const auto& b : s.blocks) n += b.ops.size();
  return n;
}

}  // namespace

TEST_CASE("similar", "[partitioner]") {
  const FrequencyTriplet a{1000, 612, 204};
  CHECK(similar(a, a, 0.0));
  CHECK(similar(a, a, 0.3));
  CHECK_FALSE(similar(a, {1000, 624, 204}, 0.0));
  CHECK(similar({1000, 612, 204}, {1000, 624, 204}, 0.02));
  CHECK_FALSE(similar({1000, 612, 204}, {1000, 624, 204}, 0.019));
  // Relative to the second argument.
  CHECK(similar({100, 100, 105}, {100, 100, 100}, 0.05));
}

TEST_CASE("config validation", "[partitioner]") {
  PartitionConfig cfg;
  CHECK_NOTHROW(validate_config(cfg));
  cfg.n_factor = 0.0;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg.n_factor = -1.0;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = {};
  cfg.similarity_eps = -0.1;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = {};
  cfg.n_factor = PartitionConfig::kInfinity;
  CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("partition examples", "[partitioner]") {
  const auto& p = fixture();
  const PartitionConfig cfg;
  const double threshold = cfg.n_factor * p.t_switch_base;

  SECTION("single operator") {
    const auto g = chain({make_op("a", 2.3e8, 9e5)});
    const auto s = partition(g, p, cfg, 25);
    REQUIRE(s.blocks.size() == 1);
    CHECK(s.blocks[0].f_block == optimal_triplet(g.operators()[0], 25, p));
    CHECK(s.blocks[0].t_block == block_exec_time(s.blocks[0].ops, s.blocks[0].f_block, p));
  }
  SECTION("identical optima give one block") {
    std::vector<Operator> ops;
    for (int i = 0; i < 10; ++i) ops.push_back(make_op("op" + std::to_string(i), 2.3e8, 9e5));
    CHECK(partition(chain(ops), p, cfg, 25).blocks.size() == 1);
  }
  SECTION("two long operators with different optima") {
    const auto big_compute = make_op("a", 3e9, 1e6);
    const auto big_memory = make_op("b", 1e6, 2e8);
    const auto fa = optimal_triplet(big_compute, 25, p);
    const auto fb = optimal_triplet(big_memory, 25, p);
    REQUIRE_FALSE(similar(fb, fa, cfg.similarity_eps));
    REQUIRE(predict_exec_time(big_compute, fa, p).t_exe >= threshold);
    REQUIRE(predict_exec_time(big_memory, fb, p).t_exe >= threshold);
    const auto s = partition(chain({big_compute, big_memory}), p, cfg, 25);
    REQUIRE(s.blocks.size() == 2);
    CHECK(s.blocks[0].f_block == fa);
    CHECK(s.blocks[1].f_block == fb);
    CHECK(s.blocks[1].first == 1);
  }
  SECTION("short operator is absorbed at the componentwise max") {
    const auto shorter = make_op("a", 3e8, 1e6);
    const auto mid = make_op("b", 1e6, 6e7);
    const auto last = make_op("c", 3e9, 1e6, 0.0);
    const auto fa = optimal_triplet(shorter, 25, p);
    const auto fb = optimal_triplet(mid, 25, p);
    REQUIRE(predict_exec_time(shorter, fa, p).t_exe < threshold);
    REQUIRE_FALSE(similar(fb, fa, cfg.similarity_eps));
    const auto s = partition(chain({shorter, mid, last}), p, cfg, 25);
    REQUIRE(s.blocks.size() >= 1);
    REQUIRE(s.blocks[0].ops.size() >= 2);
    CHECK(s.blocks[0].f_block.cpu >= std::max(fa.cpu, fb.cpu));
    CHECK(s.blocks[0].f_block.gpu >= std::max(fa.gpu, fb.gpu));
    CHECK(s.blocks[0].f_block.mem >= std::max(fa.mem, fb.mem));
  }
  SECTION("infinite N merges everything") {
    PartitionConfig inf;
    inf.n_factor = PartitionConfig::kInfinity;
    const auto g = load_graph(data_path("graphs/resnet101.json"));
    CHECK(partition(g, p, inf, 25).blocks.size() == 1);
  }
  SECTION("empty graph") {
    CHECK(partition(ComputationGraph{}, p, cfg, 25).blocks.empty());
  }
}

TEST_CASE("fixture block counts at N=5", "[partitioner]") {
  const auto& p = fixture();
  const std::pair<const char*, std::size_t> expected[] = {
      {"resnet18", 2}, {"resnet101", 16}, {"vit_b16", 8}, {"vit_l16", 12}};
  for (const auto& [name, blocks] : expected) {
    const auto g = load_graph(data_path(std::string("graphs/") + name + ".json"));
    const auto s = partition(g, p, {}, p.t_ambient);
    CHECK(s.blocks.size() == blocks);
    CHECK(covered(s) == g.size());
  }
}

TEST_CASE("operator-level schedule", "[partitioner]") {
  const auto& p = fixture();
  const auto g = load_graph(data_path("graphs/resnet18.json"));
  const auto s = operator_level_schedule(g, p, {}, 25);
  REQUIRE(s.blocks.size() == g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(s.blocks[i].first == i);
    CHECK(s.blocks[i].f_block == optimal_triplet(g.operators()[i], 25, p));
  }
  CHECK(s.op_count() == g.size());
}

TEST_CASE("switching totals", "[partitioner]") {
  auto p = testing_support::tiny_profile();
  Schedule s;
  CHECK(switching_totals(s, p) == 0.0);
  const FrequencyTriplet t1 = p.min_triplet();
  const FrequencyTriplet t2{p.levels.cpu[1], p.levels.gpu[0], p.levels.mem[0]};
  const FrequencyTriplet t3 = p.max_triplet();
  for (const auto& f : {t1, t2, t3, t1}) {
    SuperBlock b;
    b.ops = {make_op("x", 1, 1)};
    b.f_block = f;
    s.blocks.push_back(b);
  }
  CHECK(switching_totals(s, p) == Catch::Approx(3 * 0.007).epsilon(1e-15));
  s.blocks.resize(1);
  CHECK(switching_totals(s, p) == 0.0);
}

TEST_CASE("dp oracle", "[partitioner]") {
  const auto& p = fixture();
  SECTION("single operator equals greedy") {
    const auto g = chain({make_op("a", 2.3e8, 9e5)});
    CHECK(dp_optimal_partition(g, p, {}, 25).blocks.size() == 1);
    CHECK(dp_optimal_partition(g, p, {}, 25).blocks[0].f_block ==
          partition(g, p, {}, 25).blocks[0].f_block);
  }
  SECTION("uniform operators stay in one block") {
    std::vector<Operator> ops;
    for (int i = 0; i < 6; ++i) ops.push_back(make_op("op" + std::to_string(i), 2.3e8, 9e5));
    CHECK(dp_optimal_partition(chain(ops), p, {}, 25).blocks.size() == 1);
  }
  SECTION("never worse than greedy") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto g = random_graph(1 + seed % 8, seed);
      const double dp = schedule_energy(dp_optimal_partition(g, p, {}, 25), p, 25);
      const double greedy = schedule_energy(partition(g, p, {}, 25), p, 25);
      CHECK(dp <= greedy * (1.0 + 1e-12));
    }
  }
  SECTION("size limit") {
    CHECK_THROWS_AS(dp_optimal_partition(random_graph(kMaxDpOperators + 1, 1), p, {}, 25),
                    DomainError);
  }
}

TEST_CASE("schedule json", "[partitioner]") {
  const auto& p = fixture();
  const auto g = load_graph(data_path("graphs/resnet18.json"));
  const auto doc = schedule_to_json(partition(g, p, {}, 25));
  REQUIRE(doc.contains("blocks"));
  REQUIRE(doc["blocks"].size() == 2);
  CHECK(doc["blocks"][0]["op_ids"].size() + doc["blocks"][1]["op_ids"].size() == 21);
}
