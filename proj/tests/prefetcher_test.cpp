#include "blockswitch/prefetcher.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"

using namespace blockswitch;

namespace {

constexpr ByteCount kMB = 1'000'000;

struct Fixture {
  ModelManifest manifest = make_uniform_manifest("m", 6, 100 * kMB);
  // cur uses {0,1}; a (p=0.7) uses {0,2,3}; b (p=0.3) uses {0,3,4}.
  std::map<TaskId, SkipSet> sets{{"cur", {"cur", {2, 3, 4, 5}}},
                                 {"a", {"a", {1, 4, 5}}},
                                 {"b", {"b", {1, 2, 5}}}};
  TransitionModel model;
  TierAssignment tiers;
  CostModel cost{1000.0, 8000.0, 0.0, 0.0};

  Fixture() {
    TaskLog log{{"cur", "a", "cur", "a", "cur", "a", "cur", "a", "cur", "a", "cur", "a", "cur",
                 "a", "cur", "b", "cur", "b", "cur", "b", "cur"}};
    model = build_transition_model(log, 2);
    tiers = assign_tiers("cur", sets, model, manifest);
  }
  CacheState state(ByteCount cpu) const {
    auto s = make_cache_state(600 * kMB, cpu);
    s.gpu_resident = {0, 1};
    return s;
  }
};

}  // namespace

TEST_CASE("plan_prefetch weights and ordering") {
  Fixture f;
  REQUIRE(f.model.prob("cur", "a") == doctest::Approx(0.7));
  REQUIRE(f.tiers.blocks_at(TierLevel::host) == BlockSet{2, 3, 4});

  const auto plan = plan_prefetch("cur", f.tiers, f.model, f.sets, f.state(600 * kMB), f.manifest);
  REQUIRE(plan.entries.size() == 3);
  // Block 3 is shared by both successors and takes the larger probability.
  CHECK(plan.entries[0].block == 2);
  CHECK(plan.entries[0].weight == doctest::Approx(0.7));
  CHECK(plan.entries[1].block == 3);
  CHECK(plan.entries[1].weight == doctest::Approx(0.7));
  CHECK(plan.entries[2].block == 4);
  CHECK(plan.entries[2].weight == doctest::Approx(0.3));
  CHECK(plan.total_bytes == 300 * kMB);

  // Exhaustive check: no other ordering of the candidates is weight-sorted with id tie-breaks.
  std::vector<PrefetchEntry> perm = plan.entries;
  std::sort(perm.begin(), perm.end(),
            [](const auto& x, const auto& y) { return x.block < y.block; });
  int sorted_orders = 0;
  do {
    bool ok = true;
    for (std::size_t i = 1; i < perm.size(); ++i) {
      const auto& p = perm[i - 1];
      const auto& q = perm[i];
      if (p.weight < q.weight || (p.weight == q.weight && p.block > q.block)) ok = false;
    }
    if (ok) {
      ++sorted_orders;
      CHECK(perm == plan.entries);
    }
  } while (std::next_permutation(perm.begin(), perm.end(), [](const auto& x, const auto& y) {
    return x.block < y.block;
  }));
  CHECK(sorted_orders == 1);
}

TEST_CASE("plan_prefetch budget handling") {
  Fixture f;
  CHECK(plan_prefetch("cur", f.tiers, f.model, f.sets, f.state(0), f.manifest).entries.empty());

  const auto two = plan_prefetch("cur", f.tiers, f.model, f.sets, f.state(250 * kMB), f.manifest);
  CHECK(two.entries.size() == 2);
  CHECK(two.total_bytes == 200 * kMB);

  // Already-hosted Level-2 blocks are not planned again and consume headroom.
  auto s = f.state(300 * kMB);
  s.cpu_resident = {2};
  const auto rest = plan_prefetch("cur", f.tiers, f.model, f.sets, s, f.manifest);
  CHECK(rest.entries.size() == 2);
  CHECK(rest.entries[0].block == 3);

  // Host copies of device-resident Level-1 blocks are reclaimable.
  auto l1 = f.state(300 * kMB);
  l1.cpu_resident = {0, 1};
  CHECK(prefetch_headroom(f.tiers, l1, f.manifest) == 300 * kMB);
}

TEST_CASE("plan_prefetch skips oversized entries and keeps going") {
  auto manifest = make_manifest("m", {10, 10, 50, 10});
  std::map<TaskId, SkipSet> sets{{"cur", {"cur", {1, 2, 3}}}, {"a", {"a", {0, 3}}},
                                 {"b", {"b", {0, 1, 2}}}};
  const auto model =
      build_transition_model(TaskLog{{"cur", "a", "cur", "a", "cur", "b", "cur"}}, 2);
  const auto tiers = assign_tiers("cur", sets, model, manifest);
  const auto plan =
      plan_prefetch("cur", tiers, model, sets, make_cache_state(100, 25), manifest);
  std::vector<BlockId> ids;
  for (const auto& e : plan.entries) ids.push_back(e.block);
  CHECK(ids == std::vector<BlockId>{1, 3});
}

TEST_CASE("execute_prefetch") {
  Fixture f;
  const auto plan = plan_prefetch("cur", f.tiers, f.model, f.sets, f.state(600 * kMB), f.manifest);
  // 100 MB at 1000 MB/s is 100 ms per block.
  SUBCASE("window covers the whole plan") {
    const auto out = execute_prefetch(plan, f.state(600 * kMB), 1000.0, f.cost, f.manifest, f.tiers);
    CHECK(out.staged == BlockSet{2, 3, 4});
    CHECK(out.bytes_moved == 300 * kMB);
    CHECK(out.elapsed_ms == doctest::Approx(300.0));
  }
  SUBCASE("zero window") {
    const auto out = execute_prefetch(plan, f.state(600 * kMB), 0.0, f.cost, f.manifest, f.tiers);
    CHECK(out.staged.empty());
    CHECK(out.state == f.state(600 * kMB));
  }
  SUBCASE("window fits exactly two blocks") {
    const auto out = execute_prefetch(plan, f.state(600 * kMB), 200.0, f.cost, f.manifest, f.tiers);
    CHECK(out.staged == BlockSet{2, 3});
  }
  SUBCASE("staged set is a prefix and grows with the window") {
    BlockSet prev;
    for (double w = 0; w <= 400; w += 7.5) {
      const auto out = execute_prefetch(plan, f.state(600 * kMB), w, f.cost, f.manifest, f.tiers);
      BlockSet prefix;
      for (std::size_t i = 0; i < out.staged.size(); ++i) prefix.insert(plan.entries[i].block);
      CHECK(out.staged == prefix);
      CHECK(std::includes(out.staged.begin(), out.staged.end(), prev.begin(), prev.end()));
      CHECK(out.state.cpu_resident.size() <= 6);
      prev = out.staged;
    }
  }
}

TEST_CASE("plan_to_json is stable") {
  Fixture f;
  const auto plan = plan_prefetch("cur", f.tiers, f.model, f.sets, f.state(600 * kMB), f.manifest);
  CHECK(plan_to_json(plan) == plan_to_json(plan));
  CHECK(plan_to_json(plan).find("\"block\"") != std::string::npos);
}
