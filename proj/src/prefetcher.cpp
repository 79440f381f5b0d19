#include "blockswitch/prefetcher.hpp"

#include <algorithm>

#include "json.hpp"

namespace blockswitch {

namespace {

// Host copies prefetch must keep: Level-2 blocks, and Level-1 blocks that
// have not reached the device yet.
BlockSet pinned_blocks(const TierAssignment& tiers, const CacheState& state) {
  return set_union(set_difference(tiers.blocks_at(TierLevel::device), state.gpu_resident),
                   tiers.blocks_at(TierLevel::host));
}

}  // namespace

ByteCount prefetch_headroom(const TierAssignment& tiers, const CacheState& state,
                            const ModelManifest& manifest) {
  const ByteCount pinned =
      manifest.bytes_of(set_intersection(state.cpu_resident, pinned_blocks(tiers, state)));
  return pinned >= state.cpu_budget_bytes ? 0 : state.cpu_budget_bytes - pinned;
}

PrefetchPlan plan_prefetch(const TaskId& current, const TierAssignment& tiers,
                           const TransitionModel& model,
                           const std::map<TaskId, SkipSet>& skip_sets, const CacheState& state,
                           const ModelManifest& manifest) {
  const auto n = manifest.num_blocks();
  std::map<BlockId, double> weight;
  for (BlockId b : tiers.blocks_at(TierLevel::host)) {
    if (state.cpu_resident.count(b) || state.gpu_resident.count(b)) continue;
    weight[b] = 0.0;
  }
  for (const auto& next : model.successors_of(current)) {
    const auto it = skip_sets.find(next);
    if (it == skip_sets.end()) continue;
    const double p = model.prob(current, next);
    for (BlockId b : it->second.active(n)) {
      if (auto w = weight.find(b); w != weight.end()) w->second = std::max(w->second, p);
    }
  }

  std::vector<PrefetchEntry> ranked;
  for (const auto& [b, w] : weight) ranked.push_back({b, w, manifest.size_of(b)});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const PrefetchEntry& a, const PrefetchEntry& b) { return a.weight > b.weight; });

  PrefetchPlan plan;
  const ByteCount headroom = prefetch_headroom(tiers, state, manifest);
  for (const auto& e : ranked) {
    if (plan.total_bytes + e.bytes > headroom) continue;
    plan.entries.push_back(e);
    plan.total_bytes += e.bytes;
  }
  return plan;
}

PrefetchOutcome execute_prefetch(const PrefetchPlan& plan, const CacheState& state,
                                 double compute_window_ms, const CostModel& cost,
                                 const ModelManifest& manifest, const TierAssignment& tiers) {
  PrefetchOutcome out{state, {}, 0, 0.0};
  EvictionHints hints;
  hints.protected_blocks = pinned_blocks(tiers, state);
  for (const auto& e : plan.entries) hints.usefulness[e.block] = e.weight;

  for (const auto& e : plan.entries) {
    const double t = cost.disk_leg_ms(e.bytes);
    if (out.elapsed_ms + t > compute_window_ms) break;
    auto moved = stage_to_cpu(out.state, manifest, {e.block}, hints);
    out.state = std::move(moved.state);
    out.bytes_moved += moved.bytes_moved;
    out.elapsed_ms += t;
    out.staged.insert(e.block);
  }
  return out;
}

std::string plan_to_json(const PrefetchPlan& plan) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& e : plan.entries) {
    doc.push_back({{"block", e.block}, {"weight", e.weight}, {"bytes", e.bytes}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace blockswitch
