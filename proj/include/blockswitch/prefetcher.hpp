#pragma once

#include <map>
#include <string>
#include <vector>

#include "blockswitch/block_store.hpp"
#include "blockswitch/cost_model.hpp"
#include "blockswitch/transition_model.hpp"

namespace blockswitch {

struct PrefetchEntry {
  BlockId block;
  double weight;
  ByteCount bytes;

  bool operator==(const PrefetchEntry&) const = default;
};

struct PrefetchPlan {
  std::vector<PrefetchEntry> entries;  // descending weight, then ascending id
  ByteCount total_bytes = 0;
};

// Host bytes a prefetch may claim: the budget minus host copies of Level-2
// blocks and of Level-1 blocks not yet on the device. Everything else in the
// host cache counts as reclaimable.
ByteCount prefetch_headroom(const TierAssignment& tiers, const CacheState& state,
                            const ModelManifest& manifest);

// Level-2 blocks not yet resident anywhere, weighted by the most likely
// successor that uses them, admitted greedily into the host headroom.
PrefetchPlan plan_prefetch(const TaskId& current, const TierAssignment& tiers,
                           const TransitionModel& model,
                           const std::map<TaskId, SkipSet>& skip_sets, const CacheState& state,
                           const ModelManifest& manifest);

struct PrefetchOutcome {
  CacheState state;
  BlockSet staged;
  ByteCount bytes_moved = 0;
  double elapsed_ms = 0.0;
};

// Stages a prefix of the plan over the disk link within the compute window.
// A block whose transfer would overrun the window ends the prefix.
PrefetchOutcome execute_prefetch(const PrefetchPlan& plan, const CacheState& state,
                                 double compute_window_ms, const CostModel& cost,
                                 const ModelManifest& manifest, const TierAssignment& tiers);

std::string plan_to_json(const PrefetchPlan& plan);

}  // namespace blockswitch
