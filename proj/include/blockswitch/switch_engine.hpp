#pragma once

#include <array>
#include <map>
#include <string>

#include "blockswitch/block_store.hpp"
#include "blockswitch/cost_model.hpp"
#include "blockswitch/sparsity_select.hpp"
#include "blockswitch/transition_model.hpp"

namespace blockswitch {

enum class DeployMode { monolithic, sparse_no_split, split_only, full_method };

inline constexpr std::array<DeployMode, 4> kAllModes = {
    DeployMode::monolithic, DeployMode::sparse_no_split, DeployMode::split_only,
    DeployMode::full_method};

const char* to_string(DeployMode mode);
DeployMode parse_mode(const std::string& name);
bool is_split(DeployMode mode);

struct SwitchReport {
  std::size_t position = 0;  // trace index of the incoming task
  TaskId from_task;
  TaskId to_task;
  DeployMode mode = DeployMode::full_method;
  double latency_ms = 0.0;
  double reinit_ms = 0.0;
  double transfer_ms = 0.0;
  ByteCount bytes_disk_to_cpu = 0;
  ByteCount bytes_cpu_to_gpu = 0;
  std::size_t blocks_reused = 0;
  std::size_t blocks_fetched = 0;    // both legs
  std::size_t blocks_prestaged = 0;  // host-resident already, device leg only
  std::size_t blocks_dropped = 0;
  ByteCount gpu_resident_bytes_after = 0;
};

// A_to \ A_from: what the incoming task needs that the outgoing one lacked.
BlockSet diff_set(const BlockSet& active_from, const BlockSet& active_to);

struct SwitchResult {
  CacheState state;
  SwitchReport report;
};

// Moves the device set from `from` to `to` under `mode`. An empty `from`
// denotes a cold start with no active set. Split modes leave exactly A_to on
// the device; the monolithic modes reload a full (sparse) checkpoint.
SwitchResult execute_switch(const CacheState& state, const TaskId& from, const TaskId& to,
                            DeployMode mode, const std::map<TaskId, SkipSet>& skip_sets,
                            const CostModel& cost, const ModelManifest& manifest,
                            const UsefulnessMap& usefulness = {});

// Eviction usefulness after switching to `current`: its own blocks score 1,
// others the highest successor probability among tasks that use them.
UsefulnessMap next_task_usefulness(const TaskId& current, const TransitionModel& model,
                                   const std::map<TaskId, SkipSet>& skip_sets,
                                   const ModelManifest& manifest);

// Latency implied by a report's counters under the link formula.
double latency_from_counters(const SwitchReport& report, const CostModel& cost);

ByteCount gpu_utilization(const CacheState& state, const ModelManifest& manifest);

}  // namespace blockswitch
