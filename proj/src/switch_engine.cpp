#include "blockswitch/switch_engine.hpp"

namespace blockswitch {

const char* to_string(DeployMode mode) {
  switch (mode) {
    case DeployMode::monolithic: return "monolithic";
    case DeployMode::sparse_no_split: return "sparse_no_split";
    case DeployMode::split_only: return "split_only";
    case DeployMode::full_method: return "full_method";
  }
  return "?";
}

DeployMode parse_mode(const std::string& name) {
  for (DeployMode m : kAllModes) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown deploy mode '" + name + "'");
}

bool is_split(DeployMode mode) {
  return mode == DeployMode::split_only || mode == DeployMode::full_method;
}

BlockSet diff_set(const BlockSet& active_from, const BlockSet& active_to) {
  return set_difference(active_to, active_from);
}

namespace {

BlockSet active_of(const TaskId& task, const std::map<TaskId, SkipSet>& skip_sets,
                   std::size_t n) {
  const auto it = skip_sets.find(task);
  if (it == skip_sets.end()) throw ConfigError("no skip set for task '" + task + "'");
  return it->second.active(n);
}

void require_fits(const BlockSet& blocks, const CacheState& state, const ModelManifest& manifest) {
  const ByteCount need = manifest.bytes_of(blocks);
  if (need > state.gpu_budget_bytes) throw BudgetExceeded(Tier::gpu, need - state.gpu_budget_bytes);
}

// Monolithic and sparse_no_split: tear down, then load a whole checkpoint.
SwitchResult reload_checkpoint(const CacheState& state, const BlockSet& load,
                               SwitchReport report, const CostModel& cost,
                               const ModelManifest& manifest) {
  require_fits(load, state, manifest);
  report.reinit_ms = cost.monolithic_init_ms;
  for (BlockId b : load) {
    const ByteCount size = manifest.size_of(b);
    report.transfer_ms += cost.disk_leg_ms(size) + cost.gpu_leg_ms(size);
    report.bytes_disk_to_cpu += size;
    report.bytes_cpu_to_gpu += size;
  }
  report.blocks_fetched = load.size();
  report.blocks_dropped = set_difference(state.gpu_resident, load).size();

  CacheState next = state;
  next.gpu_resident = load;
  next.cpu_resident.clear();
  next = touch(std::move(next), load);
  report.latency_ms = report.reinit_ms + report.transfer_ms;
  report.gpu_resident_bytes_after = manifest.bytes_of(next.gpu_resident);
  return {std::move(next), std::move(report)};
}

// With the device holding A_from, the fetched set is exactly diff_set(A_from, A_to).
SwitchResult split_switch(const CacheState& state, const BlockSet& active_to, SwitchReport report, const CostModel& cost,
                          const ModelManifest& manifest, const UsefulnessMap& usefulness) {
  require_fits(active_to, state, manifest);
  const bool full = report.mode == DeployMode::full_method;

  CacheState s = state;
  // split_only has no host cache: nothing counts as prestaged.
  if (!full) s.cpu_resident.clear();

  const BlockSet need = set_difference(active_to, state.gpu_resident);
  const BlockSet drop = set_difference(state.gpu_resident, active_to);
  report.blocks_reused = set_intersection(active_to, state.gpu_resident).size();
  report.blocks_dropped = drop.size();
  s = evict(s, manifest, Tier::gpu, manifest.bytes_of(drop), active_to, usefulness).state;

  const BlockSet prestaged = full ? set_intersection(need, s.cpu_resident) : BlockSet{};
  const BlockSet missing = set_difference(need, prestaged);
  const EvictionHints device_hints{active_to, usefulness};

  for (BlockId b : prestaged) {
    auto moved = insert_to_gpu(s, manifest, {b}, device_hints);
    s = std::move(moved.state);
    report.bytes_cpu_to_gpu += moved.bytes_moved;
    report.transfer_ms += cost.gpu_leg_ms(manifest.size_of(b));
  }
  for (BlockId b : missing) {
    auto staged = stage_to_cpu(s, manifest, {b}, EvictionHints{{b}, usefulness});
    report.bytes_disk_to_cpu += staged.bytes_moved;
    report.transfer_ms += cost.disk_leg_ms(manifest.size_of(b));
    auto moved = insert_to_gpu(staged.state, manifest, {b}, device_hints);
    s = std::move(moved.state);
    report.bytes_cpu_to_gpu += moved.bytes_moved;
    report.transfer_ms += cost.gpu_leg_ms(manifest.size_of(b));
    if (!full) s.cpu_resident.erase(b);
  }
  report.blocks_prestaged = prestaged.size();
  report.blocks_fetched = missing.size();

  s = touch(std::move(s), active_to);
  report.latency_ms = report.transfer_ms;
  report.gpu_resident_bytes_after = manifest.bytes_of(s.gpu_resident);
  return {std::move(s), std::move(report)};
}

}  // namespace

SwitchResult execute_switch(const CacheState& state, const TaskId& from, const TaskId& to,
                            DeployMode mode, const std::map<TaskId, SkipSet>& skip_sets,
                            const CostModel& cost, const ModelManifest& manifest,
                            const UsefulnessMap& usefulness) {
  const auto n = manifest.num_blocks();
  SwitchReport report;
  report.from_task = from;
  report.to_task = to;
  report.mode = mode;

  switch (mode) {
    case DeployMode::monolithic:
      return reload_checkpoint(state, all_blocks(n), std::move(report), cost, manifest);
    case DeployMode::sparse_no_split:
      return reload_checkpoint(state, active_of(to, skip_sets, n), std::move(report), cost,
                               manifest);
    case DeployMode::split_only:
    case DeployMode::full_method: {
      if (!from.empty()) active_of(from, skip_sets, n);  // rejects an unknown outgoing task
      return split_switch(state, active_of(to, skip_sets, n), std::move(report), cost, manifest,
                          usefulness);
    }
  }
  throw ConfigError("unhandled deploy mode");
}

UsefulnessMap next_task_usefulness(const TaskId& current, const TransitionModel& model,
                                   const std::map<TaskId, SkipSet>& skip_sets,
                                   const ModelManifest& manifest) {
  const auto n = manifest.num_blocks();
  UsefulnessMap out;
  for (const auto& next : model.successors_of(current)) {
    const auto it = skip_sets.find(next);
    if (it == skip_sets.end()) continue;
    const double p = model.prob(current, next);
    for (BlockId b : it->second.active(n)) out[b] = std::max(out[b], p);
  }
  for (BlockId b : active_of(current, skip_sets, n)) out[b] = 1.0;
  return out;
}

double latency_from_counters(const SwitchReport& report, const CostModel& cost) {
  const double reinit = is_split(report.mode) ? 0.0 : cost.monolithic_init_ms;
  const double disk_legs = static_cast<double>(report.blocks_fetched);
  const double gpu_legs = static_cast<double>(report.blocks_fetched + report.blocks_prestaged);
  return reinit + static_cast<double>(report.bytes_disk_to_cpu) / (cost.disk_to_cpu_mbps * 1000.0) +
         disk_legs * cost.per_block_fixed_ms +
         static_cast<double>(report.bytes_cpu_to_gpu) / (cost.cpu_to_gpu_mbps * 1000.0) +
         gpu_legs * cost.per_block_fixed_ms;
}

ByteCount gpu_utilization(const CacheState& state, const ModelManifest& manifest) {
  return manifest.bytes_of(state.gpu_resident);
}

}  // namespace blockswitch
