#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "blockswitch/block_store.hpp"
#include "blockswitch/common.hpp"
#include "blockswitch/sparsity_select.hpp"

namespace blockswitch {

struct TaskLog {
  std::vector<TaskId> entries;
};

// Newline-delimited task ids, or CSV "timestamp,task_id" (an optional header
// row is skipped). Blank lines are ignored. Unknown ids raise LogParseError
// with the 1-based line number.
TaskLog parse_task_log(const std::string& text, const std::set<TaskId>& registered);
TaskLog load_task_log(const std::filesystem::path& path, const std::set<TaskId>& registered);

using TransitionCounts = std::map<TaskId, std::map<TaskId, std::uint64_t>>;
using TransitionProbs = std::map<TaskId, std::map<TaskId, double>>;

// Adjacent pairs with distinct tasks; a task continuing is not a switch.
TransitionCounts ingest_log(const TaskLog& log);

// Row-normalizes counts; rows with zero total are omitted.
TransitionProbs transition_probs(const TransitionCounts& counts);

// Up to k successors by descending probability, ties by task id.
std::vector<TaskId> top_k_successors(const TransitionProbs& probs, const TaskId& task,
                                     std::size_t k);

struct TransitionModel {
  TransitionCounts counts;
  TransitionProbs probs;
  std::map<TaskId, std::vector<TaskId>> successors;
  std::size_t k = 2;

  const std::vector<TaskId>& successors_of(const TaskId& task) const;
  double prob(const TaskId& from, const TaskId& to) const;
};

TransitionModel build_transition_model(const TaskLog& log, std::size_t k);

std::string model_to_json(const TransitionModel& model);

enum class TierLevel : std::uint8_t { device = 1, host = 2, disk = 3 };

struct TierAssignment {
  std::vector<TierLevel> level_of;

  BlockSet blocks_at(TierLevel level) const;
};

// Level-1 = active set of current; Level-2 = blocks of the top-K successors
// not already in Level-1; Level-3 = the rest.
TierAssignment assign_tiers(const TaskId& current, const std::map<TaskId, SkipSet>& skip_sets,
                            const TransitionModel& model, const ModelManifest& manifest);

}  // namespace blockswitch
