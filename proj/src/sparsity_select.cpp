#include "blockswitch/sparsity_select.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include "json.hpp"

namespace blockswitch {

using nlohmann::json;

void TaskSpec::validate(std::size_t num_blocks) const {
  if (!(retention_ratio > 0.0 && retention_ratio <= 1.0)) {
    throw ConfigError("task '" + task_id + "': retention_ratio must be in (0, 1]");
  }
  if (max_remove > num_blocks) {
    throw ConfigError("task '" + task_id + "': max_remove exceeds block count");
  }
  if (priority_weight < 0.0) {
    throw ConfigError("task '" + task_id + "': priority_weight must be non-negative");
  }
}

std::vector<TaskSpec> parse_tasks_json(const std::string& text) {
  std::vector<TaskSpec> tasks;
  try {
    for (const auto& item : json::parse(text)) {
      TaskSpec t;
      t.task_id = item.at("task_id").get<std::string>();
      t.retention_ratio = item.at("retention_ratio").get<double>();
      t.max_remove = item.at("max_remove").get<std::size_t>();
      t.priority_weight = item.at("priority_weight").get<double>();
      tasks.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed task file: ") + e.what());
  }
  std::set<TaskId> seen;
  for (const auto& t : tasks) {
    if (!seen.insert(t.task_id).second) throw ConfigError("duplicate task id '" + t.task_id + "'");
  }
  return tasks;
}

std::vector<TaskSpec> load_tasks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open task file " + path.string());
  return parse_tasks_json(std::string(std::istreambuf_iterator<char>(in), {}));
}

AdditiveOracle::AdditiveOracle(std::vector<double> weights) : weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!(w >= 0.0)) throw OracleError("importance weights must be non-negative");
    total_ += w;
  }
}

double AdditiveOracle::evaluate(const BlockSet& active) const {
  if (total_ == 0.0) return 1.0;
  double kept = 0.0;
  for (BlockId b : active) kept += weights_.at(b);
  return std::clamp(kept / total_, 0.0, 1.0);
}

TableOracle::TableOracle(std::size_t num_blocks, std::map<BlockSet, double> entries)
    : num_blocks_(num_blocks), entries_(std::move(entries)) {
  for (const auto& [set, score] : entries_) {
    if (!set.empty() && *set.rbegin() >= num_blocks_) {
      throw OracleError("table entry references block beyond " + std::to_string(num_blocks_));
    }
    if (!(score >= 0.0 && score <= 1.0)) throw OracleError("table scores must lie in [0, 1]");
  }
}

double TableOracle::evaluate(const BlockSet& active) const {
  const auto it = entries_.find(active);
  if (it == entries_.end()) {
    std::string ids;
    for (BlockId b : active) ids += (ids.empty() ? "" : ",") + std::to_string(b);
    throw OracleError("table oracle has no entry for active set {" + ids + "}");
  }
  return it->second;
}

TableOracle parse_table_oracle_json(const std::string& text, std::size_t num_blocks) {
  std::map<BlockSet, double> entries;
  std::size_t inferred = 0;
  try {
    for (const auto& item : json::parse(text)) {
      const auto ids = item.at("active_blocks").get<std::vector<BlockId>>();
      BlockSet set(ids.begin(), ids.end());
      if (!set.empty()) inferred = std::max<std::size_t>(inferred, *set.rbegin() + 1);
      entries[std::move(set)] = item.at("score").get<double>();
    }
  } catch (const json::exception& e) {
    throw OracleError(std::string("malformed table oracle: ") + e.what());
  }
  return TableOracle(num_blocks ? num_blocks : inferred, std::move(entries));
}

TableOracle load_table_oracle(const std::filesystem::path& path, std::size_t num_blocks) {
  std::ifstream in(path);
  if (!in) throw OracleError("cannot open table oracle " + path.string());
  return parse_table_oracle_json(std::string(std::istreambuf_iterator<char>(in), {}), num_blocks);
}

namespace {

struct Candidate {
  BlockId block;
  double score;
};

// Keeps the higher score; the sweep runs in ascending id order so a strict
// comparison leaves the lowest id on ties.
void keep_best(std::optional<Candidate>& best, const Candidate& c) {
  if (!best || c.score > best->score) best = c;
}

Selection select(const TaskSpec& task, const MetricOracle& oracle, const BlockSet* shared_pool) {
  const std::size_t n = oracle.num_blocks();
  task.validate(n);

  Selection sel;
  sel.skip.task_id = task.task_id;
  sel.full_score = oracle.full_score();
  sel.final_score = sel.full_score;
  sel.oracle_calls = 1;
  const double threshold = task.retention_ratio * sel.full_score;

  BlockSet active = all_blocks(n);
  for (std::size_t step = 0; step < task.max_remove; ++step) {
    std::optional<Candidate> best_any;
    std::optional<Candidate> best_shared;
    for (BlockId j : active) {
      BlockSet trial = active;
      trial.erase(j);
      const double s = oracle.evaluate(trial);
      ++sel.oracle_calls;
      if (!(s >= threshold)) continue;
      keep_best(best_any, {j, s});
      if (shared_pool && shared_pool->count(j)) keep_best(best_shared, {j, s});
    }
    if (!best_any) break;
    const Candidate pick = best_shared ? *best_shared : *best_any;
    active.erase(pick.block);
    sel.skip.skipped.insert(pick.block);
    sel.removal_order.push_back(pick.block);
    sel.final_score = pick.score;
  }
  return sel;
}

}  // namespace

Selection greedy_skip_select(const TaskSpec& task, const MetricOracle& oracle) {
  return select(task, oracle, nullptr);
}

Selection aligned_skip_select(const TaskSpec& task, const MetricOracle& oracle,
                              const BlockSet& shared_pool) {
  return select(task, oracle, &shared_pool);
}

std::vector<TaskSpec> processing_order(std::vector<TaskSpec> tasks) {
  std::sort(tasks.begin(), tasks.end(), [](const TaskSpec& a, const TaskSpec& b) {
    if (a.priority_weight != b.priority_weight) return a.priority_weight > b.priority_weight;
    return a.task_id < b.task_id;
  });
  return tasks;
}

std::map<TaskId, Selection> build_all_tasks(const std::vector<TaskSpec>& tasks,
                                            const OracleMap& oracles,
                                            SelectionStrategy strategy) {
  if (tasks.empty()) throw ConfigError("no tasks to select for");
  std::map<TaskId, Selection> out;
  BlockSet pool;
  bool first = true;
  for (const auto& task : processing_order(tasks)) {
    const auto it = oracles.find(task.task_id);
    if (it == oracles.end() || !it->second) {
      throw ConfigError("no metric oracle for task '" + task.task_id + "'");
    }
    Selection sel = (first || strategy == SelectionStrategy::independent)
                        ? greedy_skip_select(task, *it->second)
                        : aligned_skip_select(task, *it->second, pool);
    pool.insert(sel.skip.skipped.begin(), sel.skip.skipped.end());
    out.emplace(task.task_id, std::move(sel));
    first = false;
  }
  return out;
}

double jaccard(const BlockSet& a, const BlockSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  const auto inter = set_intersection(a, b).size();
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

}  // namespace blockswitch
