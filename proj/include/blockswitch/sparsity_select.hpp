#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "blockswitch/common.hpp"

namespace blockswitch {

struct TaskSpec {
  TaskId task_id;
  double retention_ratio = 0.9;  // lambda_t in (0, 1]
  std::size_t max_remove = 0;
  double priority_weight = 0.0;

  void validate(std::size_t num_blocks) const;
};

std::vector<TaskSpec> parse_tasks_json(const std::string& text);
std::vector<TaskSpec> load_tasks(const std::filesystem::path& path);

// Task metric as a function of the active block set. Implementations must be
// deterministic and safe to call concurrently.
class MetricOracle {
 public:
  virtual ~MetricOracle() = default;
  virtual std::size_t num_blocks() const = 0;
  virtual double evaluate(const BlockSet& active) const = 0;
  double full_score() const { return evaluate(all_blocks(num_blocks())); }
};

// score(A) = clamp(sum_{k in A} w_k / sum_k w_k, 0, 1). An all-zero weight
// vector scores 1 everywhere.
class AdditiveOracle final : public MetricOracle {
 public:
  explicit AdditiveOracle(std::vector<double> weights);

  std::size_t num_blocks() const override { return weights_.size(); }
  double evaluate(const BlockSet& active) const override;
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
  double total_ = 0.0;
};

// Explicit (active set -> score) entries. Evaluating a set without an entry
// throws OracleError.
class TableOracle final : public MetricOracle {
 public:
  TableOracle(std::size_t num_blocks, std::map<BlockSet, double> entries);

  std::size_t num_blocks() const override { return num_blocks_; }
  double evaluate(const BlockSet& active) const override;
  const std::map<BlockSet, double>& entries() const { return entries_; }

 private:
  std::size_t num_blocks_;
  std::map<BlockSet, double> entries_;
};

// File format: [{"active_blocks": [...], "score": x}, ...]. When num_blocks
// is 0 it is inferred from the largest id mentioned.
TableOracle parse_table_oracle_json(const std::string& text, std::size_t num_blocks = 0);
TableOracle load_table_oracle(const std::filesystem::path& path, std::size_t num_blocks = 0);

struct SkipSet {
  TaskId task_id;
  BlockSet skipped;

  BlockSet active(std::size_t num_blocks) const {
    return set_difference(all_blocks(num_blocks), skipped);
  }
  bool operator==(const SkipSet&) const = default;
};

struct Selection {
  SkipSet skip;
  std::vector<BlockId> removal_order;
  double full_score = 0.0;
  double final_score = 0.0;
  std::size_t oracle_calls = 0;
};

// Metric-constrained greedy removal: each step drops the feasible block whose
// removal keeps the highest score; ties go to the lowest id.
Selection greedy_skip_select(const TaskSpec& task, const MetricOracle& oracle);

// Same loop, but feasible candidates already in shared_pool win whenever at
// least one exists.
Selection aligned_skip_select(const TaskSpec& task, const MetricOracle& oracle,
                              const BlockSet& shared_pool);

enum class SelectionStrategy { aligned, independent };

using OracleMap = std::map<TaskId, std::shared_ptr<const MetricOracle>>;

// Descending priority_weight, ties by task id.
std::vector<TaskSpec> processing_order(std::vector<TaskSpec> tasks);

// Aligned: each task after the first prefers the union of earlier skip sets.
// Independent: plain greedy per task.
std::map<TaskId, Selection> build_all_tasks(const std::vector<TaskSpec>& tasks,
                                            const OracleMap& oracles,
                                            SelectionStrategy strategy = SelectionStrategy::aligned);

// |a & b| / |a | b|, with two empty sets counting as identical.
double jaccard(const BlockSet& a, const BlockSet& b);
inline double jaccard(const SkipSet& a, const SkipSet& b) { return jaccard(a.skipped, b.skipped); }

}  // namespace blockswitch
