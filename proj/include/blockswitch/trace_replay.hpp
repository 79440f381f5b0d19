#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blockswitch/block_store.hpp"
#include "blockswitch/cost_model.hpp"
#include "blockswitch/sparsity_select.hpp"
#include "blockswitch/switch_engine.hpp"
#include "blockswitch/transition_model.hpp"

namespace blockswitch {

class SelectionError : public Error {
 public:
  using Error::Error;
};

// A failure during replay, tagged with the trace index being processed.
class ReplayError : public Error {
 public:
  ReplayError(std::size_t position, const std::string& what);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct OracleSpec {
  enum class Kind { synthetic, table };
  Kind kind = Kind::synthetic;
  double correlation = 0.7;
  double skew = 1.0;
  std::map<TaskId, std::string> tables;  // task -> table-oracle file
};

// File-level description of a run. Paths are kept as written and resolved
// against base_dir.
struct ScenarioConfig {
  std::filesystem::path base_dir;
  std::string manifest;
  std::string tasks;
  std::string log;
  std::string trace;
  std::string cost_model;
  OracleSpec oracle;
  std::optional<std::uint64_t> seed;
  DeployMode mode = DeployMode::full_method;
  ByteCount gpu_budget_bytes = 0;
  ByteCount cpu_budget_bytes = 0;
  std::size_t k = 2;
  double compute_window_ms = 0.0;

  std::filesystem::path resolve(const std::string& rel) const;
};

ScenarioConfig parse_config_json(const std::string& text, const std::filesystem::path& base_dir);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ScenarioConfig& config);

// Fully loaded, validated inputs of a replay.
struct Scenario {
  ModelManifest manifest;
  std::vector<TaskSpec> tasks;  // file order
  OracleMap oracles;
  TaskLog log;
  std::vector<TaskId> trace;
  CostModel cost;
  ByteCount gpu_budget_bytes = 0;
  ByteCount cpu_budget_bytes = 0;
  std::size_t k = 2;
  double compute_window_ms = 0.0;
  std::string config_echo;

  void validate() const;
};

Scenario load_scenario(const ScenarioConfig& config);

struct LatencyStats {
  std::size_t count = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double max_ms = 0.0;
};

// Latencies are rounded to 3 decimals before aggregation so that statistics
// recomputed from the emitted switch stream match exactly.
double round_ms(double ms);
LatencyStats latency_stats(const std::vector<double>& rounded_latencies);

struct ReplayReport {
  DeployMode mode = DeployMode::full_method;
  SelectionStrategy strategy = SelectionStrategy::aligned;
  std::vector<TaskId> task_order;
  std::map<TaskId, Selection> selections;
  std::optional<SwitchReport> warmup;
  std::vector<SwitchReport> switches;
  LatencyStats latency;
  ByteCount total_bytes_disk_to_cpu = 0;
  ByteCount total_bytes_cpu_to_gpu = 0;
  double mean_gpu_resident_bytes = 0.0;
  std::vector<std::vector<double>> jaccard;  // task_order x task_order
  double prestage_hit_rate = 1.0;
  ByteCount prefetch_bytes = 0;
  std::size_t prefetch_blocks = 0;
  std::string config_echo;
};

// The selection strategy each mode is paired with: aligned for full_method,
// independent greedy otherwise.
SelectionStrategy strategy_for(DeployMode mode);

std::map<TaskId, Selection> select_skip_sets(const Scenario& scenario, SelectionStrategy strategy);

// Replays the trace with the given selections. Exposed separately so modes
// can be compared on identical skip sets.
ReplayReport replay_trace(const Scenario& scenario, DeployMode mode,
                          const std::map<TaskId, Selection>& selections,
                          SelectionStrategy strategy);

ReplayReport run_replay(const Scenario& scenario, DeployMode mode);
ReplayReport run_replay(const ScenarioConfig& config);

// All four modes on identical inputs; modes run concurrently.
std::map<DeployMode, ReplayReport> compare_modes(const Scenario& scenario);
std::map<DeployMode, ReplayReport> compare_modes(const ScenarioConfig& config);

// switches.jsonl, summary.csv, jaccard.csv, config.echo.json
void emit_reports(const ReplayReport& report, const std::filesystem::path& out_dir);

// One subdirectory per mode plus compare.csv with per-pair mean latencies.
void emit_comparison(const std::map<DeployMode, ReplayReport>& reports,
                     const std::filesystem::path& out_dir);

std::string switch_to_json_line(const SwitchReport& report);
std::string skip_sets_to_json(const std::map<TaskId, Selection>& selections);

}  // namespace blockswitch
