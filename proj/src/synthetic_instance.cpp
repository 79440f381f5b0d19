#include "blockswitch/synthetic_instance.hpp"

#include <cmath>

#include "json.hpp"

namespace blockswitch {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::shared_ptr<const AdditiveOracle> SyntheticInstance::oracle(std::size_t task) const {
  return std::make_shared<const AdditiveOracle>(importance.at(task));
}

SyntheticInstance gen_instance(std::uint64_t seed, std::size_t num_blocks, std::size_t num_tasks,
                               double correlation, double skew, double retention) {
  if (num_blocks == 0 || num_tasks == 0) throw ConfigError("instance shape must be positive");
  if (!(correlation >= 0.0 && correlation <= 1.0)) {
    throw ConfigError("correlation must lie in [0, 1]");
  }
  if (!(skew > 0.0)) throw ConfigError("skew must be positive");

  SyntheticInstance inst;
  inst.seed = seed;
  inst.num_blocks = num_blocks;
  inst.num_tasks = num_tasks;
  inst.correlation = correlation;
  inst.skew = skew;
  inst.retention.assign(num_tasks, retention);

  std::mt19937_64 rng(seed);
  std::vector<double> base(num_blocks);
  for (auto& b : base) b = unit_uniform(rng);
  inst.importance.resize(num_tasks);
  for (auto& row : inst.importance) {
    row.resize(num_blocks);
    for (std::size_t k = 0; k < num_blocks; ++k) {
      const double blend = correlation * base[k] + (1.0 - correlation) * unit_uniform(rng);
      row[k] = skew == 1.0 ? blend : std::pow(blend, skew);
    }
  }
  return inst;
}

std::string to_table_oracle_json(const SyntheticInstance& instance, std::size_t task) {
  const auto n = instance.num_blocks;
  if (n > 16) throw ConfigError("table export is limited to 16 blocks");
  const auto oracle = instance.oracle(task);
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    BlockSet active;
    for (std::uint32_t k = 0; k < n; ++k) {
      if (mask & (1u << k)) active.insert(k);
    }
    doc.push_back({{"active_blocks", std::vector<BlockId>(active.begin(), active.end())},
                   {"score", oracle->evaluate(active)}});
  }
  return doc.dump() + "\n";
}

std::vector<TaskId> generate_markov_trace(std::uint64_t seed, const MarkovChain& chain,
                                          const TaskId& start, std::size_t length,
                                          std::size_t max_dwell) {
  if (max_dwell == 0) throw ConfigError("max_dwell must be >= 1");
  auto row_of = [&chain](const TaskId& t) -> const std::vector<std::pair<TaskId, double>>& {
    for (const auto& [from, row] : chain.rows) {
      if (from == t) return row;
    }
    throw ConfigError("Markov chain has no row for '" + t + "'");
  };

  std::mt19937_64 rng(seed);
  std::vector<TaskId> trace;
  TaskId current = start;
  while (trace.size() < length) {
    const auto dwell = 1 + static_cast<std::size_t>(unit_uniform(rng) * max_dwell);
    for (std::size_t i = 0; i < dwell && trace.size() < length; ++i) trace.push_back(current);

    const auto& row = row_of(current);
    if (row.empty()) throw ConfigError("Markov chain row for '" + current + "' is empty");
    double total = 0.0;
    for (const auto& [to, p] : row) total += p;
    double u = unit_uniform(rng) * total;
    TaskId next = row.back().first;
    for (const auto& [to, p] : row) {
      if (u < p) {
        next = to;
        break;
      }
      u -= p;
    }
    current = next;
  }
  return trace;
}

MarkovChain driving_task_chain() {
  MarkovChain c;
  c.rows = {
      {"Car", {{"TrafficLight", 0.55}, {"Obstacle", 0.20}, {"Person", 0.20}, {"Bicycle", 0.05}}},
      {"TrafficLight", {{"Car", 0.75}, {"Person", 0.15}, {"Obstacle", 0.10}}},
      {"Obstacle", {{"Car", 0.40}, {"Person", 0.40}, {"TrafficLight", 0.20}}},
      {"Person", {{"Car", 0.50}, {"TrafficLight", 0.30}, {"Bicycle", 0.20}}},
      {"Bicycle", {{"Car", 0.60}, {"Person", 0.40}}},
  };
  return c;
}

}  // namespace blockswitch
