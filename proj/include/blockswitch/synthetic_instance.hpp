#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "blockswitch/sparsity_select.hpp"

namespace blockswitch {

// Seeded stand-in for per-task calibration metrics: every task gets an
// additive importance vector over the blocks.
struct SyntheticInstance {
  std::uint64_t seed = 0;
  std::size_t num_blocks = 0;
  std::size_t num_tasks = 0;
  double correlation = 0.0;
  double skew = 1.0;
  std::vector<std::vector<double>> importance;  // [task][block]
  std::vector<double> retention;                // per task

  std::shared_ptr<const AdditiveOracle> oracle(std::size_t task) const;
};

// w[t][k] = (correlation * base[k] + (1 - correlation) * noise[t][k])^skew
// with base and noise uniform on [0, 1). skew = 1 is the plain blend; larger
// values concentrate importance in fewer blocks.
SyntheticInstance gen_instance(std::uint64_t seed, std::size_t num_blocks, std::size_t num_tasks,
                               double correlation, double skew = 1.0, double retention = 0.9);

// Every subset of the blocks with its score, in the table-oracle file format.
// Limited to 16 blocks.
std::string to_table_oracle_json(const SyntheticInstance& instance, std::size_t task);

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng);

struct MarkovChain {
  // Row order is significant: sampling walks it cumulatively.
  std::vector<std::pair<TaskId, std::vector<std::pair<TaskId, double>>>> rows;
};

// Walks the chain from `start`; each visit lasts 1..max_dwell inference steps.
std::vector<TaskId> generate_markov_trace(std::uint64_t seed, const MarkovChain& chain,
                                          const TaskId& start, std::size_t length,
                                          std::size_t max_dwell);

// Five perception tasks with vehicle <-> traffic-light switching dominant.
MarkovChain driving_task_chain();

}  // namespace blockswitch
