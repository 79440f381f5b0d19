#pragma once

#include <vector>

#include "blockswitch/sparsity_select.hpp"

// Exhaustive reference implementations used to check the selectors on small
// instances. They share no code with sparsity_select beyond the oracle
// interface.
namespace blockswitch::reference {

class SizeGuardError : public Error {
 public:
  using Error::Error;
};

struct ReplayResult {
  BlockSet skipped;
  std::vector<BlockId> removal_order;
};

// Greedy semantics via bitmask enumeration: at each step every mask that
// extends the current removal set by one bit is scored. With a pool, feasible
// extensions inside the pool win. N <= 16.
ReplayResult brute_force_greedy_replay(const MetricOracle& oracle, double retention,
                                       std::size_t max_remove, const BlockSet* pool = nullptr);

// Largest feasible skip set with at most n_remove blocks; ties go to the
// higher score, then the lexicographically smallest set. N <= 12.
BlockSet brute_force_best_feasible(const MetricOracle& oracle, double retention,
                                   std::size_t n_remove);

}  // namespace blockswitch::reference
