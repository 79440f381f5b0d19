#include "blockswitch/brute_force.hpp"

#include <bit>
#include <cstdint>

namespace blockswitch::reference {

namespace {

using Mask = std::uint32_t;

BlockSet active_from_removed(Mask removed, std::size_t n) {
  BlockSet active;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(removed >> k & 1u)) active.insert(static_cast<BlockId>(k));
  }
  return active;
}

BlockSet bits_of(Mask m) {
  BlockSet out;
  while (m) {
    out.insert(static_cast<BlockId>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

}  // namespace

ReplayResult brute_force_greedy_replay(const MetricOracle& oracle, double retention,
                                       std::size_t max_remove, const BlockSet* pool) {
  const std::size_t n = oracle.num_blocks();
  if (n > 16) throw SizeGuardError("greedy replay is limited to 16 blocks");
  const Mask universe = (Mask{1} << n) - 1;
  Mask pool_mask = 0;
  if (pool) {
    for (BlockId b : *pool) {
      if (b < n) pool_mask |= Mask{1} << b;
    }
  }
  const double threshold = retention * oracle.evaluate(active_from_removed(0, n));

  ReplayResult out;
  Mask removed = 0;
  for (std::size_t step = 0; step < max_remove; ++step) {
    bool found = false;
    bool found_in_pool = false;
    Mask best = 0;
    double best_score = 0.0;
    for (Mask m = 0; m <= universe; ++m) {
      if (static_cast<std::size_t>(std::popcount(m)) != step + 1 || (m & removed) != removed) {
        continue;
      }
      const Mask added = m ^ removed;
      const double s = oracle.evaluate(active_from_removed(m, n));
      if (!(s >= threshold)) continue;
      const bool in_pool = (added & pool_mask) != 0;
      bool take = false;
      if (!found) {
        take = true;
      } else if (in_pool != found_in_pool) {
        take = in_pool;
      } else if (s > best_score) {
        take = true;
      } else if (s == best_score && added < (best ^ removed)) {
        take = true;
      }
      if (take) {
        found = true;
        found_in_pool = in_pool;
        best = m;
        best_score = s;
      }
      if (m == universe) break;
    }
    if (!found) break;
    out.removal_order.push_back(static_cast<BlockId>(std::countr_zero(best ^ removed)));
    removed = best;
  }
  out.skipped = bits_of(removed);
  return out;
}

BlockSet brute_force_best_feasible(const MetricOracle& oracle, double retention,
                                   std::size_t n_remove) {
  const std::size_t n = oracle.num_blocks();
  if (n > 12) throw SizeGuardError("exhaustive search is limited to 12 blocks");
  const double threshold = retention * oracle.evaluate(active_from_removed(0, n));

  BlockSet best;
  double best_score = -1.0;
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    const auto size = static_cast<std::size_t>(std::popcount(m));
    if (size > n_remove) continue;
    const double s = oracle.evaluate(active_from_removed(m, n));
    if (!(s >= threshold)) continue;
    BlockSet cand = bits_of(m);
    const bool better =
        best_score < 0.0 || cand.size() > best.size() ||
        (cand.size() == best.size() &&
         (s > best_score || (s == best_score && std::vector<BlockId>(cand.begin(), cand.end()) <
                                                    std::vector<BlockId>(best.begin(), best.end()))));
    if (better) {
      best = std::move(cand);
      best_score = s;
    }
  }
  return best;
}

}  // namespace blockswitch::reference
