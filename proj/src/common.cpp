#include "blockswitch/common.hpp"

#include <algorithm>
#include <iterator>

namespace blockswitch {

const char* to_string(Tier tier) { return tier == Tier::gpu ? "gpu" : "cpu"; }

BudgetExceeded::BudgetExceeded(Tier tier, ByteCount shortfall)
    : Error(std::string(to_string(tier)) + " budget exceeded by " + std::to_string(shortfall) +
            " bytes"),
      tier_(tier),
      shortfall_(shortfall) {}

StagingOrderError::StagingOrderError(BlockId block)
    : Error("block " + std::to_string(block) +
            " is not host-resident; device fills must come from the host cache"),
      block_(block) {}

LogParseError::LogParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

BlockSet all_blocks(std::size_t n) {
  BlockSet out;
  for (std::size_t i = 0; i < n; ++i) out.insert(out.end(), static_cast<BlockId>(i));
  return out;
}

BlockSet set_union(const BlockSet& a, const BlockSet& b) {
  BlockSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

BlockSet set_intersection(const BlockSet& a, const BlockSet& b) {
  BlockSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

BlockSet set_difference(const BlockSet& a, const BlockSet& b) {
  BlockSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

}  // namespace blockswitch
