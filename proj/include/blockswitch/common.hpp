#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>

namespace blockswitch {

using BlockId = std::uint32_t;
using ByteCount = std::uint64_t;
using BlockSet = std::set<BlockId>;
using TaskId = std::string;

// Base of every error raised by the library. Subclasses carry the context the
// CLI needs to pick an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

enum class Tier { gpu, cpu };

const char* to_string(Tier tier);

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(Tier tier, ByteCount shortfall);

  Tier tier() const { return tier_; }
  ByteCount shortfall_bytes() const { return shortfall_; }

 private:
  Tier tier_;
  ByteCount shortfall_;
};

class StagingOrderError : public Error {
 public:
  explicit StagingOrderError(BlockId block);
  BlockId block() const { return block_; }

 private:
  BlockId block_;
};

class LogParseError : public Error {
 public:
  LogParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// {0..n-1}
BlockSet all_blocks(std::size_t n);
BlockSet set_union(const BlockSet& a, const BlockSet& b);
BlockSet set_intersection(const BlockSet& a, const BlockSet& b);
BlockSet set_difference(const BlockSet& a, const BlockSet& b);

}  // namespace blockswitch
