#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "blockswitch/common.hpp"

namespace blockswitch {

// Block inventory of the shared backbone: one entry per transformer block.
struct ModelManifest {
  std::string model_name;
  std::vector<ByteCount> block_sizes;
  std::vector<std::string> shard_ids;

  std::size_t num_blocks() const { return block_sizes.size(); }
  ByteCount size_of(BlockId block) const { return block_sizes.at(block); }
  ByteCount bytes_of(const BlockSet& blocks) const;
  ByteCount total_bytes() const;
  ByteCount largest_block() const;

  // Throws ManifestError on empty inventories, zero-sized blocks, a shard id
  // count mismatch or duplicate shard ids.
  void validate() const;
};

// Shard id for block i is "<prefix><i>.bin".
ModelManifest make_manifest(std::string model_name, std::vector<ByteCount> block_sizes,
                            const std::string& shard_prefix = "block_");
ModelManifest make_uniform_manifest(std::string model_name, std::size_t num_blocks,
                                    ByteCount block_size,
                                    const std::string& shard_prefix = "block_");

// Accepts either {"model_name", "block_sizes_bytes": [...], "shard_prefix"?}
// or the uniform shorthand {"model_name", "num_blocks", "total_bytes"}.
ModelManifest parse_manifest_json(const std::string& text);
ModelManifest load_manifest(const std::filesystem::path& path);

// Residency of blocks on the device (Level-1) and in the host cache.
struct CacheState {
  BlockSet gpu_resident;
  BlockSet cpu_resident;
  ByteCount gpu_budget_bytes = 0;
  ByteCount cpu_budget_bytes = 0;
  // Logical clock stamps used for LRU tie-breaking during eviction.
  std::map<BlockId, std::uint64_t> last_use;
  std::uint64_t clock = 0;

  const BlockSet& resident(Tier tier) const {
    return tier == Tier::gpu ? gpu_resident : cpu_resident;
  }
  ByteCount budget(Tier tier) const {
    return tier == Tier::gpu ? gpu_budget_bytes : cpu_budget_bytes;
  }

  bool operator==(const CacheState&) const = default;
};

CacheState make_cache_state(ByteCount gpu_budget, ByteCount cpu_budget);

// True when both budget inequalities hold and every id is in range.
bool budgets_hold(const CacheState& state, const ModelManifest& manifest);

// Marks blocks as used now.
CacheState touch(CacheState state, const BlockSet& blocks);

struct TransferResult {
  CacheState state;
  ByteCount bytes_moved = 0;
  BlockSet added;
  std::vector<BlockId> evicted;
};

// Usefulness of a block for the tasks expected next; absent ids count as 0.
using UsefulnessMap = std::map<BlockId, double>;

struct EvictionHints {
  BlockSet protected_blocks;
  UsefulnessMap usefulness;
};

struct EvictResult {
  CacheState state;
  std::vector<BlockId> victims;
};

// Removes non-protected blocks from one tier, least useful first, then least
// recently used, then lowest id, until at least bytes_needed are freed.
EvictResult evict(const CacheState& state, const ModelManifest& manifest, Tier tier,
                  ByteCount bytes_needed, const BlockSet& protected_blocks,
                  const UsefulnessMap& usefulness);

// Disk -> host. Requested blocks are never chosen as eviction victims.
TransferResult stage_to_cpu(const CacheState& state, const ModelManifest& manifest,
                            const BlockSet& blocks, const EvictionHints& hints = {});

// Host -> device. Every block must already be host- or device-resident.
// Only newly inserted blocks are charged; there is no reinitialization cost.
TransferResult insert_to_gpu(const CacheState& state, const ModelManifest& manifest,
                             const BlockSet& blocks, const EvictionHints& hints = {});

// Handle over the on-disk split storage.
class Store {
 public:
  Store(ModelManifest manifest, std::filesystem::path root, CacheState state);

  const ModelManifest& manifest() const { return manifest_; }
  const std::filesystem::path& root() const { return root_; }
  const CacheState& state() const { return state_; }
  std::filesystem::path shard_path(BlockId block) const;

  // Checks that the shard exists, has the declared size and carries its
  // block id in the leading 8 bytes.
  bool verify_shard(BlockId block) const;

 private:
  ModelManifest manifest_;
  std::filesystem::path root_;
  CacheState state_;
};

// Writes one filler shard per block under disk_root. Budgets default to the
// whole model.
Store init_store(const ModelManifest& manifest, const std::filesystem::path& disk_root);
Store init_store(const ModelManifest& manifest, const std::filesystem::path& disk_root,
                 ByteCount gpu_budget, ByteCount cpu_budget);

}  // namespace blockswitch
