#include "blockswitch/block_store.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <tuple>
#include <unordered_set>

#include "json.hpp"

namespace blockswitch {

namespace fs = std::filesystem;
using nlohmann::json;

ByteCount ModelManifest::bytes_of(const BlockSet& blocks) const {
  ByteCount total = 0;
  for (BlockId b : blocks) total += size_of(b);
  return total;
}

ByteCount ModelManifest::total_bytes() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), ByteCount{0});
}

ByteCount ModelManifest::largest_block() const {
  return block_sizes.empty() ? 0 : *std::max_element(block_sizes.begin(), block_sizes.end());
}

void ModelManifest::validate() const {
  if (block_sizes.empty()) throw ManifestError("manifest must declare at least one block");
  if (shard_ids.size() != block_sizes.size()) {
    throw ManifestError("manifest has " + std::to_string(block_sizes.size()) + " blocks but " +
                        std::to_string(shard_ids.size()) + " shard ids");
  }
  for (std::size_t i = 0; i < block_sizes.size(); ++i) {
    if (block_sizes[i] == 0) throw ManifestError("block " + std::to_string(i) + " has size 0");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : shard_ids) {
    if (!seen.insert(id).second) throw ManifestError("duplicate shard id '" + id + "'");
  }
}

ModelManifest make_manifest(std::string model_name, std::vector<ByteCount> block_sizes,
                            const std::string& shard_prefix) {
  ModelManifest m;
  m.model_name = std::move(model_name);
  m.block_sizes = std::move(block_sizes);
  m.shard_ids.reserve(m.block_sizes.size());
  for (std::size_t i = 0; i < m.block_sizes.size(); ++i) {
    m.shard_ids.push_back(shard_prefix + std::to_string(i) + ".bin");
  }
  m.validate();
  return m;
}

ModelManifest make_uniform_manifest(std::string model_name, std::size_t num_blocks,
                                    ByteCount block_size, const std::string& shard_prefix) {
  return make_manifest(std::move(model_name), std::vector<ByteCount>(num_blocks, block_size),
                       shard_prefix);
}

ModelManifest parse_manifest_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    const std::string name = doc.at("model_name").get<std::string>();
    const std::string prefix = doc.value("shard_prefix", std::string("block_"));
    if (doc.contains("block_sizes_bytes")) {
      return make_manifest(name, doc.at("block_sizes_bytes").get<std::vector<ByteCount>>(),
                           prefix);
    }
    const auto n = doc.at("num_blocks").get<std::size_t>();
    const auto total = doc.at("total_bytes").get<ByteCount>();
    if (n == 0) throw ManifestError("num_blocks must be >= 1");
    return make_uniform_manifest(name, n, total / n, prefix);
  } catch (const json::exception& e) {
    throw ManifestError(std::string("malformed manifest: ") + e.what());
  }
}

ModelManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_manifest_json(text);
}

CacheState make_cache_state(ByteCount gpu_budget, ByteCount cpu_budget) {
  CacheState s;
  s.gpu_budget_bytes = gpu_budget;
  s.cpu_budget_bytes = cpu_budget;
  return s;
}

bool budgets_hold(const CacheState& state, const ModelManifest& manifest) {
  const auto n = manifest.num_blocks();
  auto in_range = [n](const BlockSet& s) { return s.empty() || *s.rbegin() < n; };
  if (!in_range(state.gpu_resident) || !in_range(state.cpu_resident)) return false;
  return manifest.bytes_of(state.gpu_resident) <= state.gpu_budget_bytes &&
         manifest.bytes_of(state.cpu_resident) <= state.cpu_budget_bytes;
}

CacheState touch(CacheState state, const BlockSet& blocks) {
  if (blocks.empty()) return state;
  ++state.clock;
  for (BlockId b : blocks) state.last_use[b] = state.clock;
  return state;
}

namespace {

void check_range(const BlockSet& blocks, const ModelManifest& manifest) {
  if (!blocks.empty() && *blocks.rbegin() >= manifest.num_blocks()) {
    throw Error("block id " + std::to_string(*blocks.rbegin()) + " out of range for " +
                std::to_string(manifest.num_blocks()) + " blocks");
  }
}

BlockSet& resident_mut(CacheState& state, Tier tier) {
  return tier == Tier::gpu ? state.gpu_resident : state.cpu_resident;
}

// Shared body of stage_to_cpu and insert_to_gpu once preconditions hold.
TransferResult admit(const CacheState& state, const ModelManifest& manifest, Tier tier,
                     const BlockSet& blocks, const EvictionHints& hints) {
  TransferResult out{state, 0, {}, {}};
  out.added = set_difference(blocks, state.resident(tier));
  const ByteCount incoming = manifest.bytes_of(out.added);
  const ByteCount used = manifest.bytes_of(state.resident(tier));
  const ByteCount budget = state.budget(tier);
  if (used + incoming > budget) {
    const ByteCount need = used + incoming - budget;
    auto freed = evict(state, manifest, tier, need, set_union(hints.protected_blocks, blocks),
                       hints.usefulness);
    out.state = std::move(freed.state);
    out.evicted = std::move(freed.victims);
  }
  auto& dst = resident_mut(out.state, tier);
  dst.insert(out.added.begin(), out.added.end());
  out.state = touch(std::move(out.state), out.added);
  out.bytes_moved = incoming;
  return out;
}

}  // namespace

EvictResult evict(const CacheState& state, const ModelManifest& manifest, Tier tier,
                  ByteCount bytes_needed, const BlockSet& protected_blocks,
                  const UsefulnessMap& usefulness) {
  EvictResult out{state, {}};
  if (bytes_needed == 0) return out;

  struct Candidate {
    double usefulness;
    std::uint64_t last_use;
    BlockId block;
  };
  std::vector<Candidate> candidates;
  ByteCount evictable = 0;
  for (BlockId b : state.resident(tier)) {
    if (protected_blocks.count(b)) continue;
    const auto u = usefulness.find(b);
    const auto t = state.last_use.find(b);
    candidates.push_back({u == usefulness.end() ? 0.0 : u->second,
                          t == state.last_use.end() ? 0 : t->second, b});
    evictable += manifest.size_of(b);
  }
  if (evictable < bytes_needed) throw BudgetExceeded(tier, bytes_needed - evictable);

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.usefulness, a.last_use, a.block) <
           std::tie(b.usefulness, b.last_use, b.block);
  });
  auto& dst = resident_mut(out.state, tier);
  ByteCount freed = 0;
  for (const auto& c : candidates) {
    if (freed >= bytes_needed) break;
    dst.erase(c.block);
    freed += manifest.size_of(c.block);
    out.victims.push_back(c.block);
  }
  return out;
}

TransferResult stage_to_cpu(const CacheState& state, const ModelManifest& manifest,
                            const BlockSet& blocks, const EvictionHints& hints) {
  check_range(blocks, manifest);
  return admit(state, manifest, Tier::cpu, blocks, hints);
}

TransferResult insert_to_gpu(const CacheState& state, const ModelManifest& manifest,
                             const BlockSet& blocks, const EvictionHints& hints) {
  check_range(blocks, manifest);
  for (BlockId b : blocks) {
    if (!state.cpu_resident.count(b) && !state.gpu_resident.count(b)) throw StagingOrderError(b);
  }
  return admit(state, manifest, Tier::gpu, blocks, hints);
}

Store::Store(ModelManifest manifest, fs::path root, CacheState state)
    : manifest_(std::move(manifest)), root_(std::move(root)), state_(std::move(state)) {}

fs::path Store::shard_path(BlockId block) const { return root_ / manifest_.shard_ids.at(block); }

bool Store::verify_shard(BlockId block) const {
  const auto path = shard_path(block);
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec || size != manifest_.size_of(block)) return false;
  std::ifstream in(path, std::ios::binary);
  std::array<unsigned char, 8> head{};
  const auto n = static_cast<std::streamsize>(std::min<ByteCount>(8, size));
  if (!in.read(reinterpret_cast<char*>(head.data()), n)) return false;
  for (std::streamsize i = 0; i < n; ++i) {
    if (head[i] != static_cast<unsigned char>((std::uint64_t{block} >> (8 * i)) & 0xff)) {
      return false;
    }
  }
  return true;
}

namespace {

void write_shard(const fs::path& path, BlockId block, ByteCount size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError("cannot create shard " + path.string());
  constexpr std::size_t kChunk = 1 << 20;
  std::vector<char> buf(kChunk);
  ByteCount written = 0;
  while (written < size) {
    const auto n = static_cast<std::size_t>(std::min<ByteCount>(kChunk, size - written));
    for (std::size_t i = 0; i < n; ++i) {
      const ByteCount pos = written + i;
      buf[i] = pos < 8 ? static_cast<char>((std::uint64_t{block} >> (8 * pos)) & 0xff)
                       : static_cast<char>((block * 131u + pos * 7u) & 0xff);
    }
    out.write(buf.data(), static_cast<std::streamsize>(n));
    written += n;
  }
  if (!out) throw StoreError("short write on shard " + path.string());
}

}  // namespace

Store init_store(const ModelManifest& manifest, const fs::path& disk_root) {
  return init_store(manifest, disk_root, manifest.total_bytes(), manifest.total_bytes());
}

Store init_store(const ModelManifest& manifest, const fs::path& disk_root, ByteCount gpu_budget,
                 ByteCount cpu_budget) {
  manifest.validate();
  std::error_code ec;
  fs::create_directories(disk_root, ec);
  if (ec) throw StoreError("cannot create " + disk_root.string() + ": " + ec.message());
  for (std::size_t i = 0; i < manifest.num_blocks(); ++i) {
    write_shard(disk_root / manifest.shard_ids[i], static_cast<BlockId>(i),
                manifest.block_sizes[i]);
  }
  return Store(manifest, disk_root, make_cache_state(gpu_budget, cpu_budget));
}

}  // namespace blockswitch
