#include "blockswitch/transition_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace blockswitch {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

TaskLog parse_task_log(const std::string& text, const std::set<TaskId>& registered) {
  TaskLog log;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string entry = trim(line);
    if (entry.empty()) continue;
    if (const auto comma = entry.find(','); comma != std::string::npos) {
      const std::string stamp = trim(entry.substr(0, comma));
      entry = trim(entry.substr(comma + 1));
      if (log.entries.empty() && stamp == "timestamp" && entry == "task_id") continue;
    }
    if (!registered.count(entry)) throw LogParseError(lineno, "unknown task id '" + entry + "'");
    log.entries.push_back(std::move(entry));
  }
  return log;
}

TaskLog load_task_log(const std::filesystem::path& path, const std::set<TaskId>& registered) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open task log " + path.string());
  return parse_task_log(std::string(std::istreambuf_iterator<char>(in), {}), registered);
}

TransitionCounts ingest_log(const TaskLog& log) {
  TransitionCounts counts;
  for (std::size_t i = 1; i < log.entries.size(); ++i) {
    const auto& from = log.entries[i - 1];
    const auto& to = log.entries[i];
    if (from != to) ++counts[from][to];
  }
  return counts;
}

TransitionProbs transition_probs(const TransitionCounts& counts) {
  TransitionProbs probs;
  for (const auto& [from, row] : counts) {
    std::uint64_t total = 0;
    for (const auto& [to, c] : row) total += c;
    if (total == 0) continue;
    auto& out = probs[from];
    for (const auto& [to, c] : row) {
      if (c) out[to] = static_cast<double>(c) / static_cast<double>(total);
    }
  }
  return probs;
}

std::vector<TaskId> top_k_successors(const TransitionProbs& probs, const TaskId& task,
                                     std::size_t k) {
  const auto row = probs.find(task);
  if (row == probs.end()) return {};
  std::vector<std::pair<TaskId, double>> ranked(row->second.begin(), row->second.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<TaskId> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

const std::vector<TaskId>& TransitionModel::successors_of(const TaskId& task) const {
  static const std::vector<TaskId> kNone;
  const auto it = successors.find(task);
  return it == successors.end() ? kNone : it->second;
}

double TransitionModel::prob(const TaskId& from, const TaskId& to) const {
  const auto row = probs.find(from);
  if (row == probs.end()) return 0.0;
  const auto it = row->second.find(to);
  return it == row->second.end() ? 0.0 : it->second;
}

TransitionModel build_transition_model(const TaskLog& log, std::size_t k) {
  if (k == 0) throw ConfigError("successor count k must be >= 1");
  TransitionModel model;
  model.k = k;
  model.counts = ingest_log(log);
  model.probs = transition_probs(model.counts);
  for (const auto& [from, row] : model.probs) {
    model.successors[from] = top_k_successors(model.probs, from, k);
  }
  return model;
}

std::string model_to_json(const TransitionModel& model) {
  nlohmann::ordered_json doc;
  doc["k"] = model.k;
  doc["counts"] = nlohmann::ordered_json::object();
  for (const auto& [from, row] : model.counts) {
    for (const auto& [to, c] : row) doc["counts"][from][to] = c;
  }
  doc["probs"] = nlohmann::ordered_json::object();
  for (const auto& [from, row] : model.probs) {
    for (const auto& [to, p] : row) doc["probs"][from][to] = p;
  }
  doc["successors"] = nlohmann::ordered_json::object();
  for (const auto& [from, list] : model.successors) doc["successors"][from] = list;
  return doc.dump(2) + "\n";
}

BlockSet TierAssignment::blocks_at(TierLevel level) const {
  BlockSet out;
  for (std::size_t i = 0; i < level_of.size(); ++i) {
    if (level_of[i] == level) out.insert(out.end(), static_cast<BlockId>(i));
  }
  return out;
}

TierAssignment assign_tiers(const TaskId& current, const std::map<TaskId, SkipSet>& skip_sets,
                            const TransitionModel& model, const ModelManifest& manifest) {
  const auto n = manifest.num_blocks();
  const auto cur = skip_sets.find(current);
  if (cur == skip_sets.end()) throw ConfigError("no skip set for task '" + current + "'");

  TierAssignment tiers;
  tiers.level_of.assign(n, TierLevel::disk);
  for (BlockId b : cur->second.active(n)) tiers.level_of[b] = TierLevel::device;
  for (const auto& next : model.successors_of(current)) {
    const auto it = skip_sets.find(next);
    if (it == skip_sets.end()) throw ConfigError("no skip set for task '" + next + "'");
    for (BlockId b : it->second.active(n)) {
      if (tiers.level_of[b] == TierLevel::disk) tiers.level_of[b] = TierLevel::host;
    }
  }
  return tiers;
}

}  // namespace blockswitch
