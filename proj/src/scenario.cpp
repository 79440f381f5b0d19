#include <fstream>

#include "blockswitch/synthetic_instance.hpp"
#include "blockswitch/trace_replay.hpp"
#include "json.hpp"

namespace blockswitch {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

ReplayError::ReplayError(std::size_t position, const std::string& what)
    : Error("trace position " + std::to_string(position) + ": " + what), position_(position) {}

fs::path ScenarioConfig::resolve(const std::string& rel) const {
  const fs::path p(rel);
  return p.is_absolute() ? p : base_dir / p;
}

ScenarioConfig parse_config_json(const std::string& text, const fs::path& base_dir) {
  ScenarioConfig c;
  c.base_dir = base_dir;
  try {
    const json doc = json::parse(text);
    c.manifest = doc.at("manifest").get<std::string>();
    c.tasks = doc.at("tasks").get<std::string>();
    c.log = doc.at("log").get<std::string>();
    c.trace = doc.at("trace").get<std::string>();
    c.cost_model = doc.at("cost_model").get<std::string>();
    c.gpu_budget_bytes = doc.at("gpu_budget_bytes").get<ByteCount>();
    c.cpu_budget_bytes = doc.at("cpu_budget_bytes").get<ByteCount>();
    c.mode = parse_mode(doc.value("mode", std::string("full_method")));
    c.k = doc.value("k", std::size_t{2});
    c.compute_window_ms = doc.value("compute_window_ms", 0.0);
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();

    const auto& o = doc.at("oracle");
    const auto type = o.at("type").get<std::string>();
    if (type == "synthetic") {
      c.oracle.kind = OracleSpec::Kind::synthetic;
      c.oracle.correlation = o.value("correlation", 0.7);
      c.oracle.skew = o.value("skew", 1.0);
    } else if (type == "table") {
      c.oracle.kind = OracleSpec::Kind::table;
      c.oracle.tables = o.at("tables").get<std::map<TaskId, std::string>>();
    } else {
      throw ConfigError("unknown oracle type '" + type + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config_json(std::string(std::istreambuf_iterator<char>(in), {}),
                           path.parent_path());
}

std::string config_to_json(const ScenarioConfig& c) {
  ordered_json doc;
  doc["manifest"] = c.manifest;
  doc["tasks"] = c.tasks;
  doc["log"] = c.log;
  doc["trace"] = c.trace;
  doc["cost_model"] = c.cost_model;
  ordered_json oracle;
  if (c.oracle.kind == OracleSpec::Kind::synthetic) {
    oracle["type"] = "synthetic";
    oracle["correlation"] = c.oracle.correlation;
    oracle["skew"] = c.oracle.skew;
  } else {
    oracle["type"] = "table";
    oracle["tables"] = c.oracle.tables;
  }
  doc["oracle"] = oracle;
  if (c.seed) doc["seed"] = *c.seed;
  doc["mode"] = to_string(c.mode);
  doc["gpu_budget_bytes"] = c.gpu_budget_bytes;
  doc["cpu_budget_bytes"] = c.cpu_budget_bytes;
  doc["k"] = c.k;
  doc["compute_window_ms"] = c.compute_window_ms;
  return doc.dump(2) + "\n";
}

void Scenario::validate() const {
  manifest.validate();
  cost.validate();
  if (tasks.empty()) throw ConfigError("scenario has no tasks");
  if (k == 0) throw ConfigError("k must be >= 1");
  if (!(compute_window_ms >= 0.0)) throw ConfigError("compute_window_ms must be >= 0");
  const ByteCount largest = manifest.largest_block();
  if (gpu_budget_bytes < largest || cpu_budget_bytes < largest) {
    throw ConfigError("budgets must each hold at least the largest block (" +
                      std::to_string(largest) + " bytes)");
  }
  std::set<TaskId> ids;
  for (const auto& t : tasks) {
    t.validate(manifest.num_blocks());
    ids.insert(t.task_id);
    const auto it = oracles.find(t.task_id);
    if (it == oracles.end() || !it->second) {
      throw ConfigError("no metric oracle for task '" + t.task_id + "'");
    }
    if (it->second->num_blocks() != manifest.num_blocks()) {
      throw ConfigError("oracle for '" + t.task_id + "' covers " +
                        std::to_string(it->second->num_blocks()) + " blocks, manifest has " +
                        std::to_string(manifest.num_blocks()));
    }
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!ids.count(trace[i])) throw ConfigError("trace entry " + std::to_string(i) + " unknown");
  }
}

Scenario load_scenario(const ScenarioConfig& config) {
  Scenario s;
  s.manifest = load_manifest(config.resolve(config.manifest));
  s.tasks = load_tasks(config.resolve(config.tasks));
  s.cost = load_cost_model(config.resolve(config.cost_model));
  s.gpu_budget_bytes = config.gpu_budget_bytes;
  s.cpu_budget_bytes = config.cpu_budget_bytes;
  s.k = config.k;
  s.compute_window_ms = config.compute_window_ms;

  std::set<TaskId> ids;
  for (const auto& t : s.tasks) ids.insert(t.task_id);
  s.log = load_task_log(config.resolve(config.log), ids);
  s.trace = load_task_log(config.resolve(config.trace), ids).entries;

  const auto n = s.manifest.num_blocks();
  if (config.oracle.kind == OracleSpec::Kind::synthetic) {
    if (!config.seed) throw ConfigError("synthetic oracles require a seed (--seed)");
    const auto inst = gen_instance(*config.seed, n, s.tasks.size(), config.oracle.correlation,
                                   config.oracle.skew);
    for (std::size_t t = 0; t < s.tasks.size(); ++t) s.oracles[s.tasks[t].task_id] = inst.oracle(t);
  } else {
    for (const auto& t : s.tasks) {
      const auto it = config.oracle.tables.find(t.task_id);
      if (it == config.oracle.tables.end()) {
        throw ConfigError("no table oracle for task '" + t.task_id + "'");
      }
      s.oracles[t.task_id] =
          std::make_shared<const TableOracle>(load_table_oracle(config.resolve(it->second), n));
    }
  }
  s.config_echo = config_to_json(config);
  s.validate();
  return s;
}

}  // namespace blockswitch
