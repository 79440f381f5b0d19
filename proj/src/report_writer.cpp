#include <cstdio>
#include <fstream>
#include <sstream>

#include "blockswitch/trace_replay.hpp"
#include "json.hpp"

namespace blockswitch {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError("cannot write " + path.string());
  out << content;
  if (!out) throw StoreError("short write on " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StoreError("cannot create " + dir.string() + ": " + ec.message());
}

using PairKey = std::pair<TaskId, TaskId>;

std::map<PairKey, std::vector<double>> latencies_by_pair(const ReplayReport& report) {
  std::map<PairKey, std::vector<double>> out;
  for (const auto& sw : report.switches) {
    out[{sw.from_task, sw.to_task}].push_back(round_ms(sw.latency_ms));
  }
  return out;
}

std::string stats_row(const std::string& from, const std::string& to, const LatencyStats& st) {
  return from + "," + to + "," + std::to_string(st.count) + "," + fixed(st.mean_ms, 3) + "," +
         fixed(st.median_ms, 3) + "," + fixed(st.max_ms, 3) + "\n";
}

std::string summary_csv(const ReplayReport& r) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "mode," << to_string(r.mode) << "\n";
  out << "selection," << (r.strategy == SelectionStrategy::aligned ? "aligned" : "independent")
      << "\n";
  out << "switches," << r.switches.size() << "\n";
  out << "total_bytes_disk_to_cpu," << r.total_bytes_disk_to_cpu << "\n";
  out << "total_bytes_cpu_to_gpu," << r.total_bytes_cpu_to_gpu << "\n";
  out << "mean_gpu_resident_bytes," << fixed(r.mean_gpu_resident_bytes, 3) << "\n";
  out << "prestage_hit_rate," << fixed(r.prestage_hit_rate, 6) << "\n";
  out << "prefetch_bytes," << r.prefetch_bytes << "\n";
  out << "prefetch_blocks," << r.prefetch_blocks << "\n";
  out << "warmup_latency_ms," << fixed(r.warmup ? round_ms(r.warmup->latency_ms) : 0.0, 3)
      << "\n";
  out << "\n";
  out << "from_task,to_task,count,mean_ms,median_ms,max_ms\n";
  if (!r.switches.empty()) {
    for (const auto& [key, values] : latencies_by_pair(r)) {
      out << stats_row(key.first, key.second, latency_stats(values));
    }
    out << stats_row("ALL", "ALL", r.latency);
  }
  return out.str();
}

std::string jaccard_csv(const ReplayReport& r) {
  std::ostringstream out;
  out << "task";
  for (const auto& id : r.task_order) out << "," << id;
  out << "\n";
  for (std::size_t i = 0; i < r.task_order.size(); ++i) {
    out << r.task_order[i];
    for (double v : r.jaccard[i]) out << "," << fixed(v, 6);
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string switch_to_json_line(const SwitchReport& s) {
  std::ostringstream out;
  out << "{\"position\":" << s.position << ",\"from_task\":" << quoted(s.from_task)
      << ",\"to_task\":" << quoted(s.to_task) << ",\"mode\":\"" << to_string(s.mode)
      << "\",\"latency_ms\":" << fixed(round_ms(s.latency_ms), 3)
      << ",\"reinit_ms\":" << fixed(round_ms(s.reinit_ms), 3)
      << ",\"transfer_ms\":" << fixed(round_ms(s.transfer_ms), 3)
      << ",\"bytes_disk_to_cpu\":" << s.bytes_disk_to_cpu
      << ",\"bytes_cpu_to_gpu\":" << s.bytes_cpu_to_gpu << ",\"blocks_reused\":" << s.blocks_reused
      << ",\"blocks_fetched\":" << s.blocks_fetched
      << ",\"blocks_prestaged\":" << s.blocks_prestaged
      << ",\"blocks_dropped\":" << s.blocks_dropped
      << ",\"gpu_resident_bytes_after\":" << s.gpu_resident_bytes_after << "}";
  return out.str();
}

std::string skip_sets_to_json(const std::map<TaskId, Selection>& selections) {
  nlohmann::ordered_json doc;
  doc["skip_sets"] = nlohmann::ordered_json::object();
  doc["final_scores"] = nlohmann::ordered_json::object();
  doc["oracle_calls"] = nlohmann::ordered_json::object();
  doc["removal_order"] = nlohmann::ordered_json::object();
  for (const auto& [id, sel] : selections) {
    doc["skip_sets"][id] = std::vector<BlockId>(sel.skip.skipped.begin(), sel.skip.skipped.end());
    doc["final_scores"][id] = sel.final_score;
    doc["oracle_calls"][id] = sel.oracle_calls;
    doc["removal_order"][id] = sel.removal_order;
  }
  return doc.dump(2) + "\n";
}

void emit_reports(const ReplayReport& report, const fs::path& out_dir) {
  ensure_dir(out_dir);
  std::string lines;
  for (const auto& sw : report.switches) lines += switch_to_json_line(sw) + "\n";
  write_file(out_dir / "switches.jsonl", lines);
  write_file(out_dir / "summary.csv", summary_csv(report));
  write_file(out_dir / "jaccard.csv", jaccard_csv(report));
  write_file(out_dir / "config.echo.json", report.config_echo);
}

void emit_comparison(const std::map<DeployMode, ReplayReport>& reports, const fs::path& out_dir) {
  ensure_dir(out_dir);
  for (const auto& [mode, report] : reports) emit_reports(report, out_dir / to_string(mode));

  std::ostringstream out;
  out << "from_task,to_task,count";
  for (const auto& [mode, report] : reports) out << "," << to_string(mode) << "_mean_ms";
  out << "\n";
  if (reports.empty() || reports.begin()->second.switches.empty()) {
    write_file(out_dir / "compare.csv", out.str());
    return;
  }
  std::map<DeployMode, std::map<PairKey, std::vector<double>>> by_mode;
  for (const auto& [mode, report] : reports) by_mode[mode] = latencies_by_pair(report);
  for (const auto& [key, values] : by_mode.begin()->second) {
    out << key.first << "," << key.second << "," << values.size();
    for (const auto& [mode, pairs] : by_mode) {
      out << "," << fixed(latency_stats(pairs.at(key)).mean_ms, 3);
    }
    out << "\n";
  }
  out << "ALL,ALL," << reports.begin()->second.switches.size();
  for (const auto& [mode, report] : reports) out << "," << fixed(report.latency.mean_ms, 3);
  out << "\n";
  write_file(out_dir / "compare.csv", out.str());
}

}  // namespace blockswitch
