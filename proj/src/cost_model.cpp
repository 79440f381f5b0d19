#include "blockswitch/cost_model.hpp"

#include <fstream>

#include "json.hpp"

namespace blockswitch {

using nlohmann::json;

void CostModel::validate() const {
  if (!(disk_to_cpu_mbps > 0.0) || !(cpu_to_gpu_mbps > 0.0)) {
    throw ConfigError("cost model bandwidths must be positive");
  }
  if (!(per_block_fixed_ms >= 0.0) || !(monolithic_init_ms >= 0.0)) {
    throw ConfigError("cost model latencies must be non-negative");
  }
}

double CostModel::disk_leg_ms(ByteCount bytes) const {
  return static_cast<double>(bytes) / (disk_to_cpu_mbps * 1000.0) + per_block_fixed_ms;
}

double CostModel::gpu_leg_ms(ByteCount bytes) const {
  return static_cast<double>(bytes) / (cpu_to_gpu_mbps * 1000.0) + per_block_fixed_ms;
}

CostModel parse_cost_model_json(const std::string& text) {
  CostModel c;
  try {
    const json doc = json::parse(text);
    c.disk_to_cpu_mbps = doc.at("disk_to_cpu_mbps").get<double>();
    c.cpu_to_gpu_mbps = doc.at("cpu_to_gpu_mbps").get<double>();
    c.per_block_fixed_ms = doc.at("per_block_fixed_ms").get<double>();
    c.monolithic_init_ms = doc.at("monolithic_init_ms").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed cost model: ") + e.what());
  }
  c.validate();
  return c;
}

CostModel load_cost_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cost model " + path.string());
  return parse_cost_model_json(std::string(std::istreambuf_iterator<char>(in), {}));
}

std::string cost_model_to_json(const CostModel& cost) {
  nlohmann::ordered_json doc;
  doc["disk_to_cpu_mbps"] = cost.disk_to_cpu_mbps;
  doc["cpu_to_gpu_mbps"] = cost.cpu_to_gpu_mbps;
  doc["per_block_fixed_ms"] = cost.per_block_fixed_ms;
  doc["monolithic_init_ms"] = cost.monolithic_init_ms;
  return doc.dump(2) + "\n";
}

CostModel calibrate_monolithic(const ModelManifest& manifest, double target_ms,
                               const CalibrationPrior& prior) {
  const double n = static_cast<double>(manifest.num_blocks());
  const double bytes = static_cast<double>(manifest.total_bytes());
  const double transfer_ms =
      target_ms - prior.monolithic_init_ms - 2.0 * n * prior.per_block_fixed_ms;
  if (!(transfer_ms > 0.0) || !(prior.disk_to_gpu_bandwidth_ratio > 0.0)) {
    throw ConfigError("calibration target leaves no time for transfers");
  }
  // bytes/gpu + bytes/(ratio*gpu) = transfer_ms, bandwidth in bytes per ms
  const double gpu_bytes_per_ms =
      bytes * (1.0 + 1.0 / prior.disk_to_gpu_bandwidth_ratio) / transfer_ms;
  CostModel c;
  c.cpu_to_gpu_mbps = gpu_bytes_per_ms / 1000.0;
  c.disk_to_cpu_mbps = c.cpu_to_gpu_mbps * prior.disk_to_gpu_bandwidth_ratio;
  c.per_block_fixed_ms = prior.per_block_fixed_ms;
  c.monolithic_init_ms = prior.monolithic_init_ms;
  return c;
}

}  // namespace blockswitch
