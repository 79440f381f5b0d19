#pragma once

#include <filesystem>
#include <string>

#include "blockswitch/block_store.hpp"

namespace blockswitch {

// Two-link transfer cost model in virtual milliseconds. Bandwidths are in
// MB/s with 1 MB = 10^6 bytes.
struct CostModel {
  double disk_to_cpu_mbps = 1.0;
  double cpu_to_gpu_mbps = 1.0;
  double per_block_fixed_ms = 0.0;
  double monolithic_init_ms = 0.0;

  void validate() const;
  double disk_leg_ms(ByteCount bytes) const;
  double gpu_leg_ms(ByteCount bytes) const;
};

CostModel parse_cost_model_json(const std::string& text);
CostModel load_cost_model(const std::filesystem::path& path);
std::string cost_model_to_json(const CostModel& cost);

// Quantities held fixed while the bandwidths are solved for.
struct CalibrationPrior {
  double monolithic_init_ms = 150.0;
  double per_block_fixed_ms = 0.5;
  // disk_to_cpu_mbps / cpu_to_gpu_mbps
  double disk_to_gpu_bandwidth_ratio = 0.5;
};

// Chooses both bandwidths so that a full monolithic reload of `manifest`
// (reinit plus every block over both links) takes exactly target_ms.
CostModel calibrate_monolithic(const ModelManifest& manifest, double target_ms,
                               const CalibrationPrior& prior = {});

}  // namespace blockswitch
