#include "blockswitch/trace_replay.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "blockswitch/prefetcher.hpp"

namespace blockswitch {

double round_ms(double ms) { return std::round(ms * 1000.0) / 1000.0; }

LatencyStats latency_stats(const std::vector<double>& rounded) {
  LatencyStats st;
  st.count = rounded.size();
  if (rounded.empty()) return st;
  double sum = 0.0;
  for (double v : rounded) sum += v;
  st.mean_ms = sum / static_cast<double>(rounded.size());
  std::vector<double> sorted = rounded;
  std::sort(sorted.begin(), sorted.end());
  const auto mid = sorted.size() / 2;
  st.median_ms = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
  st.max_ms = sorted.back();
  return st;
}

SelectionStrategy strategy_for(DeployMode mode) {
  return mode == DeployMode::full_method ? SelectionStrategy::aligned
                                         : SelectionStrategy::independent;
}

std::map<TaskId, Selection> select_skip_sets(const Scenario& scenario,
                                             SelectionStrategy strategy) {
  try {
    return build_all_tasks(scenario.tasks, scenario.oracles, strategy);
  } catch (const Error& e) {
    throw SelectionError(std::string("skip-set selection failed: ") + e.what());
  }
}

namespace {

std::map<TaskId, SkipSet> skip_sets_of(const std::map<TaskId, Selection>& selections) {
  std::map<TaskId, SkipSet> out;
  for (const auto& [id, sel] : selections) out.emplace(id, sel.skip);
  return out;
}

}  // namespace

ReplayReport replay_trace(const Scenario& scenario, DeployMode mode,
                          const std::map<TaskId, Selection>& selections,
                          SelectionStrategy strategy) {
  const auto& manifest = scenario.manifest;
  const auto n = manifest.num_blocks();
  const auto skip_sets = skip_sets_of(selections);

  ReplayReport report;
  report.mode = mode;
  report.strategy = strategy;
  report.selections = selections;
  report.config_echo = scenario.config_echo;
  for (const auto& t : scenario.tasks) report.task_order.push_back(t.task_id);
  for (const auto& a : report.task_order) {
    auto& row = report.jaccard.emplace_back();
    for (const auto& b : report.task_order) {
      row.push_back(jaccard(skip_sets.at(a), skip_sets.at(b)));
    }
  }
  if (scenario.trace.empty()) return report;

  const TransitionModel model = build_transition_model(scenario.log, scenario.k);
  const bool prefetch = mode == DeployMode::full_method;
  CacheState state = make_cache_state(scenario.gpu_budget_bytes, scenario.cpu_budget_bytes);
  TaskId current = scenario.trace.front();
  double gpu_bytes_sum = 0.0;
  std::vector<double> rounded;

  for (std::size_t i = 0; i < scenario.trace.size(); ++i) {
    try {
      const TaskId& task = scenario.trace[i];
      if (i == 0 || task != current) {
        const UsefulnessMap usefulness =
            prefetch ? next_task_usefulness(task, model, skip_sets, manifest) : UsefulnessMap{};
        auto sw = execute_switch(state, i == 0 ? TaskId{} : current, task, mode, skip_sets,
                                 scenario.cost, manifest, usefulness);
        sw.report.position = i;
        state = std::move(sw.state);
        if (i == 0) {
          report.warmup = std::move(sw.report);
        } else {
          rounded.push_back(round_ms(sw.report.latency_ms));
          report.switches.push_back(std::move(sw.report));
        }
        current = task;
      }
      state = touch(std::move(state), skip_sets.at(current).active(n));
      gpu_bytes_sum += static_cast<double>(gpu_utilization(state, manifest));

      if (prefetch) {
        const auto tiers = assign_tiers(current, skip_sets, model, manifest);
        const auto plan = plan_prefetch(current, tiers, model, skip_sets, state, manifest);
        auto staged = execute_prefetch(plan, state, scenario.compute_window_ms, scenario.cost,
                                       manifest, tiers);
        state = std::move(staged.state);
        report.prefetch_bytes += staged.bytes_moved;
        report.prefetch_blocks += staged.staged.size();
      }
    } catch (const ReplayError&) {
      throw;
    } catch (const Error& e) {
      throw ReplayError(i, e.what());
    }
  }

  std::size_t prestaged = 0;
  std::size_t needed = 0;
  for (const auto& sw : report.switches) {
    report.total_bytes_disk_to_cpu += sw.bytes_disk_to_cpu;
    report.total_bytes_cpu_to_gpu += sw.bytes_cpu_to_gpu;
    prestaged += sw.blocks_prestaged;
    needed += sw.blocks_prestaged + sw.blocks_fetched;
  }
  report.prestage_hit_rate =
      needed == 0 ? 1.0 : static_cast<double>(prestaged) / static_cast<double>(needed);
  report.latency = latency_stats(rounded);
  report.mean_gpu_resident_bytes = gpu_bytes_sum / static_cast<double>(scenario.trace.size());
  return report;
}

ReplayReport run_replay(const Scenario& scenario, DeployMode mode) {
  scenario.validate();
  const auto strategy = strategy_for(mode);
  return replay_trace(scenario, mode, select_skip_sets(scenario, strategy), strategy);
}

ReplayReport run_replay(const ScenarioConfig& config) {
  return run_replay(load_scenario(config), config.mode);
}

std::map<DeployMode, ReplayReport> compare_modes(const Scenario& scenario) {
  scenario.validate();
  const auto aligned = select_skip_sets(scenario, SelectionStrategy::aligned);
  const auto independent = select_skip_sets(scenario, SelectionStrategy::independent);

  std::map<DeployMode, std::future<ReplayReport>> pending;
  for (DeployMode mode : kAllModes) {
    const auto strategy = strategy_for(mode);
    const auto& selections = strategy == SelectionStrategy::aligned ? aligned : independent;
    pending.emplace(mode, std::async(std::launch::async, [&scenario, mode, &selections, strategy] {
                      return replay_trace(scenario, mode, selections, strategy);
                    }));
  }
  std::map<DeployMode, ReplayReport> out;
  for (auto& [mode, f] : pending) out.emplace(mode, f.get());
  return out;
}

std::map<DeployMode, ReplayReport> compare_modes(const ScenarioConfig& config) {
  return compare_modes(load_scenario(config));
}

}  // namespace blockswitch
