// blockswitch: skip-set selection, transition estimation and task-switch
// replay over a tiered (disk / host / device) block store.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "blockswitch/block_store.hpp"
#include "blockswitch/cost_model.hpp"
#include "blockswitch/synthetic_instance.hpp"
#include "blockswitch/trace_replay.hpp"

namespace bs = blockswitch;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kSelection = 3,
  kReplay = 4,
  kIo = 5,
};

struct Overrides {
  std::string config;
  std::optional<std::string> manifest, tasks, log, trace, cost_model, mode;
  std::optional<bs::ByteCount> gpu_budget, cpu_budget;
  std::optional<std::size_t> k;
  std::optional<double> window, correlation, skew;
  std::optional<std::uint64_t> seed;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Scenario config (JSON)")->required();
  cmd->add_option("--manifest", o.manifest, "Override manifest path");
  cmd->add_option("--tasks", o.tasks, "Override task file path");
  cmd->add_option("--log", o.log, "Override transition log path");
  cmd->add_option("--trace", o.trace, "Override replay trace path");
  cmd->add_option("--cost-model", o.cost_model, "Override cost model path");
  cmd->add_option("--mode", o.mode, "monolithic | sparse_no_split | split_only | full_method");
  cmd->add_option("--gpu-budget", o.gpu_budget, "Device budget in bytes");
  cmd->add_option("--cpu-budget", o.cpu_budget, "Host cache budget in bytes");
  cmd->add_option("--k", o.k, "Successors kept per task");
  cmd->add_option("--window", o.window, "Compute window per inference step (ms)");
  cmd->add_option("--correlation", o.correlation, "Synthetic oracle task correlation");
  cmd->add_option("--skew", o.skew, "Synthetic oracle importance skew");
  cmd->add_option("--seed", o.seed, "Seed for synthetic oracles (required for them)");
}

bs::ScenarioConfig resolve_config(const Overrides& o) {
  bs::ScenarioConfig c = bs::load_config(o.config);
  if (o.manifest) c.manifest = *o.manifest;
  if (o.tasks) c.tasks = *o.tasks;
  if (o.log) c.log = *o.log;
  if (o.trace) c.trace = *o.trace;
  if (o.cost_model) c.cost_model = *o.cost_model;
  if (o.mode) c.mode = bs::parse_mode(*o.mode);
  if (o.gpu_budget) c.gpu_budget_bytes = *o.gpu_budget;
  if (o.cpu_budget) c.cpu_budget_bytes = *o.cpu_budget;
  if (o.k) c.k = *o.k;
  if (o.window) c.compute_window_ms = *o.window;
  if (o.correlation) c.oracle.correlation = *o.correlation;
  if (o.skew) c.oracle.skew = *o.skew;
  if (c.oracle.kind == bs::OracleSpec::Kind::synthetic) {
    if (!o.seed) throw bs::ConfigError("--seed is required for synthetic oracles");
    c.seed = *o.seed;
  }
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw bs::StoreError("cannot write " + path);
  out << text;
}

void print_summary(const bs::ReplayReport& r) {
  std::printf("%-16s switches=%zu mean=%.3f ms median=%.3f ms max=%.3f ms hit_rate=%.3f\n",
              bs::to_string(r.mode), r.latency.count, r.latency.mean_ms, r.latency.median_ms,
              r.latency.max_ms, r.prestage_hit_rate);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tiered block store and multi-task skip-set switch simulator"};
  app.require_subcommand(1);

  Overrides sel_o;
  std::string strategy = "aligned";
  std::string sel_out;
  auto* select = app.add_subcommand("select", "Build per-task skip sets");
  add_override_flags(select, sel_o);
  select->add_option("--strategy", strategy, "aligned | independent");
  select->add_option("--out", sel_out, "Output JSON file (default stdout)");

  Overrides est_o;
  std::string est_out;
  auto* estimate = app.add_subcommand("estimate", "Estimate the task transition model");
  add_override_flags(estimate, est_o);
  estimate->add_option("--out", est_out, "Output JSON file (default stdout)");

  Overrides rep_o;
  std::string rep_out;
  auto* replay = app.add_subcommand("replay", "Replay the trace under one deploy mode");
  add_override_flags(replay, rep_o);
  replay->add_option("--out", rep_out, "Report directory")->required();

  Overrides cmp_o;
  std::string cmp_out;
  auto* compare = app.add_subcommand("compare", "Replay the trace under all four modes");
  add_override_flags(compare, cmp_o);
  compare->add_option("--out", cmp_out, "Report directory")->required();

  std::string store_manifest, store_root;
  auto* init = app.add_subcommand("init-store", "Write one filler shard per block");
  init->add_option("--manifest", store_manifest, "Manifest JSON")->required();
  init->add_option("--root", store_root, "Shard directory")->required();

  std::string cal_manifest, cal_out;
  double cal_target = 1566.5;
  bs::CalibrationPrior prior;
  auto* calibrate = app.add_subcommand("calibrate", "Fit link bandwidths to a full-reload time");
  calibrate->add_option("--manifest", cal_manifest, "Manifest JSON")->required();
  calibrate->add_option("--target-ms", cal_target, "Monolithic reload latency to match");
  calibrate->add_option("--init-ms", prior.monolithic_init_ms, "Full reinitialization cost");
  calibrate->add_option("--fixed-ms", prior.per_block_fixed_ms, "Per-block fixed cost");
  calibrate->add_option("--bandwidth-ratio", prior.disk_to_gpu_bandwidth_ratio,
                        "disk_to_cpu / cpu_to_gpu bandwidth");
  calibrate->add_option("--out", cal_out, "Output JSON file (default stdout)");

  std::uint64_t trace_seed = 0;
  std::size_t trace_len = 100, trace_dwell = 3;
  std::string trace_start = "Car", trace_out;
  auto* gen_trace = app.add_subcommand("gen-trace", "Sample a driving-style task trace");
  gen_trace->add_option("--seed", trace_seed, "RNG seed")->required();
  gen_trace->add_option("--length", trace_len, "Number of inference steps");
  gen_trace->add_option("--max-dwell", trace_dwell, "Longest stay on one task");
  gen_trace->add_option("--start", trace_start, "First task");
  gen_trace->add_option("--out", trace_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*select) {
      const auto scenario = bs::load_scenario(resolve_config(sel_o));
      const auto strat = strategy == "independent" ? bs::SelectionStrategy::independent
                         : strategy == "aligned"
                             ? bs::SelectionStrategy::aligned
                             : throw bs::ConfigError("unknown strategy '" + strategy + "'");
      write_text(sel_out, bs::skip_sets_to_json(bs::select_skip_sets(scenario, strat)));
    } else if (*estimate) {
      const auto scenario = bs::load_scenario(resolve_config(est_o));
      write_text(est_out, bs::model_to_json(bs::build_transition_model(scenario.log, scenario.k)));
    } else if (*replay) {
      const auto report = bs::run_replay(resolve_config(rep_o));
      bs::emit_reports(report, rep_out);
      print_summary(report);
    } else if (*compare) {
      const auto reports = bs::compare_modes(resolve_config(cmp_o));
      bs::emit_comparison(reports, cmp_out);
      for (const auto& [mode, report] : reports) print_summary(report);
    } else if (*init) {
      const auto store = bs::init_store(bs::load_manifest(store_manifest), store_root);
      std::printf("wrote %zu shards to %s\n", store.manifest().num_blocks(),
                  store.root().string().c_str());
    } else if (*calibrate) {
      write_text(cal_out, bs::cost_model_to_json(
                              bs::calibrate_monolithic(bs::load_manifest(cal_manifest), cal_target,
                                                       prior)));
    } else if (*gen_trace) {
      std::string text;
      for (const auto& t : bs::generate_markov_trace(trace_seed, bs::driving_task_chain(),
                                                     trace_start, trace_len, trace_dwell)) {
        text += t + "\n";
      }
      write_text(trace_out, text);
    }
  } catch (const bs::SelectionError& e) {
    std::cerr << "selection error: " << e.what() << "\n";
    return kSelection;
  } catch (const bs::OracleError& e) {
    std::cerr << "selection error: " << e.what() << "\n";
    return kSelection;
  } catch (const bs::ReplayError& e) {
    std::cerr << "replay error: " << e.what() << "\n";
    return kReplay;
  } catch (const bs::StoreError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const bs::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
