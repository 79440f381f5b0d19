// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "blockswitch/brute_force.hpp"
#include "blockswitch/synthetic_instance.hpp"
#include "blockswitch/trace_replay.hpp"

using namespace blockswitch;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<TaskSpec> synthetic_tasks(std::size_t count, double lambda, std::size_t max_remove) {
  std::vector<TaskSpec> tasks;
  for (std::size_t t = 0; t < count; ++t) {
    tasks.push_back(TaskSpec{"task" + std::to_string(t), lambda, max_remove,
                             static_cast<double>(count - t)});
  }
  return tasks;
}

OracleMap oracles_of(const SyntheticInstance& inst, const std::vector<TaskSpec>& tasks) {
  OracleMap m;
  for (std::size_t t = 0; t < tasks.size(); ++t) m[tasks[t].task_id] = inst.oracle(t);
  return m;
}

double mean_pairwise_jaccard(const std::map<TaskId, Selection>& sel) {
  double sum = 0;
  int pairs = 0;
  for (auto i = sel.begin(); i != sel.end(); ++i) {
    for (auto j = std::next(i); j != sel.end(); ++j) {
      sum += jaccard(i->second.skip, j->second.skip);
      ++pairs;
    }
  }
  return pairs ? sum / pairs : 1.0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1
Outcome greedy_feasibility() {
  const std::size_t sizes[] = {8, 16, 32};
  int violations = 0;
  std::size_t removed = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = sizes[seed % 3];
    const auto inst = gen_instance(1000 + seed, n, 1, 0.5, 1.0 + static_cast<double>(seed % 4));
    const TaskSpec t{"A", 0.9, n / 2, 0};
    const auto oracle = inst.oracle(0);
    const auto sel = greedy_skip_select(t, *oracle);
    const double s_full = oracle->full_score();
    if (!(oracle->evaluate(sel.skip.active(n)) >= 0.9 * s_full)) ++violations;
    if (sel.skip.skipped.size() > t.max_remove) ++violations;
    removed += sel.skip.skipped.size();
  }
  return {violations == 0, std::to_string(violations) + " violations over 200 instances, " +
                               std::to_string(removed) + " blocks skipped in total"};
}

// 2
Outcome greedy_equivalence() {
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 1 + seed % 8;
    const auto inst = gen_instance(5000 + seed, n, 1, 0.0, 1.0 + static_cast<double>(seed % 3));
    const auto oracle = inst.oracle(0);
    const auto sel = greedy_skip_select(TaskSpec{"A", 0.9, n, 0}, *oracle);
    const auto ref = reference::brute_force_greedy_replay(*oracle, 0.9, n);
    if (sel.skip.skipped != ref.skipped || sel.removal_order != ref.removal_order) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 200 instances"};
}

// 3
Outcome alignment_overlap() {
  const auto tasks = synthetic_tasks(5, 0.9, 3);
  double aligned = 0, independent = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = gen_instance(9000 + seed, 32, 5, 0.7);
    const auto oracles = oracles_of(inst, tasks);
    aligned += mean_pairwise_jaccard(build_all_tasks(tasks, oracles, SelectionStrategy::aligned));
    independent +=
        mean_pairwise_jaccard(build_all_tasks(tasks, oracles, SelectionStrategy::independent));
  }
  aligned /= 100;
  independent /= 100;
  const bool ok = aligned > independent && aligned >= 0.6 && independent <= 0.4 &&
                  aligned - independent >= 0.15;
  return {ok, "aligned mean " + fmt("%.4f", aligned) + ", independent mean " +
                  fmt("%.4f", independent) + ", difference " + fmt("%.4f", aligned - independent)};
}

// 4
Scenario random_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Scenario s;
  const std::size_t n = 8 + rng() % 25;
  std::vector<ByteCount> sizes(n);
  for (auto& b : sizes) b = (50 + rng() % 400) * 1'000'000;
  s.manifest = make_manifest("random", sizes);
  const auto chain = driving_task_chain();
  const auto inst = gen_instance(rng(), n, chain.rows.size(), unit_uniform(rng), 1.0 + rng() % 8);
  for (std::size_t t = 0; t < chain.rows.size(); ++t) {
    const auto& id = chain.rows[t].first;
    s.tasks.push_back(TaskSpec{id, 0.8 + 0.1 * unit_uniform(rng), n / 2, static_cast<double>(rng() % 5)});
    s.oracles[id] = inst.oracle(t);
  }
  s.log = TaskLog{generate_markov_trace(rng(), chain, "Car", 500, 3)};
  s.trace = generate_markov_trace(rng(), chain, chain.rows[rng() % 5].first, 80, 4);
  s.cost = CostModel{500.0 + rng() % 10000, 1000.0 + rng() % 30000,
                     0.1 * static_cast<double>(rng() % 20), static_cast<double>(rng() % 300)};
  s.gpu_budget_bytes = s.manifest.total_bytes() + rng() % s.manifest.total_bytes();
  s.cpu_budget_bytes = s.manifest.largest_block() + rng() % s.manifest.total_bytes();
  s.k = 1 + rng() % 3;
  s.compute_window_ms = static_cast<double>(rng() % 200);
  return s;
}

Outcome mode_ordering() {
  std::size_t transitions = 0;
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto sc = random_scenario(777 + seed);
    const auto selections = select_skip_sets(sc, SelectionStrategy::aligned);
    std::vector<std::vector<SwitchReport>> per_mode;
    for (DeployMode m : kAllModes) {
      per_mode.push_back(replay_trace(sc, m, selections, SelectionStrategy::aligned).switches);
    }
    for (std::size_t i = 0; i < per_mode[0].size(); ++i) {
      ++transitions;
      for (std::size_t m = 1; m < per_mode.size(); ++m) {
        if (per_mode[m][i].position != per_mode[0][i].position ||
            per_mode[m - 1][i].latency_ms < per_mode[m][i].latency_ms) {
          ++violations;
        }
      }
    }
  }
  return {violations == 0 && transitions > 0,
          std::to_string(violations) + " violations over " + std::to_string(transitions) +
              " transitions in 50 scenarios"};
}

// 5
Outcome calibrated_speedup() {
  const auto sc = load_scenario(load_config(fs::path(BLOCKSWITCH_DATA_DIR) / "driving" / "config.json"));
  const auto reports = compare_modes(sc);
  const auto& mono = reports.at(DeployMode::monolithic);
  const auto& sparse = reports.at(DeployMode::sparse_no_split);
  const auto& full = reports.at(DeployMode::full_method);

  double sparsity = 0;
  for (const auto& [id, sel] : full.selections) {
    sparsity += static_cast<double>(sel.skip.skipped.size()) / sc.manifest.num_blocks();
  }
  sparsity /= static_cast<double>(full.selections.size());

  const double mean_speedup = sparse.latency.mean_ms / full.latency.mean_ms;

  // Per-pair means over the frequent pairs (t, t') with t' among the top-K successors of t.
  const auto model = build_transition_model(sc.log, sc.k);
  auto pair_means = [](const ReplayReport& r) {
    std::map<std::pair<TaskId, TaskId>, std::pair<double, int>> acc;
    for (const auto& s : r.switches) {
      auto& a = acc[{s.from_task, s.to_task}];
      a.first += s.latency_ms;
      a.second += 1;
    }
    std::map<std::pair<TaskId, TaskId>, double> out;
    for (const auto& [k, v] : acc) out[k] = v.first / v.second;
    return out;
  };
  const auto sparse_pairs = pair_means(sparse);
  const auto full_pairs = pair_means(full);
  double best = 0;
  std::string best_pair = "none";
  for (const auto& [key, full_ms] : full_pairs) {
    const auto& succ = model.successors_of(key.first);
    if (std::find(succ.begin(), succ.end(), key.second) == succ.end()) continue;
    const double ratio = full_ms > 0 ? sparse_pairs.at(key) / full_ms
                                     : std::numeric_limits<double>::infinity();
    if (ratio > best) {
      best = ratio;
      best_pair = key.first + "->" + key.second;
    }
  }

  const bool mono_ok = std::abs(mono.latency.mean_ms - 1566.5) <= 1e-3;
  const bool sparsity_ok = sparsity >= 0.465 && sparsity <= 0.505;
  const bool ok = mono_ok && sparsity_ok && mean_speedup >= 6.6 && best >= 8.1;
  return {ok, "monolithic " + fmt("%.3f", mono.latency.mean_ms) + " ms, sparsity " +
                  fmt("%.4f", sparsity) + ", mean speedup " + fmt("%.2f", mean_speedup) +
                  "x, best frequent pair " + best_pair + " " + fmt("%.2f", best) + "x"};
}

// 6
Outcome zero_fetch() {
  const auto manifest = make_uniform_manifest("llava", 32, 400'000'000);
  const CostModel cost{13867.8, 27735.6, 0.5, 150.0};
  BlockSet skip_from, skip_to;
  for (BlockId b = 16; b < 32; ++b) skip_from.insert(b);
  skip_to = skip_from;
  skip_to.insert(7);  // the incoming task drops one more block
  const std::map<TaskId, SkipSet> sets{{"Car", {"Car", skip_from}},
                                       {"TrafficLight", {"TrafficLight", skip_to}}};
  auto state = make_cache_state(manifest.total_bytes(), manifest.total_bytes() / 2);
  state.gpu_resident = sets.at("Car").active(32);
  bool ok = true;
  std::string detail;
  for (DeployMode m : {DeployMode::split_only, DeployMode::full_method}) {
    const auto r = execute_switch(state, "Car", "TrafficLight", m, sets, cost, manifest).report;
    ok = ok && r.bytes_disk_to_cpu == 0 && r.bytes_cpu_to_gpu == 0 && r.transfer_ms == 0.0 &&
         r.latency_ms == 0.0;
    detail += std::string(to_string(m)) + ": " + std::to_string(r.bytes_disk_to_cpu) + "+" +
              std::to_string(r.bytes_cpu_to_gpu) + " bytes, " + fmt("%.3f", r.transfer_ms) +
              " ms; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// 7
Outcome budget_safety() {
  std::mt19937_64 rng(20261014);
  std::size_t ops = 0, rejected = 0, violations = 0;
  for (int seq = 0; seq < 10000; ++seq) {
    const std::size_t n = 2 + rng() % 14;
    std::vector<ByteCount> sizes(n);
    for (auto& b : sizes) b = 1 + rng() % 100;
    const auto manifest = make_manifest("m", sizes);
    auto state = make_cache_state(rng() % (manifest.total_bytes() + 1),
                                  rng() % (manifest.total_bytes() + 1));
    auto random_set = [&] {
      BlockSet s;
      for (BlockId b = 0; b < n; ++b) {
        if (rng() % 4 == 0) s.insert(b);
      }
      return s;
    };
    for (int step = 0; step < 20; ++step) {
      ++ops;
      const CacheState before = state;
      const BlockSet blocks = random_set();
      const EvictionHints hints{random_set(), {}};
      try {
        switch (rng() % 4) {
          case 0: state = stage_to_cpu(state, manifest, blocks, hints).state; break;
          case 1: state = insert_to_gpu(state, manifest, blocks, hints).state; break;
          case 2: {
            const Tier tier = rng() % 2 ? Tier::gpu : Tier::cpu;
            state = evict(state, manifest, tier, rng() % (manifest.total_bytes() / 2 + 1),
                          hints.protected_blocks, {})
                        .state;
            break;
          }
          default: state = touch(state, blocks); break;
        }
      } catch (const BudgetExceeded&) {
        ++rejected;
        if (!(state == before)) ++violations;
      } catch (const StagingOrderError&) {
        if (!(state == before)) ++violations;
      }
      if (!budgets_hold(state, manifest)) ++violations;
    }
  }
  return {violations == 0 && rejected > 0,
          std::to_string(violations) + " violations over " + std::to_string(ops) +
              " operations, " + std::to_string(rejected) + " rejected with budget-exceeded"};
}

// 8
Outcome determinism() {
  const auto root = fs::path(BLOCKSWITCH_TMP_DIR) / "acceptance_determinism";
  fs::remove_all(root);
  std::size_t files = 0, differing = 0;
  for (const char* fixture : {"driving", "short_drive"}) {
    const auto cfg = load_config(fs::path(BLOCKSWITCH_DATA_DIR) / fixture / "config.json");
    for (int run = 0; run < 2; ++run) {
      const auto base = root / fixture / std::to_string(run);
      emit_reports(run_replay(cfg), base / "replay");
      emit_comparison(compare_modes(cfg), base / "compare");
    }
    const auto a = root / fixture / "0";
    const auto b = root / fixture / "1";
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
      if (!entry.is_regular_file()) continue;
      ++files;
      const auto other = b / fs::relative(entry.path(), a);
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
  }
  return {differing == 0 && files > 0, std::to_string(differing) + " of " +
                                           std::to_string(files) + " output files differ"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "greedy feasibility", 10.0, greedy_feasibility},
      {2, "greedy/brute-force equivalence", 30.0, greedy_equivalence},
      {3, "alignment raises overlap", 60.0, alignment_overlap},
      {4, "mode ordering", 0.0, mode_ordering},
      {5, "calibrated speedup", 30.0, calibrated_speedup},
      {6, "zero-fetch switch", 0.0, zero_fetch},
      {7, "budget safety", 0.0, budget_safety},
      {8, "determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      out.pass = false;
      out.detail += "; over the " + fmt("%.0f", c.time_limit_s) + " s limit";
    }
    std::printf("%s [%d] %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.detail.c_str(), secs);
    if (!out.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
