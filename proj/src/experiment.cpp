#include "lmapf/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lmapf/errors.hpp"
#include "lmapf/policies.hpp"

namespace lmapf {

using nlohmann::json;

namespace {

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

const StepRecord& find_step(const EpisodeTrace& trace, int step) {
  for (const StepRecord& r : trace.steps) {
    if (r.step == step) return r;
  }
  throw std::out_of_range("step " + std::to_string(step) + " not in trace");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

void ExperimentSpec::validate() const {
  base.validate();
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (heatmap_samples < 1) throw ConfigError("heatmap samples must be >= 1");
  if (exports.heatmap_csv && base.policy == PolicyKind::External) {
    throw ConfigError("heatmap export needs a policy that can be resampled (random or dq)");
  }
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return a;
}

std::vector<SeedRun> run_seeds(const ExperimentSpec& spec, const GridMap& map) {
  std::vector<SeedRun> runs(spec.seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      try {
        SimConfig config = spec.base;
        config.seed = spec.seeds[i];
        auto policy = make_builtin_policy(config.policy, config.seed);
        runs[i].seed = config.seed;
        runs[i].result = run_episode(config, map, *policy, true);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int count = std::max(1, std::min<int>(spec.threads, static_cast<int>(runs.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return runs;
}

std::string metrics_csv(const std::vector<SeedRun>& runs) {
  std::ostringstream out;
  out << "seed,tpa,total_throughput,infeasibility_rate,planning_steps\n";
  std::vector<double> tpa, total, rate, steps;
  for (const SeedRun& r : runs) {
    const EpisodeMetrics& m = r.result.metrics;
    out << r.seed << ',' << fixed4(m.tpa) << ',' << m.total_throughput << ',' << fixed4(m.infeasibility_rate) << ','
        << m.planning_steps << '\n';
    tpa.push_back(m.tpa);
    total.push_back(m.total_throughput);
    rate.push_back(m.infeasibility_rate);
    steps.push_back(m.planning_steps);
  }
  const Aggregate a_tpa = aggregate(tpa), a_total = aggregate(total), a_rate = aggregate(rate),
                  a_steps = aggregate(steps);
  out << "mean," << fixed4(a_tpa.mean) << ',' << fixed4(a_total.mean) << ',' << fixed4(a_rate.mean) << ','
      << fixed4(a_steps.mean) << '\n';
  out << "std," << fixed4(a_tpa.stddev) << ',' << fixed4(a_total.stddev) << ',' << fixed4(a_rate.stddev) << ','
      << fixed4(a_steps.stddev) << '\n';
  return out.str();
}

std::string timing_csv(const std::vector<SeedRun>& runs) {
  std::ostringstream out;
  out << "seed,mean_solve_s,max_solve_s\n";
  std::vector<double> mean, max;
  for (const SeedRun& r : runs) {
    const EpisodeMetrics& m = r.result.metrics;
    out << r.seed << ',' << fixed4(m.mean_solve_s) << ',' << fixed4(m.max_solve_s) << '\n';
    mean.push_back(m.mean_solve_s);
    max.push_back(m.max_solve_s);
  }
  out << "mean," << fixed4(aggregate(mean).mean) << ',' << fixed4(aggregate(max).mean) << '\n';
  return out.str();
}

std::string trace_jsonl(const EpisodeTrace& trace, const GridMap& map) {
  std::string out;
  for (const StepRecord& r : trace.steps) {
    json agents = json::array();
    for (std::size_t i = 0; i < r.locations.size(); ++i) {
      std::string moves;
      for (Move m : r.moves[i]) moves += move_name(m).front();
      agents.push_back({{"loc", r.locations[i]},
                        {"row", map.row(r.locations[i])},
                        {"col", map.col(r.locations[i])},
                        {"goal", r.goals[i].empty() ? -1 : r.goals[i].front()},
                        {"goals", r.goals[i]},
                        {"move", move_name(r.moves[i].front())},
                        {"sp_move", move_name(r.sp_moves[i])},
                        {"moves", moves},
                        {"d", r.reward.distance[i]},
                        {"c", r.reward.congested[i]},
                        {"s", r.reward.infeasible[i]}});
    }
    json line = {{"step", r.step},
                 {"timestep", r.timestep},
                 {"chosen_order", r.order.agents},
                 {"chosen_index", r.chosen_index},
                 {"cost", r.cost},
                 {"per_agent", agents},
                 {"completions", r.completions},
                 {"reward", r.reward.reward},
                 {"repaired", r.repaired},
                 {"solve_ms", r.solve_ms}};
    out += line.dump();
    out.push_back('\n');
  }
  return out;
}

std::string export_heatmap(const EpisodeTrace& trace, const GridMap& map, PolicyKind policy,
                           const std::vector<int>& steps, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("export_heatmap: samples must be >= 1");
  if (policy == PolicyKind::External) throw std::invalid_argument("export_heatmap: external policy cannot be resampled");
  const DistanceOracle distances(map);
  std::ostringstream out;
  out << "step,agent,row,col,loc,mean_rank\n";
  for (int step : steps) {
    const StepRecord& r = find_step(trace, step);
    const std::size_t n = r.locations.size();
    WorldState frozen;
    frozen.timestep = r.timestep;
    for (std::size_t i = 0; i < n; ++i) {
      AgentState a;
      a.id = static_cast<int>(i);
      a.location = r.locations[i];
      a.goals.assign(r.goals[i].begin(), r.goals[i].end());
      frozen.agents.push_back(std::move(a));
    }
    std::vector<PriorityOrder> orders;
    if (policy == PolicyKind::Random) {
      Rng rng = Rng::stream(seed, 1000 + static_cast<std::uint64_t>(step));
      orders = random_orders(n, samples, rng);
    } else {
      orders.assign(static_cast<std::size_t>(samples), dq_order(frozen, distances));
    }
    std::vector<double> rank_sum(n, 0.0);
    for (const PriorityOrder& o : orders) {
      const auto ranks = priority_ranks(o);
      for (std::size_t i = 0; i < n; ++i) rank_sum[i] += ranks[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Location loc = r.locations[i];
      out << step << ',' << i << ',' << map.row(loc) << ',' << map.col(loc) << ',' << loc << ','
          << fixed4(rank_sum[i] / samples) << '\n';
    }
  }
  return out.str();
}

double direction_agreement(const StepRecord& record) {
  if (record.locations.empty()) return 1.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < record.locations.size(); ++i) {
    if (record.moves[i].front() == record.sp_moves[i]) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(record.locations.size());
}

std::string export_directions(const EpisodeTrace& trace, const GridMap& map, int step) {
  const StepRecord& r = find_step(trace, step);
  std::ostringstream out;
  out << "step,agent,row,col,loc,sp_move,move,agree\n";
  for (std::size_t i = 0; i < r.locations.size(); ++i) {
    const Location loc = r.locations[i];
    const Move executed = r.moves[i].front();
    out << step << ',' << i << ',' << map.row(loc) << ',' << map.col(loc) << ',' << loc << ','
        << move_name(r.sp_moves[i]) << ',' << move_name(executed) << ',' << (executed == r.sp_moves[i] ? 1 : 0)
        << '\n';
  }
  return out.str();
}

void write_artifacts(const ExperimentSpec& spec, const GridMap& map, const std::vector<SeedRun>& runs) {
  std::filesystem::create_directories(spec.output_dir);
  if (spec.exports.metrics_csv) {
    write_file(spec.output_dir / "metrics.csv", metrics_csv(runs));
    write_file(spec.output_dir / "timing.csv", timing_csv(runs));
  }
  for (const SeedRun& run : runs) {
    const std::string tag = "seed" + std::to_string(run.seed);
    const EpisodeTrace& trace = run.result.trace;
    if (spec.exports.trace_jsonl) write_file(spec.output_dir / (tag + "_trace.jsonl"), trace_jsonl(trace, map));
    if (spec.exports.heatmap_csv) {
      write_file(spec.output_dir / (tag + "_heatmap.csv"),
                 export_heatmap(trace, map, spec.base.policy, spec.heatmap_steps, spec.heatmap_samples, run.seed));
    }
    if (spec.exports.directions_csv) {
      for (int step : spec.direction_steps) {
        write_file(spec.output_dir / (tag + "_directions_step" + std::to_string(step) + ".csv"),
                   export_directions(trace, map, step));
      }
    }
  }
}

}  // namespace lmapf
