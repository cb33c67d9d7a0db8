// Experiment runner for rolling-horizon prioritized planning.
//
//   lmapf run --map maps/amazon_half.map -n 40 -k 5 --seeds 0-15 --out results/
//   lmapf run --map maps/desk_10x10.map --policy external --bridge tcp:5555
//   lmapf map-info --map maps/symbotic.map

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lmapf/bridge.hpp"
#include "lmapf/errors.hpp"
#include "lmapf/experiment.hpp"
#include "lmapf/grid_map.hpp"

namespace {

enum Exit { kOk = 0, kConfigError = 1, kMapError = 2, kPolicyError = 3 };

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw lmapf::ConfigError("bad integer '" + s + "'");
  return v;
}

// "0-15", "1,4,9" or a mix such as "0-3,10".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& part : split(text, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(to_u64(part));
      continue;
    }
    const std::uint64_t lo = to_u64(part.substr(0, dash));
    const std::uint64_t hi = to_u64(part.substr(dash + 1));
    if (hi < lo) throw lmapf::ConfigError("empty seed range '" + part + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw lmapf::ConfigError("no seeds given");
  return seeds;
}

std::vector<int> parse_steps(const std::string& text) {
  std::vector<int> out;
  for (const std::string& part : split(text, ',')) out.push_back(static_cast<int>(to_u64(part)));
  return out;
}

struct RunOptions {
  std::string map_path;
  std::string assigner = "amazon";
  std::string policy = "random";
  std::string seeds;
  std::string bridge;
  std::string out = "results";
  std::string exports = "metrics";
  std::string heatmap_steps = "0";
  std::string direction_steps = "0";
  int heatmap_samples = 100;
  int threads = 1;
  int connections = 1;
  lmapf::SimConfig config;
};

int run_command(RunOptions& opt) {
  using namespace lmapf;
  ExperimentSpec spec;
  try {
    spec.base = opt.config;
    spec.base.map_path = opt.map_path;
    auto assigner = assigner_from_name(opt.assigner);
    if (!assigner) throw ConfigError("unknown assigner '" + opt.assigner + "'");
    auto policy = policy_from_name(opt.policy);
    if (!policy) throw ConfigError("unknown policy '" + opt.policy + "'");
    spec.base.assigner = *assigner;
    spec.base.policy = *policy;
    spec.seeds = opt.seeds.empty() ? std::vector<std::uint64_t>{spec.base.seed} : parse_seeds(opt.seeds);
    spec.output_dir = opt.out;
    spec.threads = opt.threads;
    spec.heatmap_samples = opt.heatmap_samples;
    spec.heatmap_steps = parse_steps(opt.heatmap_steps);
    spec.direction_steps = parse_steps(opt.direction_steps);
    spec.exports.metrics_csv = false;
    for (const std::string& e : split(opt.exports, ',')) {
      if (e == "metrics") spec.exports.metrics_csv = true;
      else if (e == "heatmap") spec.exports.heatmap_csv = true;
      else if (e == "trace") spec.exports.trace_jsonl = true;
      else if (e == "directions") spec.exports.directions_csv = true;
      else throw ConfigError("unknown export '" + e + "'");
    }
    if (spec.base.policy == PolicyKind::External && opt.bridge.empty()) {
      throw ConfigError("--policy external needs --bridge stdio|tcp:PORT");
    }
    if (spec.base.policy == PolicyKind::External && (spec.exports.trace_jsonl || spec.exports.directions_csv)) {
      throw ConfigError("trace and direction exports are not available with --policy external");
    }
    spec.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::optional<GridMap> map;
  try {
    map = load_map(spec.base.map_path);
    require_regions(*map, spec.base.assigner);
  } catch (const MapError& e) {
    std::cerr << "map error: " << e.what() << '\n';
    return kMapError;
  } catch (const ConfigError& e) {
    std::cerr << "map error: " << e.what() << '\n';
    return kMapError;
  }

  try {
    std::vector<SeedRun> runs;
    if (spec.base.policy == PolicyKind::External) {
      std::vector<ServeReport> reports;
      if (opt.bridge == "stdio") {
        StreamChannel channel(std::cin, std::cout);
        reports.push_back(serve(spec.base, *map, channel, spec.seeds, std::cerr));
      } else if (opt.bridge.rfind("tcp:", 0) == 0) {
        const int port = static_cast<int>(to_u64(opt.bridge.substr(4)));
        reports = serve_tcp(spec.base, *map, port, spec.seeds, opt.connections, std::cerr, [](int bound) {
          std::cerr << "listening on 127.0.0.1:" << bound << std::endl;
        });
      } else {
        std::cerr << "config error: unknown bridge '" << opt.bridge << "'\n";
        return kConfigError;
      }
      for (std::size_t c = 0; c < reports.size(); ++c) {
        if (!reports[c].ok) {
          std::cerr << "bridge failure: " << reports[c].error << '\n';
          return kPolicyError;
        }
        for (std::size_t e = 0; e < reports[c].episodes.size(); ++e) {
          SeedRun run;
          run.seed = spec.seeds[e] + c * kConnectionSeedStride;
          run.result.metrics = reports[c].episodes[e];
          runs.push_back(std::move(run));
        }
      }
    } else {
      runs = run_seeds(spec, *map);
      for (const SeedRun& r : runs) {
        if (!r.result.metrics.valid) {
          std::cerr << "policy failure (seed " << r.seed << "): " << r.result.metrics.error << '\n';
          return kPolicyError;
        }
      }
    }
    write_artifacts(spec, *map, runs);
    if (spec.exports.metrics_csv) {
      const bool stdout_is_bridge = spec.base.policy == PolicyKind::External && opt.bridge == "stdio";
      (stdout_is_bridge ? std::cerr : std::cout) << metrics_csv(runs);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const PolicyError& e) {
    std::cerr << "policy error: " << e.what() << '\n';
    return kPolicyError;
  } catch (const AssignmentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

int map_info_command(const std::string& path) {
  try {
    const lmapf::GridMap map = lmapf::load_map(path);
    std::printf("size %dx%d (W x H), %d cells\n", map.width(), map.height(), map.size());
    std::printf("obstacle_density %.4f\n", map.obstacle_density());
    for (int k = 0; k < lmapf::kCellKindCount; ++k) {
      const auto kind = static_cast<lmapf::CellKind>(k);
      std::printf("  '%c' %zu\n", lmapf::cell_char(kind), map.cells_of(kind).size());
    }
    std::printf("diameter %d\n", lmapf::static_diameter(map));
  } catch (const lmapf::MapError& e) {
    std::cerr << "map error: " << e.what() << '\n';
    return kMapError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifelong MAPF with rolling-horizon prioritized planning"};
  app.require_subcommand(1);

  RunOptions opt;
  lmapf::SimConfig& c = opt.config;
  CLI::App* run = app.add_subcommand("run", "Run episodes over seeds and write metrics, heatmaps, and traces");
  run->add_option("--map", opt.map_path, "Map file")->required();
  run->add_option("--assigner", opt.assigner, "Task assigner: amazon | symbotic")->capture_default_str();
  run->add_option("-n,--agents", c.agents, "Number of agents N")->capture_default_str();
  run->add_option("-w,--window", c.planning_horizon, "Planning horizon w")->capture_default_str();
  run->add_option("--exec-h", c.execution_horizon, "Execution horizon h")->capture_default_str();
  run->add_option("-t,--horizon", c.sim_horizon, "Simulation horizon T")->capture_default_str();
  run->add_option("-k,--k", c.candidates, "Candidate orders per planning step K")->capture_default_str();
  run->add_option("--beta", c.beta, "Infeasibility weight in the order cost")->capture_default_str();
  run->add_option("--kappa", c.kappa, "Congestion weight in the reward")->capture_default_str();
  run->add_option("--sigma", c.sigma, "Infeasibility weight in the reward")->capture_default_str();
  run->add_option("--gamma", c.gamma, "Discount factor reported to trainers")->capture_default_str();
  run->add_option("--seed", c.seed, "Single seed")->capture_default_str();
  run->add_option("--seeds", opt.seeds, "Seed list, e.g. 0-15 or 1,2,5");
  run->add_option("--policy", opt.policy, "random | dq | external")->capture_default_str();
  run->add_option("--bridge", opt.bridge, "External policy transport: stdio | tcp:PORT");
  run->add_option("--connections", opt.connections, "Concurrent TCP clients")->capture_default_str();
  run->add_option("--out", opt.out, "Output directory")->capture_default_str();
  run->add_option("--export", opt.exports, "Comma list of metrics,heatmap,trace,directions")->capture_default_str();
  run->add_option("--heatmap-steps", opt.heatmap_steps, "Planning steps for the heatmap")->capture_default_str();
  run->add_option("--heatmap-samples", opt.heatmap_samples, "Orders sampled per heatmap step")->capture_default_str();
  run->add_option("--direction-steps", opt.direction_steps, "Planning steps for direction exports")
      ->capture_default_str();
  run->add_option("--threads", opt.threads, "Worker threads across seeds")->capture_default_str();

  std::string info_map;
  CLI::App* info = app.add_subcommand("map-info", "Print map statistics");
  info->add_option("--map", info_map, "Map file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (*run) return run_command(opt);
  if (*info) return map_info_command(info_map);
  return kConfigError;
}
