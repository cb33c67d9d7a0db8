#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lmapf/grid_map.hpp"
#include "lmapf/sim.hpp"

namespace lmapf {

struct ExportSet {
  bool metrics_csv = true;
  bool heatmap_csv = false;
  bool trace_jsonl = false;
  bool directions_csv = false;
};

struct ExperimentSpec {
  SimConfig base;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
  ExportSet exports;
  std::vector<int> heatmap_steps{0};
  int heatmap_samples = 100;
  std::vector<int> direction_steps{0};
  int threads = 1;

  // Throws ConfigError.
  void validate() const;
};

struct SeedRun {
  std::uint64_t seed = 0;
  EpisodeResult result;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single seed
};

Aggregate aggregate(const std::vector<double>& values);

// Runs every seed of the spec with a built-in policy; results are ordered as spec.seeds.
std::vector<SeedRun> run_seeds(const ExperimentSpec& spec, const GridMap& map);

// seed,tpa,total_throughput,infeasibility_rate,planning_steps plus "mean" and "std" rows.
// Wall-clock columns live in timing_csv so this file is reproducible byte for byte.
std::string metrics_csv(const std::vector<SeedRun>& runs);
std::string timing_csv(const std::vector<SeedRun>& runs);

// One JSON object per planning step.
std::string trace_jsonl(const EpisodeTrace& trace, const GridMap& map);

// Mean priority rank (0 = highest) of each agent over `samples` orders redrawn from the
// policy at the recorded state of each requested step. The random policy draws from a
// stream independent of the episode. Throws std::out_of_range if a step is missing and
// std::invalid_argument for a policy that cannot be resampled.
std::string export_heatmap(const EpisodeTrace& trace, const GridMap& map, PolicyKind policy,
                           const std::vector<int>& steps, int samples, std::uint64_t seed);

// Per agent at one step: location, shortest-path next move, executed next move, agreement.
std::string export_directions(const EpisodeTrace& trace, const GridMap& map, int step);

// Fraction of agents whose executed first move equals the shortest-path first move.
double direction_agreement(const StepRecord& record);

// Writes the requested artifacts for the runs into spec.output_dir.
void write_artifacts(const ExperimentSpec& spec, const GridMap& map, const std::vector<SeedRun>& runs);

}  // namespace lmapf
