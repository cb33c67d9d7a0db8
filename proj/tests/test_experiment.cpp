#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lmapf/errors.hpp"
#include "lmapf/experiment.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace lmapf;

namespace {

using Table = std::vector<std::vector<std::string>>;

Table parse_csv(const std::string& text) {
  Table rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const GridMap& desk() {
  static const GridMap m = load_map(fixtures::maps_dir() + "/desk_10x10.map");
  return m;
}

ExperimentSpec spec_for(PolicyKind policy, std::vector<std::uint64_t> seeds, int threads = 1) {
  ExperimentSpec s;
  s.base.agents = 8;
  s.base.planning_horizon = 10;
  s.base.execution_horizon = 5;
  s.base.sim_horizon = 60;
  s.base.candidates = 3;
  s.base.policy = policy;
  s.seeds = std::move(seeds);
  s.threads = threads;
  return s;
}

// Mean rank per agent, read back from a heatmap export.
std::vector<double> heat_row(const std::string& csv, int step) {
  std::vector<double> out;
  for (const auto& row : parse_csv(csv)) {
    if (row[0] == std::to_string(step)) out.push_back(std::stod(row[5]));
  }
  return out;
}

}  // namespace

TEST_CASE("experiment validation") {
  ExperimentSpec s = spec_for(PolicyKind::Random, {});
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.seeds = {1};
  s.threads = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.threads = 1;
  s.heatmap_samples = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.heatmap_samples = 10;
  s.base.policy = PolicyKind::External;
  s.exports.heatmap_csv = true;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.base.policy = PolicyKind::Random;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("aggregate is the mean and sample standard deviation") {
  CHECK(aggregate({}).mean == 0.0);
  CHECK(aggregate({4.0}).stddev == 0.0);
  const Aggregate a = aggregate({2, 4, 4, 4, 5, 5, 7, 9});
  CHECK(a.mean == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(a.stddev == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-12));
}

TEST_CASE("metrics csv summarises the seeds it lists") {
  const auto runs = run_seeds(spec_for(PolicyKind::Random, {0, 1, 2, 3, 4}), desk());
  const Table t = parse_csv(metrics_csv(runs));
  REQUIRE(t.size() == 1 + runs.size() + 2);
  CHECK(t[0] == std::vector<std::string>{"seed", "tpa", "total_throughput", "infeasibility_rate", "planning_steps"});
  CHECK(t[6][0] == "mean");
  CHECK(t[7][0] == "std");

  double sum = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const EpisodeMetrics& m = runs[i].result.metrics;
    CHECK(t[1 + i][0] == std::to_string(runs[i].seed));
    CHECK(std::stoi(t[1 + i][2]) == m.total_throughput);
    CHECK(std::stoi(t[1 + i][4]) == 12);
    CHECK(m.tpa == doctest::Approx(static_cast<double>(m.total_throughput) / 8.0).epsilon(1e-12));
    sum += m.total_throughput;
  }
  const double mean = sum / 5.0;
  double sq = 0.0;
  for (const auto& r : runs) sq += std::pow(r.result.metrics.total_throughput - mean, 2);
  CHECK(std::abs(std::stod(t[6][2]) - mean) <= 5e-5);
  CHECK(std::abs(std::stod(t[7][2]) - std::sqrt(sq / 4.0)) <= 5e-5);
  std::vector<double> tpa;
  for (const auto& r : runs) tpa.push_back(r.result.metrics.tpa);
  CHECK(std::abs(aggregate(tpa).mean - mean / 8.0) <= 1e-9);
}

TEST_CASE("results do not depend on the thread count") {
  const auto serial = run_seeds(spec_for(PolicyKind::Random, {0, 1, 2, 3, 4, 5}), desk());
  const auto parallel = run_seeds(spec_for(PolicyKind::Random, {0, 1, 2, 3, 4, 5}, 3), desk());
  CHECK(metrics_csv(serial) == metrics_csv(parallel));
  CHECK(metrics_csv(serial) == metrics_csv(run_seeds(spec_for(PolicyKind::Random, {0, 1, 2, 3, 4, 5}), desk())));
  CHECK(parse_csv(timing_csv(serial)).size() == 1 + 6 + 1);
}

TEST_CASE("worker failures reach the caller") {
  ExperimentSpec s = spec_for(PolicyKind::Random, {0, 1});
  s.base.assigner = Assigner::Symbotic;
  CHECK_THROWS_AS(run_seeds(s, desk()), ConfigError);
}

TEST_CASE("random heatmap averages toward the middle rank") {
  const auto runs = run_seeds(spec_for(PolicyKind::Random, {7}), desk());
  const EpisodeTrace& trace = runs[0].result.trace;
  const int n = 8;
  const double centre = (n - 1) / 2.0;
  const double rank_sd = std::sqrt((n * n - 1) / 12.0);

  SUBCASE("one sample is a single permutation") {
    const auto row = heat_row(export_heatmap(trace, desk(), PolicyKind::Random, {0}, 1, 7), 0);
    REQUIRE(row.size() == n);
    std::vector<double> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
  }
  SUBCASE("spread shrinks with the sample count") {
    for (int m : {10, 100, 1000}) {
      const auto row = heat_row(export_heatmap(trace, desk(), PolicyKind::Random, {0, 5}, m, 7), 5);
      REQUIRE(row.size() == n);
      // The mean rank over agents is exactly the centre for any sample count.
      CHECK(std::accumulate(row.begin(), row.end(), 0.0) / n == doctest::Approx(centre).epsilon(1e-3));
      for (double r : row) CHECK(std::abs(r - centre) <= 5.0 * rank_sd / std::sqrt(m) + 1e-4);
    }
  }
  SUBCASE("draws are reproducible and independent of the episode") {
    const std::string a = export_heatmap(trace, desk(), PolicyKind::Random, {0, 3}, 50, 7);
    CHECK(a == export_heatmap(trace, desk(), PolicyKind::Random, {0, 3}, 50, 7));
    CHECK(a != export_heatmap(trace, desk(), PolicyKind::Random, {0, 3}, 50, 8));
  }
  SUBCASE("missing step and unsampleable policy") {
    CHECK_THROWS_AS(export_heatmap(trace, desk(), PolicyKind::Random, {99}, 5, 7), std::out_of_range);
    CHECK_THROWS_AS(export_heatmap(trace, desk(), PolicyKind::External, {0}, 5, 7), std::invalid_argument);
  }
}

TEST_CASE("dq heatmap is the deterministic rank of each agent") {
  const auto runs = run_seeds(spec_for(PolicyKind::DistanceQuery, {4}), desk());
  const EpisodeTrace& trace = runs[0].result.trace;
  for (int step : {0, 6}) {
    const auto row = heat_row(export_heatmap(trace, desk(), PolicyKind::DistanceQuery, {step}, 20, 4), step);
    const auto& record = trace.steps[static_cast<std::size_t>(step)];
    const auto ranks = priority_ranks(record.order);
    REQUIRE(row.size() == ranks.size());
    // With K identical dq candidates the chosen order is the dq order itself.
    for (std::size_t i = 0; i < ranks.size(); ++i) CHECK(row[i] == ranks[i]);
  }
}

TEST_CASE("direction export compares executed and shortest-path moves") {
  const auto runs = run_seeds(spec_for(PolicyKind::Random, {2}), desk());
  const EpisodeTrace& trace = runs[0].result.trace;
  for (int step : {0, 4, 11}) {
    const StepRecord& r = trace.steps[static_cast<std::size_t>(step)];
    const Table t = parse_csv(export_directions(trace, desk(), step));
    REQUIRE(t.size() == 1 + r.locations.size());
    int agree = 0;
    for (std::size_t i = 0; i < r.locations.size(); ++i) {
      const auto& row = t[1 + i];
      const Location loc = r.locations[i];
      CHECK(std::stoi(row[4]) == loc);
      CHECK(std::stoi(row[2]) * desk().width() + std::stoi(row[3]) == loc);
      CHECK(row[7] == (row[5] == row[6] ? "1" : "0"));
      agree += row[7] == "1";

      // The shortest-path move must reduce the distance to the next distinct goal.
      const auto& goals = r.goals[i];
      auto target = std::find_if(goals.begin(), goals.end(), [&](Location g) { return g != loc; });
      if (target == goals.end()) {
        CHECK(row[5] == "wait");
        continue;
      }
      const auto dist = oracle::bfs(desk(), *target);
      const auto mv = move_from_name(row[5]);
      REQUIRE(mv.has_value());
      const auto next = desk().step(loc, *mv);
      REQUIRE(next.has_value());
      CHECK(dist[static_cast<std::size_t>(*next)] == dist[static_cast<std::size_t>(loc)] - 1);
    }
    CHECK(direction_agreement(r) == doctest::Approx(static_cast<double>(agree) / r.locations.size()));
  }
  CHECK_THROWS_AS(export_directions(trace, desk(), 500), std::out_of_range);
}

TEST_CASE("a lone agent always follows its shortest path") {
  ExperimentSpec s = spec_for(PolicyKind::Random, {9});
  s.base.agents = 1;
  const auto runs = run_seeds(s, desk());
  for (const StepRecord& r : runs[0].result.trace.steps) CHECK(direction_agreement(r) == 1.0);
}

TEST_CASE("artifacts land in the output directory") {
  const auto dir = std::filesystem::temp_directory_path() / "lmapf_artifacts_test";
  std::filesystem::remove_all(dir);
  ExperimentSpec s = spec_for(PolicyKind::Random, {0, 1});
  s.output_dir = dir / "nested";
  s.exports = {true, true, true, true};
  s.heatmap_steps = {0, 2};
  s.direction_steps = {1};
  const auto runs = run_seeds(s, desk());
  write_artifacts(s, desk(), runs);
  for (const char* f : {"metrics.csv", "timing.csv", "seed0_trace.jsonl", "seed1_heatmap.csv",
                        "seed0_directions_step1.csv"}) {
    CHECK_MESSAGE(std::filesystem::exists(s.output_dir / f), f);
  }
  std::ifstream in(s.output_dir / "metrics.csv");
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == metrics_csv(runs));

  std::ifstream trace(s.output_dir / "seed0_trace.jsonl");
  int lines = 0;
  for (std::string l; std::getline(trace, l);) ++lines;
  CHECK(lines == 12);
  std::filesystem::remove_all(dir);
}
