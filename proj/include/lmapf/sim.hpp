#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmapf/grid_map.hpp"
#include "lmapf/prioritized.hpp"
#include "lmapf/rng.hpp"
#include "lmapf/sipp.hpp"

namespace lmapf {

enum class Assigner { Amazon, Symbotic };
enum class PolicyKind { Random, DistanceQuery, External };

std::string_view assigner_name(Assigner a);
std::optional<Assigner> assigner_from_name(std::string_view name);
std::string_view policy_name(PolicyKind p);
std::optional<PolicyKind> policy_from_name(std::string_view name);

struct SimConfig {
  std::string map_path;
  int agents = 8;                 // N
  int planning_horizon = 20;      // w
  int execution_horizon = 5;      // h
  int sim_horizon = 800;          // T
  int candidates = 5;             // K
  double beta = 100.0;
  double kappa = 1000.0;
  double sigma = 1000.0;
  double gamma = 0.99;
  std::uint64_t seed = 0;
  Assigner assigner = Assigner::Amazon;
  PolicyKind policy = PolicyKind::Random;
  double step_budget_s = 1.0;     // reported, not enforced

  // Throws ConfigError.
  void validate() const;
  int planning_steps() const { return (sim_horizon + execution_horizon - 1) / execution_horizon; }
};

// Throws ConfigError when the map lacks the regions the assigner needs.
void require_regions(const GridMap& map, Assigner assigner);

struct AgentState {
  int id = 0;
  Location location = 0;
  std::deque<Location> goals;
  bool loaded = false;                  // Symbotic only
  std::optional<Location> last_goal;    // most recently completed goal
  int completed = 0;
};

struct WorldState {
  std::vector<AgentState> agents;
  int timestep = 0;
  std::map<Location, int> held_endpoints;  // endpoint -> holding agent (Amazon)
  Rng rng;

  std::vector<AgentTask> tasks() const;
};

// Samples N distinct starts from the assigner's start region and assigns first goals.
// Throws ConfigError if the region has fewer than N cells.
WorldState init_episode(const SimConfig& config, const GridMap& map);

// Gives a new goal to every agent whose queue is empty. Throws AssignmentError.
void assign_tasks(WorldState& state, const GridMap& map, Assigner assigner);

struct Observation {
  std::vector<std::vector<Location>> paths;  // N rows of length r
  int r = 0;
};

// Longest row an observation can have for this map and horizon.
int observation_cap(const GridMap& map, int planning_horizon);

Observation compute_observation(const WorldState& state, const DistanceOracle& distances, int cap);

struct RewardTerms {
  std::vector<double> distance;          // d_i
  std::vector<std::uint8_t> congested;   // c_i
  std::vector<std::uint8_t> infeasible;  // s_i
  double reward = 0.0;

  double sum_distance() const;
  int sum_congested() const;
  int sum_infeasible() const;
};

// d_i is the mean Manhattan distance from the agent's (post-execution) location to
// the goals still queued, 0 for an empty queue.
RewardTerms compute_reward(const WorldState& state, const ExecutionPlan& plan, const PlanResult& result,
                           const SimConfig& config, const GridMap& map);

// Applies the first `steps` moves of the plan (all of them by default), popping goals
// reached at any intermediate instant and releasing endpoint holds. Returns the
// number of completed tasks. Throws std::logic_error on an unsafe plan.
int advance(WorldState& state, const ExecutionPlan& plan, const GridMap& map, int steps = -1);

struct EpisodeMetrics {
  int agents = 0;
  int total_throughput = 0;
  double tpa = 0.0;
  std::vector<int> step_completions;
  double mean_solve_s = 0.0;
  double max_solve_s = 0.0;
  double infeasibility_rate = 0.0;
  int planning_steps = 0;
  bool valid = true;
  std::string error;
};

// One planning step as recorded for traces, heatmaps, and direction exports.
struct StepRecord {
  int step = 0;
  int timestep = 0;
  PriorityOrder order;
  std::size_t chosen_index = 0;
  double cost = 0.0;
  std::vector<Location> locations;            // at the planning epoch
  std::vector<std::vector<Location>> goals;   // queues at the planning epoch
  std::vector<std::vector<Move>> moves;       // executed
  std::vector<Move> sp_moves;                 // first move along the static shortest path
  RewardTerms reward;
  int completions = 0;
  double solve_ms = 0.0;
  bool repaired = false;
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
};

struct PolicyContext {
  const WorldState& state;
  const GridMap& map;
  const DistanceOracle& distances;
  const Observation& observation;
  int step;
};

struct StepFeedback {
  int step = 0;
  const RewardTerms* reward = nullptr;
  int completions = 0;
  bool done = false;
};

struct EpisodeInfo {
  const SimConfig* config = nullptr;
  const GridMap* map = nullptr;
  int observation_cap = 0;
};

// Order-proposal callback driven in lockstep by run_episode.
class OrderPolicy {
 public:
  virtual ~OrderPolicy() = default;
  virtual void begin_episode(const EpisodeInfo&) {}
  // Exactly k orders over the state's agents.
  virtual std::vector<PriorityOrder> propose(const PolicyContext& context, int k) = 0;
  virtual void feedback(const StepFeedback&) {}
  virtual void end_episode(const EpisodeMetrics&) {}
};

struct EpisodeResult {
  EpisodeMetrics metrics;
  EpisodeTrace trace;
};

// Runs init -> {assign, observe, propose, plan, repair, advance, reward} until t = T.
// A throwing policy ends the episode with metrics.valid = false.
EpisodeResult run_episode(const SimConfig& config, const GridMap& map, OrderPolicy& policy, bool record_trace = true);

}  // namespace lmapf
