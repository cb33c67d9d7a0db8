#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lmapf/grid_map.hpp"
#include "lmapf/rng.hpp"
#include "lmapf/sipp.hpp"

namespace lmapf {

// Agent ids from highest to lowest priority.
struct PriorityOrder {
  std::vector<int> agents;

  std::size_t size() const noexcept { return agents.size(); }
  friend bool operator==(const PriorityOrder&, const PriorityOrder&) = default;
};

bool is_permutation_order(const PriorityOrder& order, std::size_t agent_count);
PriorityOrder identity_order(std::size_t agent_count);
// rank[agent] = position of the agent in the order (0 = highest priority).
std::vector<int> priority_ranks(const PriorityOrder& order);

// What the planner needs to know about one agent at the planning epoch.
struct AgentTask {
  Location location = 0;
  std::vector<Location> goals;
};

struct PlanResult {
  std::vector<TimedPath> paths;     // indexed by agent id
  std::vector<int> lengths;         // e_i in timesteps
  std::vector<std::uint8_t> infeasible;  // s_i
  PriorityOrder order;

  std::size_t agent_count() const noexcept { return paths.size(); }
  int infeasible_count() const noexcept;
  bool feasible() const noexcept { return infeasible_count() == 0; }
};

// Moves executed during one planning step.
struct ExecutionPlan {
  std::vector<std::vector<Move>> moves;          // [agent][k], exactly h entries
  std::vector<std::vector<Location>> occupancy;  // [agent][k], h + 1 entries, [0] = start
  std::vector<Location> end;                     // occupancy[agent].back()

  std::size_t agent_count() const noexcept { return moves.size(); }
  int horizon() const noexcept { return moves.empty() ? 0 : static_cast<int>(moves.front().size()); }
  bool all_wait(std::size_t agent) const;
};

struct ConflictCount {
  std::size_t vertex = 0;
  std::size_t edge = 0;
  std::size_t total() const noexcept { return vertex + edge; }
};

// Vertex conflicts at instants 0..steps and edge conflicts for departures 0..steps-1,
// with finished paths dwelling at their last cell.
ConflictCount count_conflicts(std::span<const TimedPath> paths, int steps);

// Plans agents in priority order. Each agent sees reservations of every earlier agent
// that planned feasibly. An infeasible agent gets its static shortest path, s_i = 1,
// and adds no reservation. Throws UnreachableGoal.
PlanResult plan_with_order(const PriorityOrder& order, std::span<const AgentTask> agents, const GridMap& map,
                           const DistanceOracle& distances, int horizon);

// (1/N) * sum_i (e_i + beta * s_i). Lower is better.
double order_cost(const PlanResult& result, double beta);

struct Selection {
  std::size_t index = 0;  // into the candidate list
  PriorityOrder order;
  PlanResult result;
  double cost = 0.0;
};

// Minimum-cost candidate; ties go to the lower index. Repeated candidates are
// evaluated once. Throws std::invalid_argument on an empty list.
Selection select_best(std::span<const PriorityOrder> candidates, std::span<const AgentTask> agents,
                      const GridMap& map, const DistanceOracle& distances, int horizon, double beta);

// Turns possibly conflicting paths into a conflict-free h-step execution by inserting
// waits. Conflict-free input is returned unchanged (first h moves). Otherwise agents
// are processed per timestep in a fresh random order and a desired move is granted
// only if its target cell is free at the next instant and it does not swap with a
// granted move; grant passes repeat until nothing changes. A denied agent waits and
// the rest of its path shifts by one timestep.
ExecutionPlan repair(const PlanResult& result, const GridMap& map, int steps, Rng& rng);

struct StepOutcome {
  ExecutionPlan execution;
  Selection selection;
  bool repaired = false;  // false if the chosen plan was already conflict-free
};

StepOutcome rh_pp_step(std::span<const AgentTask> agents, const GridMap& map, const DistanceOracle& distances,
                       std::span<const PriorityOrder> candidates, int planning_horizon, int execution_horizon,
                       double beta, Rng& rng);

}  // namespace lmapf
