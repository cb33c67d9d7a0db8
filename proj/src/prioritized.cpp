#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lmapf/errors.hpp"
#include "lmapf/prioritized.hpp"

namespace lmapf {

bool is_permutation_order(const PriorityOrder& order, std::size_t agent_count) {
  if (order.agents.size() != agent_count) return false;
  std::vector<std::uint8_t> seen(agent_count, 0);
  for (int a : order.agents) {
    if (a < 0 || static_cast<std::size_t>(a) >= agent_count || seen[static_cast<std::size_t>(a)]) return false;
    seen[static_cast<std::size_t>(a)] = 1;
  }
  return true;
}

PriorityOrder identity_order(std::size_t agent_count) {
  PriorityOrder order;
  order.agents.resize(agent_count);
  std::iota(order.agents.begin(), order.agents.end(), 0);
  return order;
}

std::vector<int> priority_ranks(const PriorityOrder& order) {
  std::vector<int> rank(order.agents.size(), -1);
  for (std::size_t pos = 0; pos < order.agents.size(); ++pos) {
    rank[static_cast<std::size_t>(order.agents[pos])] = static_cast<int>(pos);
  }
  return rank;
}

int PlanResult::infeasible_count() const noexcept {
  return static_cast<int>(std::count(infeasible.begin(), infeasible.end(), std::uint8_t{1}));
}

bool ExecutionPlan::all_wait(std::size_t agent) const {
  const auto& m = moves.at(agent);
  return std::all_of(m.begin(), m.end(), [](Move x) { return x == Move::Wait; });
}

ConflictCount count_conflicts(std::span<const TimedPath> paths, int steps) {
  ConflictCount out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      for (int t = 0; t <= steps; ++t) {
        if (paths[i].at(t) == paths[j].at(t)) ++out.vertex;
        if (t < steps && paths[i].at(t) != paths[i].at(t + 1) && paths[i].at(t) == paths[j].at(t + 1) &&
            paths[i].at(t + 1) == paths[j].at(t)) {
          ++out.edge;
        }
      }
    }
  }
  return out;
}

PlanResult plan_with_order(const PriorityOrder& order, std::span<const AgentTask> agents, const GridMap& map,
                           const DistanceOracle& distances, int horizon) {
  const std::size_t n = agents.size();
  if (!is_permutation_order(order, n)) throw std::invalid_argument("plan_with_order: order is not a permutation");
  PlanResult result;
  result.paths.resize(n);
  result.lengths.assign(n, 0);
  result.infeasible.assign(n, 0);
  result.order = order;

  ReservationTable table(map, horizon);
  for (int agent : order.agents) {
    const AgentTask& task = agents[static_cast<std::size_t>(agent)];
    const PathQuery query{task.location, task.goals, horizon};
    auto planned = plan_sipp(query, map, table, distances);
    TimedPath& path = result.paths[static_cast<std::size_t>(agent)];
    if (planned) {
      path = std::move(*planned);
      path.agent = agent;
      table.add_path(path);
    } else {
      const auto goals = effective_goals(distances, task.location, task.goals, horizon);
      path.agent = agent;
      path.locations = shortest_path_static(distances, task.location, goals);
      std::size_t g = 0;
      for (int t = 0; t <= path.length(); ++t) {
        while (g < goals.size() && goals[g] == path.locations[static_cast<std::size_t>(t)]) {
          path.goal_visits.push_back(t);
          ++g;
        }
      }
      result.infeasible[static_cast<std::size_t>(agent)] = 1;
    }
    result.lengths[static_cast<std::size_t>(agent)] = path.length();
  }
  return result;
}

double order_cost(const PlanResult& result, double beta) {
  const std::size_t n = result.agent_count();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += static_cast<double>(result.lengths[i]) + beta * static_cast<double>(result.infeasible[i]);
  }
  return total / static_cast<double>(n);
}

Selection select_best(std::span<const PriorityOrder> candidates, std::span<const AgentTask> agents,
                      const GridMap& map, const DistanceOracle& distances, int horizon, double beta) {
  if (candidates.empty()) throw std::invalid_argument("select_best: no candidate orders");
  Selection best;
  bool have = false;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const PriorityOrder& order = candidates[k];
    if (!is_permutation_order(order, agents.size())) {
      throw std::invalid_argument("select_best: candidate " + std::to_string(k) + " is not a permutation");
    }
    bool repeated = false;
    for (std::size_t j = 0; j < k && !repeated; ++j) repeated = candidates[j] == order;
    if (repeated) continue;
    PlanResult result = plan_with_order(order, agents, map, distances, horizon);
    const double cost = order_cost(result, beta);
    if (!have || cost < best.cost) {
      best.index = k;
      best.order = order;
      best.result = std::move(result);
      best.cost = cost;
      have = true;
    }
  }
  return best;
}

StepOutcome rh_pp_step(std::span<const AgentTask> agents, const GridMap& map, const DistanceOracle& distances,
                       std::span<const PriorityOrder> candidates, int planning_horizon, int execution_horizon,
                       double beta, Rng& rng) {
  if (execution_horizon < 1 || execution_horizon > planning_horizon) {
    throw std::invalid_argument("rh_pp_step: need 1 <= h <= w");
  }
  StepOutcome out;
  out.selection = select_best(candidates, agents, map, distances, planning_horizon, beta);
  out.repaired = count_conflicts(out.selection.result.paths, execution_horizon).total() > 0;
  out.execution = repair(out.selection.result, map, execution_horizon, rng);
  return out;
}

}  // namespace lmapf
