#include <algorithm>
#include <chrono>
#include <string>

#include "lmapf/errors.hpp"
#include "lmapf/sim.hpp"

namespace lmapf {

namespace {

void check_candidates(const std::vector<PriorityOrder>& orders, std::size_t n, int k) {
  if (static_cast<int>(orders.size()) != k) {
    throw PolicyError("policy returned " + std::to_string(orders.size()) + " orders, expected " + std::to_string(k));
  }
  for (const PriorityOrder& o : orders) {
    if (!is_permutation_order(o, n)) throw PolicyError("policy returned an order that is not a permutation");
  }
}

void finish_metrics(EpisodeMetrics& m, const WorldState& state, double solve_total, int infeasible_steps) {
  m.total_throughput = 0;
  for (const AgentState& a : state.agents) m.total_throughput += a.completed;
  m.tpa = m.agents > 0 ? static_cast<double>(m.total_throughput) / m.agents : 0.0;
  m.planning_steps = static_cast<int>(m.step_completions.size());
  if (m.planning_steps > 0) {
    m.mean_solve_s = solve_total / m.planning_steps;
    m.infeasibility_rate = static_cast<double>(infeasible_steps) / m.planning_steps;
  }
}

// Any move that shortens the way to the next distinct goal is a shortest-path move; the
// executed one is reported when it qualifies, otherwise the first step of the static path.
Move shortest_first_move(const GridMap& map, const DistanceOracle& distances, const AgentTask& task,
                         const std::vector<Location>& static_path, Move executed) {
  const Move canonical = static_path.size() > 1 ? move_between(map, static_path[0], static_path[1]).value_or(Move::Wait)
                                                : Move::Wait;
  const auto target = std::find_if(task.goals.begin(), task.goals.end(), [&](Location g) { return g != task.location; });
  if (target == task.goals.end() || executed == Move::Wait) return canonical;
  const auto next = map.step(task.location, executed);
  if (next && distances.distance(*next, *target) + 1 == distances.distance(task.location, *target)) return executed;
  return canonical;
}

}  // namespace

EpisodeResult run_episode(const SimConfig& config, const GridMap& map, OrderPolicy& policy, bool record_trace) {
  using Clock = std::chrono::steady_clock;
  EpisodeResult out;
  EpisodeMetrics& metrics = out.metrics;
  metrics.agents = config.agents;

  WorldState state = init_episode(config, map);
  const DistanceOracle distances(map);
  const int cap = observation_cap(map, config.planning_horizon);
  const EpisodeInfo info{&config, &map, cap};
  Rng repair_rng = Rng::stream(config.seed, 2);

  double solve_total = 0.0;
  int infeasible_steps = 0;
  try {
    policy.begin_episode(info);
    int step = 0;
    while (state.timestep < config.sim_horizon) {
      assign_tasks(state, map, config.assigner);
      const Observation obs = compute_observation(state, distances, cap);
      const std::vector<AgentTask> tasks = state.tasks();

      const auto started = Clock::now();
      std::vector<PriorityOrder> candidates = policy.propose({state, map, distances, obs, step}, config.candidates);
      check_candidates(candidates, state.agents.size(), config.candidates);
      StepOutcome outcome = rh_pp_step(tasks, map, distances, candidates, config.planning_horizon,
                                       config.execution_horizon, config.beta, repair_rng);
      const double solve_s = std::chrono::duration<double>(Clock::now() - started).count();
      solve_total += solve_s;
      metrics.max_solve_s = std::max(metrics.max_solve_s, solve_s);
      if (!outcome.selection.result.feasible()) ++infeasible_steps;

      StepRecord record;
      if (record_trace) {
        record.step = step;
        record.timestep = state.timestep;
        record.order = outcome.selection.order;
        record.chosen_index = outcome.selection.index;
        record.cost = outcome.selection.cost;
        record.moves = outcome.execution.moves;
        record.solve_ms = solve_s * 1000.0;
        record.repaired = outcome.repaired;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          record.locations.push_back(tasks[i].location);
          record.goals.push_back(tasks[i].goals);
          record.sp_moves.push_back(shortest_first_move(map, distances, tasks[i], obs.paths[i], record.moves[i].front()));
        }
      }

      const int steps_now = std::min(config.execution_horizon, config.sim_horizon - state.timestep);
      const int completions = advance(state, outcome.execution, map, steps_now);
      metrics.step_completions.push_back(completions);
      RewardTerms reward = compute_reward(state, outcome.execution, outcome.selection.result, config, map);
      const bool done = state.timestep >= config.sim_horizon;
      policy.feedback({step, &reward, completions, done});

      if (record_trace) {
        record.reward = std::move(reward);
        record.completions = completions;
        out.trace.steps.push_back(std::move(record));
      }
      ++step;
    }
    finish_metrics(metrics, state, solve_total, infeasible_steps);
    policy.end_episode(metrics);
  } catch (const PolicyError& e) {
    finish_metrics(metrics, state, solve_total, infeasible_steps);
    metrics.valid = false;
    metrics.error = e.what();
  }
  return out;
}

}  // namespace lmapf
