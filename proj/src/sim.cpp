#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "lmapf/errors.hpp"
#include "lmapf/sim.hpp"

namespace lmapf {

std::string_view assigner_name(Assigner a) { return a == Assigner::Amazon ? "amazon" : "symbotic"; }

std::optional<Assigner> assigner_from_name(std::string_view name) {
  if (name == "amazon") return Assigner::Amazon;
  if (name == "symbotic") return Assigner::Symbotic;
  return std::nullopt;
}

std::string_view policy_name(PolicyKind p) {
  switch (p) {
    case PolicyKind::Random: return "random";
    case PolicyKind::DistanceQuery: return "dq";
    case PolicyKind::External: return "external";
  }
  return "random";
}

std::optional<PolicyKind> policy_from_name(std::string_view name) {
  if (name == "random") return PolicyKind::Random;
  if (name == "dq") return PolicyKind::DistanceQuery;
  if (name == "external") return PolicyKind::External;
  return std::nullopt;
}

void SimConfig::validate() const {
  if (agents < 1) throw ConfigError("agent count must be >= 1");
  if (candidates < 1) throw ConfigError("K must be >= 1");
  if (execution_horizon < 1) throw ConfigError("execution horizon h must be >= 1");
  if (execution_horizon > planning_horizon) throw ConfigError("need h <= w");
  if (planning_horizon > sim_horizon) throw ConfigError("need w <= T");
  if (kappa < 0 || sigma < 0) throw ConfigError("kappa and sigma must be >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
}

void require_regions(const GridMap& map, Assigner assigner) {
  if (assigner == Assigner::Amazon) {
    if (map.cells_of(CellKind::Endpoint).empty()) throw ConfigError("amazon assigner needs endpoint cells ('e')");
    if (map.cells_of(CellKind::Home).empty() && map.cells_of(CellKind::Travel).empty()) {
      throw ConfigError("amazon assigner needs home or travel cells");
    }
  } else {
    for (CellKind k : {CellKind::Inbound, CellKind::Outbound, CellKind::Aisle, CellKind::Deck}) {
      if (map.cells_of(k).empty()) {
        throw ConfigError(std::string("symbotic assigner needs '") + cell_char(k) + "' cells");
      }
    }
  }
}

std::vector<AgentTask> WorldState::tasks() const {
  std::vector<AgentTask> out;
  out.reserve(agents.size());
  for (const AgentState& a : agents) out.push_back({a.location, {a.goals.begin(), a.goals.end()}});
  return out;
}

namespace {

std::vector<Location> start_region(const GridMap& map, Assigner assigner) {
  std::vector<Location> cells;
  const auto add = [&](CellKind k) {
    auto span = map.cells_of(k);
    cells.insert(cells.end(), span.begin(), span.end());
  };
  if (assigner == Assigner::Amazon) {
    add(CellKind::Home);
    add(CellKind::Travel);
  } else {
    add(CellKind::Deck);
    add(CellKind::Inbound);
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

Location pick(std::vector<Location>& candidates, Rng& rng, const char* what) {
  if (candidates.empty()) throw AssignmentError(std::string("no eligible ") + what);
  return candidates[rng.below(candidates.size())];
}

void assign_amazon(WorldState& state, AgentState& agent, const GridMap& map) {
  std::vector<Location> candidates;
  for (Location e : map.cells_of(CellKind::Endpoint)) {
    if (e == agent.location) continue;
    auto held = state.held_endpoints.find(e);
    if (held != state.held_endpoints.end() && held->second != agent.id) continue;
    candidates.push_back(e);
  }
  const Location goal = pick(candidates, state.rng, "endpoint");
  state.held_endpoints[goal] = agent.id;
  agent.goals.push_back(goal);
}

void assign_symbotic(WorldState& state, AgentState& agent, const GridMap& map) {
  std::vector<Location> candidates;
  const auto add = [&](CellKind k) {
    for (Location c : map.cells_of(k)) {
      if (c != agent.location) candidates.push_back(c);
    }
  };
  bool next_loaded = agent.loaded;
  if (!agent.last_goal) {
    add(CellKind::Aisle);  // loaded start: store first
  } else {
    switch (map.kind(*agent.last_goal)) {
      case CellKind::Inbound:
        add(CellKind::Aisle);
        next_loaded = false;
        break;
      case CellKind::Outbound:
        add(CellKind::Inbound);
        add(CellKind::Aisle);
        next_loaded = true;
        break;
      case CellKind::Aisle:
        if (agent.loaded) {
          add(CellKind::Outbound);
          next_loaded = false;
        } else {
          add(CellKind::Inbound);
          add(CellKind::Aisle);
          next_loaded = true;
        }
        break;
      default:
        throw AssignmentError("last goal " + std::to_string(*agent.last_goal) + " is not a station");
    }
  }
  std::sort(candidates.begin(), candidates.end());
  const Location goal = pick(candidates, state.rng, "station");
  agent.loaded = next_loaded;
  agent.goals.push_back(goal);
}

}  // namespace

void assign_tasks(WorldState& state, const GridMap& map, Assigner assigner) {
  for (AgentState& agent : state.agents) {
    if (!agent.goals.empty()) continue;
    if (assigner == Assigner::Amazon) {
      assign_amazon(state, agent, map);
    } else {
      assign_symbotic(state, agent, map);
    }
  }
}

WorldState init_episode(const SimConfig& config, const GridMap& map) {
  config.validate();
  require_regions(map, config.assigner);
  WorldState state{{}, 0, {}, Rng::stream(config.seed, 1)};
  std::vector<Location> cells = start_region(map, config.assigner);
  if (static_cast<int>(cells.size()) < config.agents) {
    throw ConfigError("start region has " + std::to_string(cells.size()) + " cells for " +
                      std::to_string(config.agents) + " agents");
  }
  if (config.assigner == Assigner::Amazon &&
      map.cells_of(CellKind::Endpoint).size() < static_cast<std::size_t>(config.agents) + 1) {
    throw ConfigError("amazon assigner needs at least N + 1 endpoints, map has " +
                      std::to_string(map.cells_of(CellKind::Endpoint).size()));
  }
  // Partial Fisher-Yates: the first N entries are a uniform sample without replacement.
  for (int i = 0; i < config.agents; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) + state.rng.below(cells.size() - static_cast<std::size_t>(i));
    std::swap(cells[static_cast<std::size_t>(i)], cells[j]);
  }
  state.agents.resize(static_cast<std::size_t>(config.agents));
  for (int i = 0; i < config.agents; ++i) {
    AgentState& a = state.agents[static_cast<std::size_t>(i)];
    a.id = i;
    a.location = cells[static_cast<std::size_t>(i)];
    a.loaded = config.assigner == Assigner::Symbotic;
  }
  assign_tasks(state, map, config.assigner);
  return state;
}

int observation_cap(const GridMap& map, int planning_horizon) { return planning_horizon + static_diameter(map) + 1; }

Observation compute_observation(const WorldState& state, const DistanceOracle& distances, int cap) {
  Observation obs;
  obs.paths.reserve(state.agents.size());
  for (const AgentState& a : state.agents) {
    if (a.goals.empty()) throw std::invalid_argument("compute_observation: agent without goal");
    const std::vector<Location> goals(a.goals.begin(), a.goals.end());
    auto row = shortest_path_static(distances, a.location, goals);
    if (static_cast<int>(row.size()) > cap) row.resize(static_cast<std::size_t>(cap));
    obs.r = std::max(obs.r, static_cast<int>(row.size()));
    obs.paths.push_back(std::move(row));
  }
  for (auto& row : obs.paths) row.resize(static_cast<std::size_t>(obs.r), row.back());
  return obs;
}

double RewardTerms::sum_distance() const { return std::accumulate(distance.begin(), distance.end(), 0.0); }
int RewardTerms::sum_congested() const { return static_cast<int>(std::count(congested.begin(), congested.end(), 1)); }
int RewardTerms::sum_infeasible() const {
  return static_cast<int>(std::count(infeasible.begin(), infeasible.end(), 1));
}

RewardTerms compute_reward(const WorldState& state, const ExecutionPlan& plan, const PlanResult& result,
                           const SimConfig& config, const GridMap& map) {
  const std::size_t n = state.agents.size();
  RewardTerms terms;
  terms.distance.assign(n, 0.0);
  terms.congested.assign(n, 0);
  terms.infeasible.assign(n, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState& a = state.agents[i];
    if (!a.goals.empty()) {
      double sum = 0.0;
      for (Location g : a.goals) sum += map.manhattan(a.location, g);
      terms.distance[i] = sum / static_cast<double>(a.goals.size());
    }
    terms.congested[i] = plan.all_wait(i) ? 1 : 0;
    terms.infeasible[i] = result.infeasible.at(i);
    total += terms.distance[i] + config.kappa * terms.congested[i] + config.sigma * terms.infeasible[i];
  }
  terms.reward = n == 0 ? 0.0 : -total / static_cast<double>(n);
  return terms;
}

int advance(WorldState& state, const ExecutionPlan& plan, const GridMap& map, int steps) {
  const std::size_t n = state.agents.size();
  if (plan.agent_count() != n) throw std::logic_error("advance: plan/agent count mismatch");
  const int h = plan.horizon();
  if (steps < 0 || steps > h) steps = h;
  for (std::size_t i = 0; i < n; ++i) {
    if (plan.occupancy[i].front() != state.agents[i].location) throw std::logic_error("advance: plan start mismatch");
  }
  std::unordered_set<Location> seen;
  for (int k = 0; k <= steps; ++k) {
    seen.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Location here = plan.occupancy[i][static_cast<std::size_t>(k)];
      if (!map.traversable(here)) throw std::logic_error("advance: agent on an obstacle");
      if (!seen.insert(here).second) throw std::logic_error("advance: vertex conflict in plan");
    }
  }
  for (int k = 0; k < steps; ++k) {
    std::unordered_set<std::uint64_t> moving;
    for (std::size_t i = 0; i < n; ++i) {
      const Location a = plan.occupancy[i][static_cast<std::size_t>(k)];
      const Location b = plan.occupancy[i][static_cast<std::size_t>(k) + 1];
      if (a == b) continue;
      if (!move_between(map, a, b)) throw std::logic_error("advance: non-adjacent move");
      const auto edge = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
      const auto back = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(b)) << 32) | static_cast<std::uint32_t>(a);
      if (moving.count(back)) throw std::logic_error("advance: edge conflict in plan");
      moving.insert(edge);
    }
  }

  int completions = 0;
  for (std::size_t i = 0; i < n; ++i) {
    AgentState& agent = state.agents[i];
    for (int k = 1; k <= steps; ++k) {
      const Location here = plan.occupancy[i][static_cast<std::size_t>(k)];
      while (!agent.goals.empty() && agent.goals.front() == here) {
        agent.goals.pop_front();
        ++agent.completed;
        ++completions;
        agent.last_goal = here;
        auto held = state.held_endpoints.find(here);
        if (held != state.held_endpoints.end() && held->second == agent.id) state.held_endpoints.erase(held);
      }
    }
    agent.location = plan.occupancy[i][static_cast<std::size_t>(steps)];
  }
  state.timestep += steps;
  return completions;
}

}  // namespace lmapf
