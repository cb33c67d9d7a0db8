#include <numeric>
#include <stdexcept>

#include "lmapf/prioritized.hpp"

namespace lmapf {

namespace {

ExecutionPlan from_occupancy(const GridMap& map, std::vector<std::vector<Location>> occupancy) {
  ExecutionPlan plan;
  plan.moves.resize(occupancy.size());
  plan.end.resize(occupancy.size());
  for (std::size_t i = 0; i < occupancy.size(); ++i) {
    const auto& occ = occupancy[i];
    for (std::size_t k = 0; k + 1 < occ.size(); ++k) {
      const auto move = move_between(map, occ[k], occ[k + 1]);
      if (!move) throw std::logic_error("repair: non-adjacent consecutive cells");
      plan.moves[i].push_back(*move);
    }
    plan.end[i] = occ.back();
  }
  plan.occupancy = std::move(occupancy);
  return plan;
}

}  // namespace

ExecutionPlan repair(const PlanResult& result, const GridMap& map, int steps, Rng& rng) {
  if (steps < 1) throw std::invalid_argument("repair: steps must be positive");
  const std::size_t n = result.agent_count();
  std::vector<std::vector<Location>> occupancy(n);

  if (count_conflicts(result.paths, steps).total() == 0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (int t = 0; t <= steps; ++t) occupancy[i].push_back(result.paths[i].at(t));
    }
    return from_occupancy(map, std::move(occupancy));
  }

  std::vector<int> cursor(n, 0);
  std::vector<Location> cur(n);
  for (std::size_t i = 0; i < n; ++i) {
    cur[i] = result.paths[i].at(0);
    occupancy[i].push_back(cur[i]);
  }
  std::vector<int> next_owner(static_cast<std::size_t>(map.size()), -1);
  std::vector<int> cur_owner(static_cast<std::size_t>(map.size()), -1);
  std::vector<Location> desired(n);
  std::vector<std::uint8_t> granted(n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int k = 0; k < steps; ++k) {
    rng.shuffle(std::span<int>(order));
    for (std::size_t i = 0; i < n; ++i) {
      desired[i] = result.paths[i].at(cursor[i] + 1);
      granted[i] = desired[i] == cur[i];
      next_owner[static_cast<std::size_t>(cur[i])] = static_cast<int>(i);
      cur_owner[static_cast<std::size_t>(cur[i])] = static_cast<int>(i);
    }
    for (std::size_t pass = 0; pass < n; ++pass) {
      bool changed = false;
      for (int idx : order) {
        const auto i = static_cast<std::size_t>(idx);
        if (granted[i]) continue;
        const Location target = desired[i];
        if (next_owner[static_cast<std::size_t>(target)] != -1) continue;
        const int occupant = cur_owner[static_cast<std::size_t>(target)];
        if (occupant >= 0 && desired[static_cast<std::size_t>(occupant)] == cur[i]) continue;  // swap
        next_owner[static_cast<std::size_t>(cur[i])] = -1;
        next_owner[static_cast<std::size_t>(target)] = idx;
        granted[i] = 1;
        changed = true;
      }
      if (!changed) break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      next_owner[static_cast<std::size_t>(cur[i])] = -1;
      next_owner[static_cast<std::size_t>(desired[i])] = -1;
      cur_owner[static_cast<std::size_t>(cur[i])] = -1;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (granted[i]) {
        cur[i] = desired[i];
        ++cursor[i];
      }
      occupancy[i].push_back(cur[i]);
    }
  }
  return from_occupancy(map, std::move(occupancy));
}

}  // namespace lmapf
