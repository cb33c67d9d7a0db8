#include <stdexcept>
#include <string>

#include "lmapf/errors.hpp"
#include "lmapf/sipp.hpp"

namespace lmapf {

DistanceField distance_field(const GridMap& map, Location goal) {
  if (!map.traversable(goal)) {
    throw std::invalid_argument("distance_field: goal " + std::to_string(goal) + " is not traversable");
  }
  DistanceField dist(static_cast<std::size_t>(map.size()), kUnreachable);
  std::vector<Location> queue;
  queue.reserve(static_cast<std::size_t>(map.traversable_count()));
  dist[static_cast<std::size_t>(goal)] = 0;
  queue.push_back(goal);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Location u = queue[head];
    const int next = dist[static_cast<std::size_t>(u)] + 1;
    for (int m = 0; m < 4; ++m) {
      auto v = map.step(u, static_cast<Move>(m));
      if (v && dist[static_cast<std::size_t>(*v)] == kUnreachable) {
        dist[static_cast<std::size_t>(*v)] = next;
        queue.push_back(*v);
      }
    }
  }
  return dist;
}

const DistanceField& DistanceOracle::field(Location goal) const {
  std::lock_guard lock(mutex_);
  auto it = fields_.find(goal);
  if (it == fields_.end()) {
    it = fields_.emplace(goal, std::make_unique<const DistanceField>(distance_field(*map_, goal))).first;
  }
  return *it->second;
}

std::vector<Location> shortest_path_static(const DistanceOracle& distances, Location start,
                                           std::span<const Location> goals) {
  const GridMap& map = distances.map();
  if (!map.traversable(start)) throw std::invalid_argument("shortest_path_static: start is not traversable");
  std::vector<Location> path{start};
  Location cur = start;
  for (Location goal : goals) {
    const DistanceField& field = distances.field(goal);
    if (field[static_cast<std::size_t>(cur)] >= kUnreachable) {
      throw UnreachableGoal("goal " + std::to_string(goal) + " unreachable from " + std::to_string(cur));
    }
    while (cur != goal) {
      const int want = field[static_cast<std::size_t>(cur)] - 1;
      for (int m = 0; m < 4; ++m) {
        auto v = map.step(cur, static_cast<Move>(m));
        if (v && field[static_cast<std::size_t>(*v)] == want) {
          cur = *v;
          break;
        }
      }
      path.push_back(cur);
    }
  }
  return path;
}

std::vector<Location> shortest_path_static(const GridMap& map, Location start, std::span<const Location> goals) {
  DistanceOracle distances(map);
  return shortest_path_static(distances, start, goals);
}

std::vector<Location> effective_goals(const DistanceOracle& distances, Location start, std::span<const Location> goals,
                                      int horizon) {
  std::vector<Location> kept;
  if (goals.empty()) return kept;
  const GridMap& map = distances.map();
  const long long budget = static_cast<long long>(horizon) + 4LL * (map.width() + map.height());
  const int first = distances.distance(start, goals[0]);
  if (first >= kUnreachable) {
    throw UnreachableGoal("goal " + std::to_string(goals[0]) + " unreachable from " + std::to_string(start));
  }
  kept.push_back(goals[0]);
  long long total = first;
  for (std::size_t k = 1; k < goals.size(); ++k) {
    const int leg = distances.distance(goals[k - 1], goals[k]);
    if (leg >= kUnreachable || total + leg > budget) break;
    total += leg;
    kept.push_back(goals[k]);
  }
  return kept;
}

}  // namespace lmapf
