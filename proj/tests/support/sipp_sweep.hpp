#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lmapf/errors.hpp"
#include "lmapf/rng.hpp"
#include "lmapf/sipp.hpp"
#include "support/oracles.hpp"

namespace sweep {

using lmapf::GridMap;
using lmapf::Location;

// Random walk from a random free cell that stays clear of the earlier walks.
inline std::optional<std::vector<Location>> random_walk(const GridMap& map, int horizon,
                                                        const std::vector<std::vector<Location>>& others,
                                                        lmapf::Rng& rng) {
  std::vector<Location> free;
  for (Location l = 0; l < map.size(); ++l) {
    if (map.traversable(l)) free.push_back(l);
  }
  for (int attempt = 0; attempt < 20; ++attempt) {
    std::vector<Location> walk{free[rng.below(free.size())]};
    const int length = static_cast<int>(rng.below(static_cast<std::size_t>(horizon) + 2));
    for (int t = 0; t < length; ++t) {
      const auto n = map.neighbors(walk.back());
      walk.push_back(n[rng.below(n.size())].second);
    }
    std::vector<std::vector<Location>> all;
    for (const auto& o : others) all.push_back(o);
    all.push_back(walk);
    for (auto& row : all) row.resize(static_cast<std::size_t>(horizon) + 1, row.back());
    if (oracle::replay(map, all).clean()) return walk;
  }
  return std::nullopt;
}

struct Tally {
  long instances = 0;
  long feasible = 0;
  long mismatches = 0;
  long invalid_paths = 0;
  std::string first_failure;

  void fail(const std::string& what) {
    if (first_failure.empty()) first_failure = what;
  }
};

// Direct replay of a planned path against the reserved walks for t < horizon.
inline bool respects(const GridMap& map, const lmapf::TimedPath& path, const std::vector<std::vector<Location>>& reserved,
                     Location start, const std::vector<Location>& goals, int horizon) {
  if (path.locations.empty() || path.locations.front() != start) return false;
  for (std::size_t t = 0; t + 1 < path.locations.size(); ++t) {
    if (!oracle::adjacent_or_same(map, path.locations[t], path.locations[t + 1])) return false;
  }
  for (Location l : path.locations) {
    if (!oracle::free_cell(map, l)) return false;
  }
  const oracle::Reservations res(reserved, horizon);
  for (int t = 0; t < horizon; ++t) {
    const Location here = path.at(t), next = path.at(t + 1);
    if (res.vertex.count({here, t})) return false;
    if (here != next && res.edge.count({next, here, t})) return false;
  }
  std::size_t g = 0;
  for (Location l : path.locations) {
    if (g < goals.size() && l == goals[g]) ++g;
  }
  while (g < goals.size() && goals[g] == path.locations.back()) ++g;
  return g == goals.size() && path.locations.back() == goals.back();
}

// Runs plan_sipp and the time-expanded oracle on one instance.
inline void check_instance(const GridMap& map, const lmapf::DistanceOracle& distances,
                           const std::vector<std::vector<Location>>& reserved, Location start,
                           const std::vector<Location>& goals, int horizon, Tally& tally) {
  ++tally.instances;
  std::vector<lmapf::TimedPath> paths;
  for (const auto& r : reserved) paths.push_back({static_cast<int>(paths.size()), r, {}});
  const lmapf::ReservationTable table = lmapf::build_reservations(map, paths, horizon);
  const auto expected = oracle::windowed_arrival(map, reserved, start, goals, horizon);
  const auto got = lmapf::plan_sipp({start, goals, horizon}, map, table, distances);
  const std::string where = "start " + std::to_string(start) + " goal " + std::to_string(goals.back()) + " w " +
                            std::to_string(horizon) + " reserved " + std::to_string(reserved.size());
  if (got.has_value() != expected.has_value() || (got && got->length() != *expected)) {
    ++tally.mismatches;
    tally.fail("arrival mismatch: " + where + " sipp " + (got ? std::to_string(got->length()) : "none") + " oracle " +
               (expected ? std::to_string(*expected) : "none"));
    return;
  }
  if (!got) return;
  ++tally.feasible;
  if (!respects(map, *got, reserved, start, goals, horizon)) {
    ++tally.invalid_paths;
    tally.fail("conflicting path: " + where);
  }
}

// All maps of the given size with at most `max_obstacles` obstacles; `variants`
// reservation sets per (map, w); every admissible start against one random goal
// sequence of length 1 or 2.
inline Tally run(int width, int height, int max_obstacles, int max_horizon, int variants, std::uint64_t seed,
                 int map_stride = 1) {
  Tally tally;
  lmapf::Rng rng(seed);
  const int cells = width * height;
  int map_index = 0;
  std::vector<int> mask;
  const auto visit = [&](const std::vector<int>& obstacles) {
    if (map_index++ % map_stride != 0) return;
    std::vector<lmapf::CellKind> kinds(static_cast<std::size_t>(cells), lmapf::CellKind::Travel);
    for (int o : obstacles) kinds[static_cast<std::size_t>(o)] = lmapf::CellKind::Obstacle;
    const GridMap map(width, height, kinds);
    const lmapf::DistanceOracle distances(map);
    std::vector<Location> free;
    for (Location l = 0; l < map.size(); ++l) {
      if (map.traversable(l)) free.push_back(l);
    }
    for (int w = 1; w <= max_horizon; ++w) {
      for (int v = 0; v < variants; ++v) {
        std::vector<std::vector<Location>> reserved;
        const int count = v % 3;
        for (int k = 0; k < count; ++k) {
          if (auto walk = random_walk(map, w, reserved, rng)) reserved.push_back(*walk);
        }
        std::vector<Location> goals{free[rng.below(free.size())]};
        if (rng.below(2) == 1) goals.push_back(free[rng.below(free.size())]);
        for (Location start : free) {
          bool taken = false;
          for (const auto& r : reserved) taken = taken || r.front() == start;
          if (taken) continue;
          bool reachable = true;
          Location cur = start;
          for (Location g : goals) {
            reachable = reachable && distances.distance(cur, g) < lmapf::kUnreachable;
            cur = g;
          }
          if (!reachable) {
            std::vector<lmapf::TimedPath> paths;
            for (const auto& r : reserved) paths.push_back({0, r, {}});
            const auto table = lmapf::build_reservations(map, paths, w);
            if (distances.distance(start, goals.front()) >= lmapf::kUnreachable) {
              ++tally.instances;
              try {
                lmapf::plan_sipp({start, goals, w}, map, table, distances);
                ++tally.mismatches;
                tally.fail("unreachable first goal did not throw");
              } catch (const lmapf::UnreachableGoal&) {
              }
            }
            continue;
          }
          check_instance(map, distances, reserved, start, goals, w, tally);
        }
      }
    }
  };
  // Enumerate obstacle subsets of size 0..max_obstacles.
  const std::function<void(int)> choose = [&](int from) {
    visit(mask);
    if (static_cast<int>(mask.size()) == max_obstacles) return;
    for (int c = from; c < cells; ++c) {
      mask.push_back(c);
      choose(c + 1);
      mask.pop_back();
    }
  };
  choose(0);
  return tally;
}

}  // namespace sweep
