#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "lmapf/grid_map.hpp"

namespace lmapf {

inline constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;
inline constexpr int kOpenEnded = std::numeric_limits<int>::max() / 2;

// Exact BFS distance from every cell to one goal; kUnreachable where walled off.
using DistanceField = std::vector<int>;

// Throws std::invalid_argument if goal is not traversable.
DistanceField distance_field(const GridMap& map, Location goal);

// Lazily computed, shared distance fields keyed by goal. Safe for concurrent readers.
class DistanceOracle {
 public:
  explicit DistanceOracle(const GridMap& map) : map_(&map) {}

  const GridMap& map() const noexcept { return *map_; }
  const DistanceField& field(Location goal) const;
  int distance(Location from, Location goal) const { return field(goal)[static_cast<std::size_t>(from)]; }

 private:
  const GridMap* map_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Location, std::unique_ptr<const DistanceField>> fields_;
};

// locations[t] is the agent's cell t steps after the planning epoch.
struct TimedPath {
  int agent = -1;
  std::vector<Location> locations;
  // Timestep at which each goal of the query was visited, in goal order.
  std::vector<int> goal_visits;

  int length() const noexcept { return static_cast<int>(locations.size()) - 1; }
  // The cell at time t; a finished path keeps its final cell.
  Location at(int t) const noexcept {
    return t < static_cast<int>(locations.size()) ? locations[static_cast<std::size_t>(t)] : locations.back();
  }
};

struct SafeInterval {
  int begin;  // first free timestep
  int end;    // last free timestep, kOpenEnded if free forever
};

// Occupancy of already-planned paths inside the window [0, horizon).
class ReservationTable {
 public:
  ReservationTable(const GridMap& map, int horizon);

  int horizon() const noexcept { return horizon_; }
  bool empty() const noexcept { return path_count_ == 0; }

  bool vertex_reserved(Location loc, int t) const noexcept;
  // True if some path departs `from` toward the adjacent `to` at timestep t.
  bool edge_reserved(Location from, Location to, int t) const noexcept;

  // Reserves every (cell, t < horizon) of the path, each traversal, and the final cell
  // through the rest of the horizon. Throws ConflictError if it collides with what is
  // already reserved; the table is left unchanged in that case.
  void add_path(const TimedPath& path);

  // Sorted, disjoint maximal free intervals covering every unreserved timestep.
  std::vector<SafeInterval> safe_intervals(Location loc) const;
  // Index within safe_intervals(loc) of the interval containing t, or -1.
  int interval_index(Location loc, int t) const;

 private:
  std::size_t slot(Location loc, int t) const noexcept {
    return static_cast<std::size_t>(loc) * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(t);
  }

  int edge_bit(Location from, Location to) const noexcept;

  int num_locations_;
  int width_;
  int horizon_;
  std::vector<std::uint8_t> vertex_;  // 1 if reserved
  std::vector<std::uint8_t> edges_;   // bitmask of departing moves (bit = Move)
  std::size_t path_count_ = 0;
};

ReservationTable build_reservations(const GridMap& map, std::span<const TimedPath> paths, int horizon);

struct PathQuery {
  Location start = 0;
  std::vector<Location> goals;  // visited in order
  int horizon = 1;              // conflicts enforced for t < horizon
};

struct SippStats {
  std::size_t expansions = 0;
  std::size_t generated = 0;
};

// Minimum-arrival-time path through the query's goals that respects the reservations
// for t < horizon and follows an individually optimal route afterwards. Returns
// nullopt when no conflict-free prefix exists.
//
// Goals after the first are dropped when statically unreachable or further than
// horizon + 4 * (W + H) steps along the goal chain; the path then ends at the last
// kept goal. Throws UnreachableGoal if the first goal is statically unreachable and
// std::invalid_argument if the start is reserved at t = 0.
std::optional<TimedPath> plan_sipp(const PathQuery& query, const GridMap& map, const ReservationTable& reservations,
                                   const DistanceOracle& distances, SippStats* stats = nullptr);

// Convenience overload with a private distance cache.
std::optional<TimedPath> plan_sipp(const PathQuery& query, const GridMap& map, const ReservationTable& reservations);

// Concatenated BFS shortest paths through the goals, ignoring agents. Ties are broken
// by kMoveOrder. Includes the start; a start equal to the only goal yields {start}.
// Throws UnreachableGoal.
std::vector<Location> shortest_path_static(const DistanceOracle& distances, Location start,
                                           std::span<const Location> goals);
std::vector<Location> shortest_path_static(const GridMap& map, Location start, std::span<const Location> goals);

// Goals the planner actually pursues (see plan_sipp).
std::vector<Location> effective_goals(const DistanceOracle& distances, Location start, std::span<const Location> goals,
                                      int horizon);

}  // namespace lmapf
