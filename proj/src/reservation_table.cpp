#include <algorithm>
#include <stdexcept>
#include <string>

#include "lmapf/errors.hpp"
#include "lmapf/sipp.hpp"

namespace lmapf {

ReservationTable::ReservationTable(const GridMap& map, int horizon)
    : num_locations_(map.size()), width_(map.width()), horizon_(horizon) {
  if (horizon <= 0) throw std::invalid_argument("ReservationTable: horizon must be positive");
  vertex_.assign(static_cast<std::size_t>(num_locations_) * static_cast<std::size_t>(horizon_), 0);
  edges_.assign(vertex_.size(), 0);
}

int ReservationTable::edge_bit(Location from, Location to) const noexcept {
  const int delta = to - from;
  if (delta == -width_) return 1 << static_cast<int>(Move::Up);
  if (delta == width_) return 1 << static_cast<int>(Move::Down);
  if (delta == -1) return 1 << static_cast<int>(Move::Left);
  if (delta == 1) return 1 << static_cast<int>(Move::Right);
  return 0;
}

bool ReservationTable::vertex_reserved(Location loc, int t) const noexcept {
  if (t < 0 || t >= horizon_ || loc < 0 || loc >= num_locations_) return false;
  return vertex_[slot(loc, t)] != 0;
}

bool ReservationTable::edge_reserved(Location from, Location to, int t) const noexcept {
  if (t < 0 || t >= horizon_ || from < 0 || from >= num_locations_) return false;
  return (edges_[slot(from, t)] & edge_bit(from, to)) != 0;
}

void ReservationTable::add_path(const TimedPath& path) {
  if (path.locations.empty()) throw std::invalid_argument("add_path: empty path");
  for (int t = 0; t < horizon_; ++t) {
    const Location loc = path.at(t);
    if (loc < 0 || loc >= num_locations_) throw std::out_of_range("add_path: location out of range");
    if (vertex_[slot(loc, t)] != 0) {
      throw ConflictError("vertex conflict at location " + std::to_string(loc) + ", t=" + std::to_string(t) +
                          " (agent " + std::to_string(path.agent) + ")");
    }
    const Location next = path.at(t + 1);
    if (next != loc && edge_reserved(next, loc, t)) {
      throw ConflictError("edge conflict between " + std::to_string(loc) + " and " + std::to_string(next) +
                          ", t=" + std::to_string(t) + " (agent " + std::to_string(path.agent) + ")");
    }
  }
  for (int t = 0; t < horizon_; ++t) {
    const Location loc = path.at(t);
    vertex_[slot(loc, t)] = 1;
    const Location next = path.at(t + 1);
    if (next != loc) edges_[slot(loc, t)] |= static_cast<std::uint8_t>(edge_bit(loc, next));
  }
  ++path_count_;
}

std::vector<SafeInterval> ReservationTable::safe_intervals(Location loc) const {
  std::vector<SafeInterval> out;
  int t = 0;
  while (t < horizon_) {
    if (vertex_[slot(loc, t)] != 0) {
      ++t;
      continue;
    }
    const int begin = t;
    while (t < horizon_ && vertex_[slot(loc, t)] == 0) ++t;
    if (t == horizon_) {
      out.push_back({begin, kOpenEnded});
      return out;
    }
    out.push_back({begin, t - 1});
  }
  out.push_back({horizon_, kOpenEnded});
  return out;
}

int ReservationTable::interval_index(Location loc, int t) const {
  const auto intervals = safe_intervals(loc);
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].begin <= t && t <= intervals[i].end) return static_cast<int>(i);
  }
  return -1;
}

ReservationTable build_reservations(const GridMap& map, std::span<const TimedPath> paths, int horizon) {
  ReservationTable table(map, horizon);
  for (const TimedPath& p : paths) table.add_path(p);
  return table;
}

}  // namespace lmapf
