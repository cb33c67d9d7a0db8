#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lmapf {

// Row-major cell index: loc = row * width + col.
using Location = int;

enum class CellKind : std::uint8_t { Obstacle, Travel, Home, Endpoint, Inbound, Outbound, Aisle, Deck };

inline constexpr int kCellKindCount = 8;

enum class Move : std::uint8_t { Up, Down, Left, Right, Wait };

// Neighbor enumeration order used everywhere ties need breaking.
inline constexpr std::array<Move, 5> kMoveOrder{Move::Up, Move::Down, Move::Left, Move::Right,
                                                Move::Wait};

char cell_char(CellKind kind);
std::optional<CellKind> cell_kind_from_char(char c);
std::string_view move_name(Move move);
std::optional<Move> move_from_name(std::string_view name);
Move reverse(Move move);

class GridMap {
 public:
  // Throws MapError if the dimensions or cell count are inconsistent or nothing is traversable.
  GridMap(int width, int height, std::vector<CellKind> cells);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int size() const noexcept { return width_ * height_; }

  int row(Location loc) const noexcept { return loc / width_; }
  int col(Location loc) const noexcept { return loc % width_; }
  Location at(int row, int col) const noexcept { return row * width_ + col; }

  bool in_bounds(Location loc) const noexcept { return loc >= 0 && loc < size(); }
  bool traversable(Location loc) const noexcept {
    return in_bounds(loc) && cells_[static_cast<std::size_t>(loc)] != CellKind::Obstacle;
  }
  CellKind kind(Location loc) const;

  // Every location of the given kind, ascending.
  std::span<const Location> cells_of(CellKind kind) const {
    return regions_[static_cast<std::size_t>(kind)];
  }
  std::span<const CellKind> cells() const noexcept { return cells_; }

  // Destination of a move, or nullopt when it leaves the grid or enters an obstacle.
  // Wait always returns loc itself. No check is made on loc.
  std::optional<Location> step(Location loc, Move move) const noexcept;

  // In-bounds traversable 4-neighbors followed by the Wait self-transition, in
  // kMoveOrder. Throws std::out_of_range / std::invalid_argument on a bad loc.
  std::vector<std::pair<Move, Location>> neighbors(Location loc) const;

  // |row_a - row_b| + |col_a - col_b|. Throws std::out_of_range on a bad location.
  int manhattan(Location a, Location b) const;

  double obstacle_density() const noexcept;
  int traversable_count() const noexcept { return size() - static_cast<int>(cells_of(CellKind::Obstacle).size()); }

  friend bool operator==(const GridMap& a, const GridMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.cells_ == b.cells_;
  }

 private:
  int width_;
  int height_;
  std::vector<CellKind> cells_;
  std::array<std::vector<Location>, kCellKindCount> regions_;
};

// The move that takes `from` to the 4-adjacent (or equal) `to`; nullopt otherwise.
std::optional<Move> move_between(const GridMap& map, Location from, Location to);

// Largest BFS distance between two mutually reachable traversable cells.
// All-pairs BFS: O(V^2), call once per map.
int static_diameter(const GridMap& map);

// Grid text format:
//   height H
//   width W
//   map
//   H rows of W cell characters, each newline-terminated.
GridMap parse_map(std::string_view text);
std::string render_map(const GridMap& map);
GridMap load_map(const std::filesystem::path& path);

}  // namespace lmapf
