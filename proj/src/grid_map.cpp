#include "lmapf/grid_map.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "lmapf/errors.hpp"

namespace lmapf {

namespace {

constexpr std::array<char, kCellKindCount> kCellChars{'@', '.', 'h', 'e', 'i', 'o', 'a', 'd'};
constexpr std::array<std::string_view, 5> kMoveNames{"up", "down", "left", "right", "wait"};

}  // namespace

char cell_char(CellKind kind) { return kCellChars[static_cast<std::size_t>(kind)]; }

std::optional<CellKind> cell_kind_from_char(char c) {
  for (std::size_t i = 0; i < kCellChars.size(); ++i) {
    if (kCellChars[i] == c) return static_cast<CellKind>(i);
  }
  return std::nullopt;
}

std::string_view move_name(Move move) { return kMoveNames[static_cast<std::size_t>(move)]; }

std::optional<Move> move_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kMoveNames.size(); ++i) {
    if (kMoveNames[i] == name) return static_cast<Move>(i);
  }
  return std::nullopt;
}

Move reverse(Move move) {
  switch (move) {
    case Move::Up: return Move::Down;
    case Move::Down: return Move::Up;
    case Move::Left: return Move::Right;
    case Move::Right: return Move::Left;
    case Move::Wait: return Move::Wait;
  }
  return Move::Wait;
}

GridMap::GridMap(int width, int height, std::vector<CellKind> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
  if (width_ <= 0 || height_ <= 0) throw MapError("map dimensions must be positive");
  if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw MapError("cell count does not match width * height");
  }
  for (Location loc = 0; loc < size(); ++loc) {
    regions_[static_cast<std::size_t>(cells_[static_cast<std::size_t>(loc)])].push_back(loc);
  }
  if (traversable_count() == 0) throw MapError("map has no traversable cell");
}

CellKind GridMap::kind(Location loc) const {
  if (!in_bounds(loc)) throw std::out_of_range("location " + std::to_string(loc) + " out of bounds");
  return cells_[static_cast<std::size_t>(loc)];
}

std::optional<Location> GridMap::step(Location loc, Move move) const noexcept {
  const int r = row(loc);
  const int c = col(loc);
  Location next = loc;
  switch (move) {
    case Move::Up:
      if (r == 0) return std::nullopt;
      next = loc - width_;
      break;
    case Move::Down:
      if (r + 1 >= height_) return std::nullopt;
      next = loc + width_;
      break;
    case Move::Left:
      if (c == 0) return std::nullopt;
      next = loc - 1;
      break;
    case Move::Right:
      if (c + 1 >= width_) return std::nullopt;
      next = loc + 1;
      break;
    case Move::Wait:
      return loc;
  }
  if (cells_[static_cast<std::size_t>(next)] == CellKind::Obstacle) return std::nullopt;
  return next;
}

std::vector<std::pair<Move, Location>> GridMap::neighbors(Location loc) const {
  if (!in_bounds(loc)) throw std::out_of_range("location " + std::to_string(loc) + " out of bounds");
  if (!traversable(loc)) throw std::invalid_argument("location " + std::to_string(loc) + " is an obstacle");
  std::vector<std::pair<Move, Location>> out;
  out.reserve(kMoveOrder.size());
  for (Move m : kMoveOrder) {
    if (auto next = step(loc, m)) out.emplace_back(m, *next);
  }
  return out;
}

int GridMap::manhattan(Location a, Location b) const {
  if (!in_bounds(a) || !in_bounds(b)) throw std::out_of_range("manhattan: location out of bounds");
  return std::abs(row(a) - row(b)) + std::abs(col(a) - col(b));
}

double GridMap::obstacle_density() const noexcept {
  return static_cast<double>(cells_of(CellKind::Obstacle).size()) / static_cast<double>(size());
}

std::optional<Move> move_between(const GridMap& map, Location from, Location to) {
  for (Move m : kMoveOrder) {
    if (auto next = map.step(from, m); next && *next == to) return m;
  }
  return std::nullopt;
}

int static_diameter(const GridMap& map) {
  std::vector<int> dist(static_cast<std::size_t>(map.size()));
  std::vector<Location> queue;
  queue.reserve(static_cast<std::size_t>(map.size()));
  int best = 0;
  for (Location src = 0; src < map.size(); ++src) {
    if (!map.traversable(src)) continue;
    std::fill(dist.begin(), dist.end(), -1);
    queue.clear();
    queue.push_back(src);
    dist[static_cast<std::size_t>(src)] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Location u = queue[head];
      const int du = dist[static_cast<std::size_t>(u)];
      best = std::max(best, du);
      for (int m = 0; m < 4; ++m) {
        auto v = map.step(u, static_cast<Move>(m));
        if (v && dist[static_cast<std::size_t>(*v)] < 0) {
          dist[static_cast<std::size_t>(*v)] = du + 1;
          queue.push_back(*v);
        }
      }
    }
  }
  return best;
}

namespace {

int parse_header(std::string_view line, std::string_view key, int line_no) {
  if (line.size() <= key.size() + 1 || line.substr(0, key.size()) != key || line[key.size()] != ' ') {
    throw MapError("expected '" + std::string(key) + " <n>'", line_no, 1);
  }
  const std::string_view digits = line.substr(key.size() + 1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value <= 0) {
    throw MapError("invalid " + std::string(key) + " value", line_no, static_cast<int>(key.size()) + 2);
  }
  return value;
}

}  // namespace

GridMap parse_map(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      throw MapError("missing trailing newline", static_cast<int>(lines.size()) + 1, 0);
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view l = lines[i];
    if (!l.empty() && l.back() == '\r') throw MapError("carriage return not allowed", static_cast<int>(i) + 1, static_cast<int>(l.size()));
    if (!l.empty() && (l.back() == ' ' || l.back() == '\t')) {
      throw MapError("trailing whitespace", static_cast<int>(i) + 1, static_cast<int>(l.size()));
    }
  }
  if (lines.size() < 3) throw MapError("truncated header", static_cast<int>(lines.size()) + 1, 1);
  const int height = parse_header(lines[0], "height", 1);
  const int width = parse_header(lines[1], "width", 2);
  if (lines[2] != "map") throw MapError("expected 'map'", 3, 1);
  if (lines.size() != static_cast<std::size_t>(height) + 3) {
    throw MapError("expected " + std::to_string(height) + " grid rows, found " + std::to_string(lines.size() - 3),
                   static_cast<int>(std::min(lines.size(), static_cast<std::size_t>(height) + 3)) + 1, 1);
  }
  std::vector<CellKind> cells;
  cells.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    const std::string_view row = lines[static_cast<std::size_t>(r) + 3];
    const int line_no = r + 4;
    if (row.size() != static_cast<std::size_t>(width)) {
      throw MapError("row has " + std::to_string(row.size()) + " cells, expected " + std::to_string(width), line_no,
                     static_cast<int>(std::min(row.size(), static_cast<std::size_t>(width))) + 1);
    }
    for (int c = 0; c < width; ++c) {
      auto kind = cell_kind_from_char(row[static_cast<std::size_t>(c)]);
      if (!kind) throw MapError(std::string("unknown cell character '") + row[static_cast<std::size_t>(c)] + "'", line_no, c + 1);
      cells.push_back(*kind);
    }
  }
  if (std::none_of(cells.begin(), cells.end(), [](CellKind k) { return k != CellKind::Obstacle; })) {
    throw MapError("map has no traversable cell", 4, 1);
  }
  return GridMap(width, height, std::move(cells));
}

std::string render_map(const GridMap& map) {
  std::string out = "height " + std::to_string(map.height()) + "\nwidth " + std::to_string(map.width()) + "\nmap\n";
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) out.push_back(cell_char(map.kind(map.at(r, c))));
    out.push_back('\n');
  }
  return out;
}

GridMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapError("cannot open map file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str());
}

}  // namespace lmapf
