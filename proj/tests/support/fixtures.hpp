#pragma once

#include <string>
#include <vector>

#include "lmapf/grid_map.hpp"

namespace fixtures {

// Builds a map from bare rows, without the header.
inline lmapf::GridMap grid(const std::vector<std::string>& rows) {
  std::string text = "height " + std::to_string(rows.size()) + "\nwidth " + std::to_string(rows.front().size()) + "\nmap\n";
  for (const auto& r : rows) text += r + "\n";
  return lmapf::parse_map(text);
}

inline lmapf::GridMap open_grid(int width, int height) {
  return grid(std::vector<std::string>(static_cast<std::size_t>(height), std::string(static_cast<std::size_t>(width), '.')));
}

inline std::string maps_dir() { return LMAPF_MAPS_DIR; }

}  // namespace fixtures
