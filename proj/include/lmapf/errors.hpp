#pragma once

#include <stdexcept>
#include <string>

namespace lmapf {

// Malformed map text. Line and column are 1-based; 0 means "not applicable".
class MapError : public std::runtime_error {
 public:
  MapError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line == 0) return what;
    std::string out = "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  int line_;
  int column_;
};

// A goal that cannot be reached on the static map, independent of other agents.
class UnreachableGoal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two input paths occupy the same vertex or swap along an edge.
class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Task assignment ran out of eligible stations or endpoints.
class AssignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Order-proposal callback failed (bridge protocol violation, closed transport, ...).
class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lmapf
