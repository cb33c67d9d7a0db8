#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "lmapf/errors.hpp"
#include "lmapf/sipp.hpp"

namespace lmapf {

namespace {

struct Node {
  Location loc;
  int interval;
  int goal;  // index of the next goal to visit
  int arrival;
  int waits;
  int parent;
  int f;
  bool terminal;
};

struct OpenEntry {
  int f;
  int waits;
  Location loc;
  int id;
};

struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.waits != b.waits) return a.waits > b.waits;
    if (a.loc != b.loc) return a.loc > b.loc;
    return a.id > b.id;
  }
};

class SippSearch {
 public:
  SippSearch(const PathQuery& query, const GridMap& map, const ReservationTable& table,
             const DistanceOracle& distances)
      : map_(map), table_(table), distances_(distances), horizon_(query.horizon), start_(query.start) {
    goals_ = effective_goals(distances, query.start, query.goals, query.horizon);
    suffix_.assign(goals_.size() + 1, 0);
    for (std::size_t k = goals_.size(); k-- > 1;) {
      suffix_[k - 1] = suffix_[k] + distances_.distance(goals_[k - 1], goals_[k]);
    }
    fields_.reserve(goals_.size());
    for (Location g : goals_) fields_.push_back(&distances_.field(g));
  }

  std::optional<TimedPath> run(SippStats* stats) {
    const int goal_count = static_cast<int>(goals_.size());
    const int start_interval = table_.interval_index(start_, 0);
    if (start_interval < 0) throw std::invalid_argument("plan_sipp: start is reserved at t=0");
    const auto& start_intervals = intervals(start_);
    const int g0 = advance_goals(start_, 0, start_intervals[static_cast<std::size_t>(start_interval)].end == kOpenEnded);
    if (g0 == goal_count) return materialize(push({start_, start_interval, g0, 0, 0, -1, 0, true}, false));
    push({start_, start_interval, g0, 0, 0, -1, heuristic(start_, g0), false}, true);

    while (!open_.empty()) {
      const OpenEntry top = open_.top();
      open_.pop();
      const Node node = nodes_[static_cast<std::size_t>(top.id)];
      if (node.terminal) {
        if (stats) stats->expansions += expansions_, stats->generated += nodes_.size();
        return materialize(top.id);
      }
      if (best_arrival(node) < node.arrival) continue;
      ++expansions_;
      expand(top.id, node);
    }
    if (stats) stats->expansions += expansions_, stats->generated += nodes_.size();
    return std::nullopt;
  }

 private:
  const std::vector<SafeInterval>& intervals(Location loc) {
    auto it = interval_cache_.find(loc);
    if (it == interval_cache_.end()) it = interval_cache_.emplace(loc, table_.safe_intervals(loc)).first;
    return it->second;
  }

  int heuristic(Location loc, int goal) const {
    if (goal >= static_cast<int>(goals_.size())) return 0;
    const int d = (*fields_[static_cast<std::size_t>(goal)])[static_cast<std::size_t>(loc)];
    if (d >= kUnreachable) return kUnreachable;
    return d + suffix_[static_cast<std::size_t>(goal)];
  }

  // Goal index after arriving at loc. The final goal only counts if the agent can stay.
  int advance_goals(Location loc, int goal, bool can_stay) const {
    const int count = static_cast<int>(goals_.size());
    while (goal < count && goals_[static_cast<std::size_t>(goal)] == loc) {
      if (goal == count - 1 && !can_stay) break;
      ++goal;
    }
    return goal;
  }

  static std::uint64_t key(Location loc, int interval, int goal) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(loc)) << 32) |
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(interval)) << 16) |
           static_cast<std::uint64_t>(static_cast<std::uint16_t>(goal));
  }

  int best_arrival(const Node& n) const {
    auto it = best_.find(key(n.loc, n.interval, n.goal));
    return it == best_.end() ? kOpenEnded : it->second;
  }

  int push(const Node& n, bool check_closed) {
    if (check_closed) {
      auto [it, inserted] = best_.try_emplace(key(n.loc, n.interval, n.goal), n.arrival);
      if (!inserted) {
        if (it->second <= n.arrival) return -1;
        it->second = n.arrival;
      }
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(n);
    open_.push({n.f, n.waits, n.loc, id});
    return id;
  }

  void expand(int id, const Node& node) {
    const int goal_count = static_cast<int>(goals_.size());
    const SafeInterval here = intervals(node.loc)[static_cast<std::size_t>(node.interval)];

    if (here.end == kOpenEnded && node.arrival < horizon_) {
      // Wait out the window in place, then continue unconstrained.
      push({node.loc, node.interval, node.goal, horizon_, node.waits + (horizon_ - node.arrival), id,
            horizon_ + heuristic(node.loc, node.goal), true},
           false);
    }

    for (int m = 0; m < 4; ++m) {
      const auto next = map_.step(node.loc, static_cast<Move>(m));
      if (!next) continue;
      const Location v = *next;
      if (heuristic(v, node.goal) >= kUnreachable) continue;
      const auto& targets = intervals(v);
      for (std::size_t j = 0; j < targets.size(); ++j) {
        const SafeInterval target = targets[j];
        if (target.begin > here.end + 1) break;
        if (target.end < node.arrival + 1) continue;
        const int lo = std::max(node.arrival, target.begin - 1);
        const int hi = std::min(here.end, target.end - 1);
        if (lo > hi) continue;
        int depart = lo;
        while (depart <= hi && depart < horizon_ && table_.edge_reserved(v, node.loc, depart)) ++depart;
        if (depart > hi) continue;
        const int arrival = depart + 1;
        const int goal = advance_goals(v, node.goal, target.end == kOpenEnded);
        const bool terminal = goal == goal_count || arrival >= horizon_;
        const int f = arrival + heuristic(v, goal);
        push({v, static_cast<int>(j), goal, arrival, node.waits + (depart - node.arrival), id, f, terminal},
             !terminal);
      }
    }
  }

  TimedPath materialize(int id) {
    std::vector<int> chain;
    for (int cur = id; cur >= 0; cur = nodes_[static_cast<std::size_t>(cur)].parent) chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());

    TimedPath path;
    const Node& root = nodes_[static_cast<std::size_t>(chain.front())];
    path.locations.push_back(root.loc);
    for (int g = 0; g < root.goal; ++g) path.goal_visits.push_back(0);
    for (std::size_t k = 1; k < chain.size(); ++k) {
      const Node& prev = nodes_[static_cast<std::size_t>(chain[k - 1])];
      const Node& cur = nodes_[static_cast<std::size_t>(chain[k])];
      while (static_cast<int>(path.locations.size()) < cur.arrival) path.locations.push_back(prev.loc);
      path.locations.push_back(cur.loc);
      for (int g = prev.goal; g < cur.goal; ++g) path.goal_visits.push_back(cur.arrival);
    }
    const Node& last = nodes_[static_cast<std::size_t>(chain.back())];
    if (last.goal < static_cast<int>(goals_.size())) {
      const std::span<const Location> rest(goals_.data() + last.goal, goals_.size() - static_cast<std::size_t>(last.goal));
      const auto tail = shortest_path_static(distances_, last.loc, rest);
      int g = last.goal;
      for (std::size_t k = 1; k < tail.size(); ++k) {
        path.locations.push_back(tail[k]);
        while (g < static_cast<int>(goals_.size()) && goals_[static_cast<std::size_t>(g)] == tail[k]) {
          path.goal_visits.push_back(path.length());
          ++g;
        }
      }
    }
    return path;
  }

  const GridMap& map_;
  const ReservationTable& table_;
  const DistanceOracle& distances_;
  int horizon_;
  Location start_;
  std::vector<Location> goals_;
  std::vector<int> suffix_;
  std::vector<const DistanceField*> fields_;
  std::vector<Node> nodes_;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open_;
  std::unordered_map<std::uint64_t, int> best_;
  std::unordered_map<Location, std::vector<SafeInterval>> interval_cache_;
  std::size_t expansions_ = 0;
};

}  // namespace

std::optional<TimedPath> plan_sipp(const PathQuery& query, const GridMap& map, const ReservationTable& reservations,
                                   const DistanceOracle& distances, SippStats* stats) {
  if (query.goals.empty()) throw std::invalid_argument("plan_sipp: empty goal sequence");
  if (!map.traversable(query.start)) throw std::invalid_argument("plan_sipp: start is not traversable");
  for (Location g : query.goals) {
    if (!map.traversable(g)) throw std::invalid_argument("plan_sipp: goal " + std::to_string(g) + " is not traversable");
  }
  if (query.horizon != reservations.horizon()) {
    throw std::invalid_argument("plan_sipp: query horizon differs from reservation horizon");
  }
  SippSearch search(query, map, reservations, distances);
  return search.run(stats);
}

std::optional<TimedPath> plan_sipp(const PathQuery& query, const GridMap& map, const ReservationTable& reservations) {
  DistanceOracle distances(map);
  return plan_sipp(query, map, reservations, distances);
}

}  // namespace lmapf
