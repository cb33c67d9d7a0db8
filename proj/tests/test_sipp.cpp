#include <doctest.h>

#include "lmapf/errors.hpp"
#include "lmapf/sipp.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/sipp_sweep.hpp"

using namespace lmapf;

namespace {

TimedPath walk(std::vector<Location> cells, int agent = 0) { return {agent, std::move(cells), {}}; }

}  // namespace

TEST_CASE("empty reservation table") {
  const GridMap m = fixtures::open_grid(3, 3);
  const ReservationTable t(m, 6);
  CHECK(t.empty());
  for (Location l = 0; l < m.size(); ++l) {
    const auto iv = t.safe_intervals(l);
    REQUIRE(iv.size() == 1);
    CHECK(iv[0].begin == 0);
    CHECK(iv[0].end == kOpenEnded);
  }
}

TEST_CASE("a waiting agent reserves its cell for the whole window") {
  const GridMap m = fixtures::open_grid(3, 3);
  const std::vector<TimedPath> paths{walk({4})};
  const ReservationTable t = build_reservations(m, paths, 7);
  for (int tt = 0; tt < 7; ++tt) CHECK(t.vertex_reserved(4, tt));
  CHECK_FALSE(t.vertex_reserved(4, 7));
  const auto iv = t.safe_intervals(4);
  REQUIRE(iv.size() == 1);
  CHECK(iv[0].begin == 7);
}

TEST_CASE("reservations match exhaustive membership for two crossing paths") {
  const GridMap m = fixtures::open_grid(3, 3);
  // 3 -> 4 -> 5 and 1 -> 4 -> 7, one step apart.
  const std::vector<TimedPath> paths{walk({3, 4, 5}), walk({1, 1, 4, 7}, 1)};
  const int w = 5;
  const ReservationTable t = build_reservations(m, paths, w);
  std::vector<std::vector<Location>> rows{{3, 4, 5}, {1, 1, 4, 7}};
  const oracle::Reservations ref(rows, w);
  for (Location a = 0; a < m.size(); ++a) {
    for (int tt = 0; tt < w; ++tt) {
      CHECK(t.vertex_reserved(a, tt) == (ref.vertex.count({a, tt}) == 1));
      for (Location b = 0; b < m.size(); ++b) {
        if (a == b || !oracle::adjacent_or_same(m, a, b)) continue;
        CHECK(t.edge_reserved(a, b, tt) == (ref.edge.count({a, b, tt}) == 1));
      }
    }
  }
  CHECK(t.edge_reserved(3, 4, 0));
  CHECK(t.edge_reserved(4, 7, 2));
  CHECK_FALSE(t.edge_reserved(4, 3, 0));
}

TEST_CASE("conflicting inputs are rejected") {
  const GridMap m = fixtures::open_grid(3, 1);
  CHECK_THROWS_AS(build_reservations(m, std::vector<TimedPath>{walk({0, 1}), walk({2, 1})}, 3), ConflictError);
  CHECK_THROWS_AS(build_reservations(m, std::vector<TimedPath>{walk({0, 1}), walk({1, 0})}, 3), ConflictError);
  ReservationTable t(m, 3);
  t.add_path(walk({0}));
  CHECK_THROWS_AS(t.add_path(walk({1, 0})), ConflictError);
  CHECK_FALSE(t.vertex_reserved(1, 0));
}

TEST_CASE("safe intervals cover exactly the unreserved timesteps") {
  const GridMap m = fixtures::open_grid(4, 1);
  const ReservationTable t = build_reservations(m, std::vector<TimedPath>{walk({0, 1, 2, 1, 0, 0})}, 8);
  for (Location l = 0; l < 4; ++l) {
    const auto iv = t.safe_intervals(l);
    for (std::size_t k = 1; k < iv.size(); ++k) CHECK(iv[k - 1].end + 1 < iv[k].begin);
    for (int tt = 0; tt < 12; ++tt) {
      const bool free = !t.vertex_reserved(l, tt);
      CHECK(free == (t.interval_index(l, tt) >= 0));
    }
  }
  const auto iv = t.safe_intervals(1);
  REQUIRE(iv.size() == 3);
  CHECK(iv[0].begin == 0);
  CHECK(iv[0].end == 0);
  CHECK(iv[1].begin == 2);
  CHECK(iv[1].end == 2);
  CHECK(iv[2].begin == 4);
}

TEST_CASE("open 3x3 corner to corner") {
  const GridMap m = fixtures::open_grid(3, 3);
  const auto p = plan_sipp({m.at(0, 0), {m.at(2, 2)}, 6}, m, ReservationTable(m, 6));
  REQUIRE(p);
  CHECK(p->length() == 4);
  CHECK(p->goal_visits == std::vector<int>{4});
}

TEST_CASE("corridor with an opposing agent forces exactly one wait") {
  // 1x5 corridor with a side pocket at column 2; the other agent ducks into it.
  const GridMap m = fixtures::grid({".....", "@@.@@"});
  const Location pocket = m.at(1, 2);
  const std::vector<TimedPath> other{walk({m.at(0, 4), m.at(0, 3), m.at(0, 2), pocket})};
  const int w = 8;
  const auto table = build_reservations(m, other, w);
  const auto free = plan_sipp({m.at(0, 0), {m.at(0, 4)}, w}, m, ReservationTable(m, w));
  const auto constrained = plan_sipp({m.at(0, 0), {m.at(0, 4)}, w}, m, table);
  REQUIRE(free);
  REQUIRE(constrained);
  CHECK(constrained->length() == free->length() + 1);
  const auto expected = oracle::windowed_arrival(m, {other[0].locations}, m.at(0, 0), {m.at(0, 4)}, w);
  REQUIRE(expected);
  CHECK(constrained->length() == *expected);
}

TEST_CASE("boxed-in start is infeasible") {
  const GridMap m = fixtures::open_grid(3, 1);
  // One agent steps from the exit onto the start at t=1, another takes the exit behind it.
  const std::vector<TimedPath> others{walk({1, 0}, 1), walk({2, 1}, 2)};
  const int w = 4;
  const auto table = build_reservations(m, others, w);
  CHECK_FALSE(plan_sipp({0, {2}, w}, m, table).has_value());
  CHECK_FALSE(oracle::windowed_arrival(m, {others[0].locations, others[1].locations}, 0, {2}, w).has_value());
}

TEST_CASE("waiting out the window at the start is a valid plan") {
  const GridMap m = fixtures::grid({"...", "@.@"});
  const Location start = m.at(1, 1);
  const std::vector<TimedPath> sitter{walk({m.at(0, 1)}, 1)};
  const int w = 5;
  const auto p = plan_sipp({start, {m.at(0, 0)}, w}, m, build_reservations(m, sitter, w));
  REQUIRE(p);
  // Leaves at t = w - 1, reaches the exit at t = w when reservations stop applying.
  CHECK(p->length() == w + 1);
  CHECK(oracle::windowed_arrival(m, {sitter[0].locations}, start, {m.at(0, 0)}, w) == w + 1);
}

TEST_CASE("start reserved at t=0 or a walled-off goal are errors") {
  const GridMap m = fixtures::grid({"..@."});
  const auto table = build_reservations(m, std::vector<TimedPath>{walk({0})}, 4);
  CHECK_THROWS_AS(plan_sipp({0, {1}, 4}, m, table), std::invalid_argument);
  CHECK_THROWS_AS(plan_sipp({1, {3}, 4}, m, ReservationTable(m, 4)), UnreachableGoal);
  CHECK_THROWS_AS(plan_sipp({1, {}, 4}, m, ReservationTable(m, 4)), std::invalid_argument);
  CHECK_THROWS_AS(plan_sipp({1, {2}, 4}, m, ReservationTable(m, 4)), std::invalid_argument);
  CHECK_THROWS_AS(plan_sipp({1, {0}, 3}, m, ReservationTable(m, 4)), std::invalid_argument);
}

TEST_CASE("a goal that is later swept by a higher-priority agent does not count") {
  const GridMap m = fixtures::open_grid(3, 2);
  // The passer crosses the goal (0,0) at t=3 and parks at (1,0).
  const std::vector<Location> passer{m.at(1, 0), m.at(1, 1), m.at(0, 1), m.at(0, 0), m.at(1, 0)};
  const int w = 6;
  const auto table = build_reservations(m, std::vector<TimedPath>{walk(passer)}, w);
  const auto p = plan_sipp({m.at(0, 2), {m.at(0, 0)}, w}, m, table);
  REQUIRE(p);
  CHECK(p->length() > 2);
  const auto expected = oracle::windowed_arrival(m, {passer}, m.at(0, 2), {m.at(0, 0)}, w);
  REQUIRE(expected);
  CHECK(p->length() == *expected);
  CHECK(sweep::respects(m, *p, {passer}, m.at(0, 2), {m.at(0, 0)}, w));
}

TEST_CASE("multi-goal path visits goals in order") {
  const GridMap m = fixtures::open_grid(4, 4);
  const std::vector<Location> goals{m.at(0, 3), m.at(3, 3), m.at(3, 0)};
  const auto p = plan_sipp({m.at(0, 0), goals, 4}, m, ReservationTable(m, 4));
  REQUIRE(p);
  CHECK(p->length() == 9);
  CHECK(p->goal_visits == std::vector<int>{3, 6, 9});
}

TEST_CASE("static shortest paths") {
  const GridMap m = fixtures::open_grid(4, 4);
  SUBCASE("start equals goal") { CHECK(shortest_path_static(m, 5, std::vector<Location>{5}).size() == 1); }
  SUBCASE("corner to corner") {
    const auto p = shortest_path_static(m, m.at(0, 0), std::vector<Location>{m.at(3, 3)});
    CHECK(p.size() == 7);
  }
  SUBCASE("two goals concatenate two independent searches") {
    const GridMap g = fixtures::grid({"....", ".@@.", "....", "@..."});
    const Location a = g.at(0, 0), b = g.at(2, 3), c = g.at(3, 1);
    const auto both = shortest_path_static(g, a, std::vector<Location>{b, c});
    auto first = shortest_path_static(g, a, std::vector<Location>{b});
    const auto second = shortest_path_static(g, b, std::vector<Location>{c});
    first.insert(first.end(), second.begin() + 1, second.end());
    CHECK(both == first);
    const auto db = oracle::bfs(g, b);
    const auto dc = oracle::bfs(g, c);
    CHECK(static_cast<int>(both.size()) - 1 == db[static_cast<std::size_t>(a)] + dc[static_cast<std::size_t>(b)]);
  }
  SUBCASE("unreachable") {
    const GridMap g = fixtures::grid({".@."});
    CHECK_THROWS_AS(shortest_path_static(g, 0, std::vector<Location>{2}), UnreachableGoal);
  }
}

TEST_CASE("distance fields") {
  const GridMap open = fixtures::open_grid(5, 4);
  const auto f = distance_field(open, open.at(1, 2));
  for (Location l = 0; l < open.size(); ++l) CHECK(f[static_cast<std::size_t>(l)] == open.manhattan(l, open.at(1, 2)));
  const GridMap walled = fixtures::grid({"..@.", "..@."});
  const auto g = distance_field(walled, 0);
  CHECK(g[0] == 0);
  CHECK(g[3] == kUnreachable);
  CHECK_THROWS_AS(distance_field(walled, 2), std::invalid_argument);
  for (Location l = 0; l < walled.size(); ++l) {
    if (!walled.traversable(l) || g[static_cast<std::size_t>(l)] >= kUnreachable) continue;
    CHECK(static_cast<int>(shortest_path_static(walled, l, std::vector<Location>{0}).size()) - 1 ==
          g[static_cast<std::size_t>(l)]);
  }
}

TEST_CASE("goal chains beyond the depth cap are truncated") {
  const GridMap m = fixtures::open_grid(3, 1);
  const DistanceOracle d(m);
  // Budget is w + 4 * (W + H) = 1 + 16 = 17.
  std::vector<Location> goals;
  for (int k = 0; k < 20; ++k) goals.push_back(k % 2 == 0 ? 2 : 0);
  const auto kept = effective_goals(d, 0, goals, 1);
  CHECK(kept.size() == 8);
  const auto p = plan_sipp({0, goals, 1}, m, ReservationTable(m, 1), d);
  REQUIRE(p);
  CHECK(p->length() == 16);
  CHECK(p->goal_visits.size() == kept.size());
}

TEST_CASE("cost is monotone as reservations are added") {
  Rng rng(99);
  const GridMap m = fixtures::grid({".....", ".@...", "...@.", "....."});
  const DistanceOracle d(m);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = 3 + static_cast<int>(rng.below(6));
    std::vector<std::vector<Location>> reserved;
    std::vector<Location> free;
    for (Location l = 0; l < m.size(); ++l) {
      if (m.traversable(l)) free.push_back(l);
    }
    const Location goal = free[rng.below(free.size())];
    long previous = -1;
    Location start = -1;
    for (int k = 0; k < 4; ++k) {
      if (k > 0) {
        auto walk = sweep::random_walk(m, w, reserved, rng);
        if (!walk) break;
        if (walk->front() == start) continue;
        reserved.push_back(*walk);
      } else {
        start = free[rng.below(free.size())];
      }
      std::vector<TimedPath> paths;
      for (const auto& r : reserved) paths.push_back({0, r, {}});
      const auto p = plan_sipp({start, {goal}, w}, m, build_reservations(m, paths, w), d);
      const long cost = p ? p->length() : 1'000'000;
      CHECK(cost >= previous);
      previous = cost;
    }
  }
}

TEST_CASE("sampled oracle sweep over 3x3 maps") {
  const sweep::Tally t = sweep::run(3, 3, 2, 6, 3, 7);
  INFO(t.first_failure);
  CHECK(t.instances > 1000);
  CHECK(t.mismatches == 0);
  CHECK(t.invalid_paths == 0);
}
