#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lmapf/prioritized.hpp"
#include "lmapf/rng.hpp"
#include "lmapf/sim.hpp"

namespace lmapf {

// K independent uniform permutations of 0..N-1.
std::vector<PriorityOrder> random_orders(std::size_t agent_count, int k, Rng& rng);

// Agents by descending static shortest-path length through their goal queues,
// ties by ascending id. Throws UnreachableGoal.
PriorityOrder dq_order(const WorldState& state, const DistanceOracle& distances);

class RandomOrderPolicy final : public OrderPolicy {
 public:
  explicit RandomOrderPolicy(std::uint64_t seed) : seed_(seed), rng_(Rng::stream(seed, 3)) {}
  void begin_episode(const EpisodeInfo& info) override;
  std::vector<PriorityOrder> propose(const PolicyContext& context, int k) override;

 private:
  std::uint64_t seed_;
  Rng rng_;
};

// Emits k copies of the distance-query order.
class DistanceQueryPolicy final : public OrderPolicy {
 public:
  std::vector<PriorityOrder> propose(const PolicyContext& context, int k) override;
};

// Random or distance-query policy for an episode seed. External policies are built by the bridge.
std::unique_ptr<OrderPolicy> make_builtin_policy(PolicyKind kind, std::uint64_t seed);

}  // namespace lmapf
