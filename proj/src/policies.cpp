#include "lmapf/policies.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lmapf {

std::vector<PriorityOrder> random_orders(std::size_t agent_count, int k, Rng& rng) {
  if (agent_count == 0 || k < 1) throw std::invalid_argument("random_orders: need N >= 1 and K >= 1");
  std::vector<PriorityOrder> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    PriorityOrder order = identity_order(agent_count);
    rng.shuffle(std::span<int>(order.agents));
    out.push_back(std::move(order));
  }
  return out;
}

PriorityOrder dq_order(const WorldState& state, const DistanceOracle& distances) {
  const std::size_t n = state.agents.size();
  std::vector<std::size_t> lengths(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState& a = state.agents[i];
    if (a.goals.empty()) throw std::invalid_argument("dq_order: agent without goal");
    const std::vector<Location> goals(a.goals.begin(), a.goals.end());
    lengths[i] = shortest_path_static(distances, a.location, goals).size();
  }
  PriorityOrder order = identity_order(n);
  std::stable_sort(order.agents.begin(), order.agents.end(), [&](int x, int y) {
    return lengths[static_cast<std::size_t>(x)] > lengths[static_cast<std::size_t>(y)];
  });
  return order;
}

void RandomOrderPolicy::begin_episode(const EpisodeInfo& info) {
  rng_ = Rng::stream(info.config ? info.config->seed : seed_, 3);
}

std::vector<PriorityOrder> RandomOrderPolicy::propose(const PolicyContext& context, int k) {
  return random_orders(context.state.agents.size(), k, rng_);
}

std::vector<PriorityOrder> DistanceQueryPolicy::propose(const PolicyContext& context, int k) {
  return std::vector<PriorityOrder>(static_cast<std::size_t>(k), dq_order(context.state, context.distances));
}

std::unique_ptr<OrderPolicy> make_builtin_policy(PolicyKind kind, std::uint64_t seed) {
  switch (kind) {
    case PolicyKind::Random: return std::make_unique<RandomOrderPolicy>(seed);
    case PolicyKind::DistanceQuery: return std::make_unique<DistanceQueryPolicy>();
    case PolicyKind::External: break;
  }
  throw std::invalid_argument("make_builtin_policy: external policies need a bridge");
}

}  // namespace lmapf
