#include "lmapf/bridge.hpp"

#include <cstdio>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <json.hpp>

#include "lmapf/errors.hpp"

namespace lmapf {

using nlohmann::json;

std::optional<std::string> StreamChannel::read_line() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void StreamChannel::write_line(std::string_view line) {
  out_ << line << '\n';
  out_.flush();
}

std::string_view ActionViolation::code() const {
  switch (kind) {
    case ViolationKind::WrongK: return "wrong_k";
    case ViolationKind::WrongN: return "wrong_n";
    case ViolationKind::Malformed: return "malformed_message";
    default: return "invalid_permutation";
  }
}

std::string_view ActionViolation::reason() const {
  switch (kind) {
    case ViolationKind::WrongK: return "wrong_k";
    case ViolationKind::WrongN: return "wrong_n";
    case ViolationKind::DuplicateId: return "duplicate_id";
    case ViolationKind::MissingId: return "missing_id";
    case ViolationKind::OutOfRange: return "out_of_range";
    case ViolationKind::Malformed: return "malformed";
  }
  return "malformed";
}

std::optional<ActMessage> parse_act(std::string_view line, ActionViolation* violation) {
  const auto fail = [&](std::string detail) -> std::optional<ActMessage> {
    if (violation) *violation = {ViolationKind::Malformed, -1, std::move(detail)};
    return std::nullopt;
  };
  json msg = json::parse(line, nullptr, false);
  if (msg.is_discarded() || !msg.is_object()) return fail("not a JSON object");
  if (!msg.contains("type") || msg["type"] != "act") return fail("expected a message of type 'act'");
  if (!msg.contains("orders") || !msg["orders"].is_array()) return fail("'orders' must be an array");
  ActMessage act;
  for (const json& row : msg["orders"]) {
    if (!row.is_array()) return fail("each order must be an array");
    std::vector<long long> ids;
    for (const json& v : row) {
      if (!v.is_number_integer()) return fail("agent ids must be integers");
      ids.push_back(v.get<long long>());
    }
    act.orders.push_back(std::move(ids));
  }
  return act;
}

std::optional<ActionViolation> validate_action(const ActMessage& act, std::size_t n, int k) {
  if (static_cast<long long>(act.orders.size()) != k) {
    return ActionViolation{ViolationKind::WrongK, -1,
                           "expected " + std::to_string(k) + " orders, got " + std::to_string(act.orders.size())};
  }
  for (std::size_t r = 0; r < act.orders.size(); ++r) {
    const auto& row = act.orders[r];
    const int ri = static_cast<int>(r);
    if (row.size() != n) {
      return ActionViolation{ViolationKind::WrongN, ri,
                             "order " + std::to_string(r) + " has " + std::to_string(row.size()) + " ids, expected " +
                                 std::to_string(n)};
    }
    std::vector<std::uint8_t> seen(n, 0);
    for (long long id : row) {
      if (id < 0 || static_cast<std::size_t>(id) >= n) {
        return ActionViolation{ViolationKind::OutOfRange, ri,
                               "order " + std::to_string(r) + ": agent id " + std::to_string(id) + " out of range"};
      }
      if (seen[static_cast<std::size_t>(id)]) {
        return ActionViolation{ViolationKind::DuplicateId, ri,
                               "order " + std::to_string(r) + ": agent id " + std::to_string(id) + " repeated"};
      }
      seen[static_cast<std::size_t>(id)] = 1;
    }
    for (std::size_t id = 0; id < n; ++id) {
      if (!seen[id]) {
        return ActionViolation{ViolationKind::MissingId, ri,
                               "order " + std::to_string(r) + ": agent id " + std::to_string(id) + " missing"};
      }
    }
  }
  return std::nullopt;
}

std::string config_digest(const SimConfig& c, const GridMap& map) {
  std::ostringstream s;
  s << render_map(map) << '|' << c.agents << '|' << c.planning_horizon << '|' << c.execution_horizon << '|'
    << c.sim_horizon << '|' << c.candidates << '|' << c.beta << '|' << c.kappa << '|' << c.sigma << '|' << c.gamma
    << '|' << assigner_name(c.assigner);
  // FNV-1a, 64-bit
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json error_message(std::string_view code, std::string_view reason, std::string_view detail) {
  return {{"type", "error"}, {"code", code}, {"reason", reason}, {"detail", detail}};
}

json metrics_json(const EpisodeMetrics& m) {
  return {{"total_throughput", m.total_throughput}, {"tpa", m.tpa},
          {"infeasibility_rate", m.infeasibility_rate}, {"planning_steps", m.planning_steps},
          {"mean_solve_s", m.mean_solve_s}, {"max_solve_s", m.max_solve_s},
          {"step_completions", m.step_completions}, {"valid", m.valid}};
}

}  // namespace

void BridgePolicy::begin_episode(const EpisodeInfo& info) {
  const SimConfig& c = *info.config;
  json reset = {{"type", "reset"},
                {"v", kProtocolVersion},
                {"episode", episode_},
                {"config_digest", config_digest(c, *info.map)},
                {"seed", c.seed},
                {"n", c.agents},
                {"k", c.candidates},
                {"r", info.observation_cap},
                {"width", info.map->width()},
                {"height", info.map->height()},
                {"planning_steps", c.planning_steps()}};
  channel_.write_line(reset.dump());
}

std::optional<std::vector<PriorityOrder>> BridgePolicy::receive_act(std::size_t n, int k, bool last_attempt) {
  auto line = channel_.read_line();
  if (!line) throw PolicyError("transport closed while waiting for act");
  ActionViolation violation{ViolationKind::Malformed, -1, {}};
  std::optional<ActMessage> act = parse_act(*line, &violation);
  std::optional<ActionViolation> problem;
  if (!act) {
    problem = violation;
  } else {
    problem = validate_action(*act, n, k);
  }
  if (!problem) {
    std::vector<PriorityOrder> orders;
    for (const auto& row : act->orders) orders.push_back({{row.begin(), row.end()}});
    return orders;
  }
  channel_.write_line(error_message(problem->code(), problem->reason(), problem->detail).dump());
  if (last_attempt) {
    throw PolicyError("invalid act after re-send: " + std::string(problem->code()) + ": " + problem->detail);
  }
  return std::nullopt;
}

std::vector<PriorityOrder> BridgePolicy::propose(const PolicyContext& context, int k) {
  json obs = {{"type", "obs"}, {"step", context.step}, {"r", context.observation.r},
              {"paths", context.observation.paths}};
  const std::string line = obs.dump();
  const std::size_t n = context.state.agents.size();
  channel_.write_line(line);
  if (auto orders = receive_act(n, k, false)) return *orders;
  channel_.write_line(line);
  return *receive_act(n, k, true);
}

void BridgePolicy::feedback(const StepFeedback& fb) {
  json msg = {{"type", "feedback"},
              {"step", fb.step},
              {"reward", fb.reward->reward},
              {"sum_d", fb.reward->sum_distance()},
              {"sum_c", fb.reward->sum_congested()},
              {"sum_s", fb.reward->sum_infeasible()},
              {"completions", fb.completions},
              {"done", fb.done}};
  channel_.write_line(msg.dump());
}

void BridgePolicy::end_episode(const EpisodeMetrics& metrics) {
  json msg = metrics_json(metrics);
  msg["type"] = "metrics";
  msg["episode"] = episode_;
  channel_.write_line(msg.dump());
}

ServeReport serve(const SimConfig& config, const GridMap& map, LineChannel& channel,
                  const std::vector<std::uint64_t>& seeds, std::ostream& log) {
  ServeReport report;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const int e = static_cast<int>(i);
    SimConfig episode_config = config;
    episode_config.seed = seeds[i];
    BridgePolicy policy(channel, e);
    EpisodeResult result;
    try {
      result = run_episode(episode_config, map, policy, false);
    } catch (const std::exception& ex) {
      // Write failures on a closed socket surface here.
      report.ok = false;
      report.error = ex.what();
      log << "bridge: episode " << e << " failed: " << ex.what() << '\n';
      return report;
    }
    report.episodes.push_back(result.metrics);
    if (!result.metrics.valid) {
      report.ok = false;
      report.error = result.metrics.error;
      log << "bridge: episode " << e << " aborted: " << result.metrics.error << '\n';
      return report;
    }
  }
  return report;
}

}  // namespace lmapf
