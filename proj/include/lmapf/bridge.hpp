#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmapf/grid_map.hpp"
#include "lmapf/sim.hpp"

namespace lmapf {

// Line-delimited bidirectional byte stream. Lines exclude the trailing LF.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  // nullopt once the peer has closed the stream.
  virtual std::optional<std::string> read_line() = 0;
  virtual void write_line(std::string_view line) = 0;
};

class StreamChannel final : public LineChannel {
 public:
  StreamChannel(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
  std::optional<std::string> read_line() override;
  void write_line(std::string_view line) override;

 private:
  std::istream& in_;
  std::ostream& out_;
};

// Owns a connected socket descriptor.
class SocketChannel final : public LineChannel {
 public:
  explicit SocketChannel(int fd) : fd_(fd) {}
  ~SocketChannel() override;
  SocketChannel(const SocketChannel&) = delete;
  SocketChannel& operator=(const SocketChannel&) = delete;

  std::optional<std::string> read_line() override;
  void write_line(std::string_view line) override;

 private:
  int fd_;
  std::string buffer_;
  bool eof_ = false;
};

inline constexpr int kProtocolVersion = 1;

enum class ViolationKind { WrongK, WrongN, DuplicateId, MissingId, OutOfRange, Malformed };

struct ActionViolation {
  ViolationKind kind;
  int row = -1;  // offending order, -1 if not row-specific
  std::string detail;

  // Wire error code: wrong_k, wrong_n, invalid_permutation or malformed_message.
  std::string_view code() const;
  std::string_view reason() const;
};

struct ActMessage {
  std::vector<std::vector<long long>> orders;
};

// Parses {"type":"act","orders":[[...],...]}; a violation of kind Malformed otherwise.
std::optional<ActMessage> parse_act(std::string_view line, ActionViolation* violation);

// ok (nullopt) iff exactly k rows, each a permutation of 0..n-1.
std::optional<ActionViolation> validate_action(const ActMessage& act, std::size_t n, int k);

// Stable hex digest of the map contents and every SimConfig field that shapes an
// episode other than the seed.
std::string config_digest(const SimConfig& config, const GridMap& map);

// Order-proposal policy backed by a remote process speaking the bridge protocol.
class BridgePolicy final : public OrderPolicy {
 public:
  BridgePolicy(LineChannel& channel, int episode) : channel_(channel), episode_(episode) {}

  void begin_episode(const EpisodeInfo& info) override;
  std::vector<PriorityOrder> propose(const PolicyContext& context, int k) override;
  void feedback(const StepFeedback& fb) override;
  void end_episode(const EpisodeMetrics& metrics) override;

 private:
  std::optional<std::vector<PriorityOrder>> receive_act(std::size_t n, int k, bool last_attempt);

  LineChannel& channel_;
  int episode_;
};

struct ServeReport {
  std::vector<EpisodeMetrics> episodes;
  bool ok = true;
  std::string error;
};

// Runs one episode per seed with the remote policy. Errors are written to `log` and
// stop the stream.
ServeReport serve(const SimConfig& config, const GridMap& map, LineChannel& channel,
                  const std::vector<std::uint64_t>& seeds, std::ostream& log);

// Seed offset between concurrent TCP connections.
inline constexpr std::uint64_t kConnectionSeedStride = 1ULL << 20;

// Listens on 127.0.0.1:port (0 = ephemeral) and serves `connections` clients, each on
// its own thread and environment. Connection c runs every seed plus
// c * kConnectionSeedStride. `on_listening` receives the bound port.
std::vector<ServeReport> serve_tcp(const SimConfig& config, const GridMap& map, int port,
                                   const std::vector<std::uint64_t>& seeds, int connections, std::ostream& log,
                                   const std::function<void(int)>& on_listening = {});

// Client side of a TCP connection, for tests and tools.
int connect_tcp(int port);

}  // namespace lmapf
