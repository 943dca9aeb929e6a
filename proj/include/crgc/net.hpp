#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "crgc/codec.hpp"
#include "crgc/prgc.hpp"

namespace crgc {

struct NetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Framing: [type u8][session u64][length u32][payload], little-endian, over a
/// reliable byte stream. One session per connection; messages are processed
/// strictly in order by an explicit state machine.
enum class MsgType : uint8_t {
  HELLO = 1,
  CIRCUIT = 2,
  INPUT_A = 3,
  SECTION_PLAN = 4,
  EVAL_BEGIN = 5,
  OT_MSG = 6,
  GARBLED_SECTION = 7,
  OUTPUT_OT = 8,
  RESULT = 9,
  ERROR = 10,
  BYE = 11,
};

inline constexpr uint16_t kProtocolVersion = 1;

struct Message {
  MsgType type{};
  uint64_t session = 0;
  std::vector<uint8_t> payload;
};

void send_message(int fd, const Message& m);
Message recv_message(int fd);

enum class ServeMode : uint8_t { crgc = 0, prgc = 1 };

/// Serves one obfuscated circuit (and, in prgc mode, its section plan plus
/// per-evaluation garbled material) to any number of concurrent evaluator
/// sessions.
class GeneratorServer {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    uint16_t port = 0;  // 0 picks an ephemeral port
    ServeMode mode = ServeMode::crgc;
    uint64_t protocol_seed = 1;
  };

  GeneratorServer(Crgc crgc, SectionPlan plan, Options options);
  ~GeneratorServer();

  GeneratorServer(const GeneratorServer&) = delete;
  GeneratorServer& operator=(const GeneratorServer&) = delete;

  void start();
  void stop();
  uint16_t port() const { return port_; }
  uint64_t sessions_served() const { return sessions_.load(); }

 private:
  void accept_loop();
  void serve_connection(int fd);

  Crgc crgc_;
  SectionPlan plan_;
  Options options_;
  std::vector<uint8_t> public_circuit_bytes_;
  std::vector<uint8_t> plan_bytes_;
  std::vector<uint8_t> a_prime_bytes_;
  uint64_t public_hash_ = 0;
  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::thread accept_thread_;
  std::vector<std::thread> workers_;
  std::atomic<bool> running_{false};
  std::atomic<uint64_t> sessions_{0};
  std::atomic<uint64_t> session_counter_{0};
};

struct EvaluatorOptions {
  std::string host = "127.0.0.1";
  uint16_t port = 0;
  /// Cache directory; empty means $CRGC_CACHE_DIR, falling back to
  /// "crgc-cache" under the current directory.
  std::string cache_dir;
  /// With a warm cache, evaluate locally when the server is unreachable
  /// (crgc-mode material only).
  bool allow_offline = true;
};

struct EvaluatorResult {
  std::vector<BitVector> outputs;
  ServeMode mode = ServeMode::crgc;
  bool from_cache = false;
  bool offline = false;
  uint64_t bytes_downloaded = 0;     // circuit + input + plan payload bytes
  uint64_t bytes_per_eval_total = 0; // protocol payload bytes across evaluations
  uint64_t input_ot_labels = 0;      // one per section-input wire use
  uint64_t output_ot_bits = 0;       // one per final output unflip
  std::map<uint8_t, uint64_t> received_by_type;
};

/// Downloads (or revalidates from cache) the served material, evaluates every
/// b in order, and returns the outputs. In prgc mode each evaluation drives
/// the interactive OT/garbled-section sub-protocol.
EvaluatorResult run_evaluator(const EvaluatorOptions& options,
                              const std::vector<BitVector>& bs);

}  // namespace crgc
