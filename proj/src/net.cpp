#include "crgc/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <random>
#include <filesystem>
#include <fstream>

#include "crgc/bits.hpp"

namespace crgc {

namespace {

constexpr uint32_t kMaxPayload = 1u << 30;

void write_all(int fd, const uint8_t* data, size_t len) {
  while (len > 0) {
    ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
    if (n <= 0) throw NetError("connection write failed");
    data += n;
    len -= static_cast<size_t>(n);
  }
}

void read_all(int fd, uint8_t* data, size_t len) {
  while (len > 0) {
    ssize_t n = ::recv(fd, data, len, 0);
    if (n == 0) throw NetError("connection closed by peer");
    if (n < 0) throw NetError("connection read failed");
    data += n;
    len -= static_cast<size_t>(n);
  }
}

struct Fd {
  int fd = -1;
  explicit Fd(int f) : fd(f) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

void put_u64le(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back((v >> (8 * i)) & 0xff);
}
uint64_t get_u64le(const std::vector<uint8_t>& in, size_t pos) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(in.at(pos + i)) << (8 * i);
  return v;
}
void put_u32le(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}
uint32_t get_u32le(const std::vector<uint8_t>& in, size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(in.at(pos + i)) << (8 * i);
  return v;
}

std::vector<uint8_t> pack_bit_payload(const std::vector<uint8_t>& bits) {
  std::vector<uint8_t> out;
  put_u32le(out, static_cast<uint32_t>(bits.size()));
  uint8_t acc = 0;
  int k = 0;
  for (uint8_t b : bits) {
    acc |= static_cast<uint8_t>((b & 1) << k);
    if (++k == 8) {
      out.push_back(acc);
      acc = 0;
      k = 0;
    }
  }
  if (k) out.push_back(acc);
  return out;
}

std::vector<uint8_t> unpack_bit_payload(const std::vector<uint8_t>& payload, size_t pos = 0) {
  uint32_t n = get_u32le(payload, pos);
  std::vector<uint8_t> bits(n);
  for (uint32_t i = 0; i < n; ++i) bits[i] = (payload.at(pos + 4 + i / 8) >> (i % 8)) & 1;
  return bits;
}

int connect_to(const std::string& host, uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw NetError("socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw NetError("bad address: " + host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw NetError("connect failed: " + host + ":" + std::to_string(port));
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return fd;
}

std::string cache_root(const EvaluatorOptions& options) {
  if (!options.cache_dir.empty()) return options.cache_dir;
  if (const char* env = std::getenv("CRGC_CACHE_DIR"); env && *env) return env;
  return "crgc-cache";
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

void send_message(int fd, const Message& m) {
  if (m.payload.size() > kMaxPayload) throw NetError("payload too large");
  std::vector<uint8_t> frame;
  frame.reserve(13 + m.payload.size());
  frame.push_back(static_cast<uint8_t>(m.type));
  put_u64le(frame, m.session);
  put_u32le(frame, static_cast<uint32_t>(m.payload.size()));
  frame.insert(frame.end(), m.payload.begin(), m.payload.end());
  write_all(fd, frame.data(), frame.size());
}

Message recv_message(int fd) {
  uint8_t head[13];
  read_all(fd, head, sizeof(head));
  Message m;
  if (head[0] < static_cast<uint8_t>(MsgType::HELLO) ||
      head[0] > static_cast<uint8_t>(MsgType::BYE))
    throw NetError("unknown message tag " + std::to_string(head[0]));
  m.type = static_cast<MsgType>(head[0]);
  for (int i = 0; i < 8; ++i) m.session |= static_cast<uint64_t>(head[1 + i]) << (8 * i);
  uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<uint32_t>(head[9 + i]) << (8 * i);
  if (len > kMaxPayload) throw NetError("oversized payload");
  m.payload.resize(len);
  if (len) read_all(fd, m.payload.data(), len);
  return m;
}

// ---- server ----

GeneratorServer::GeneratorServer(Crgc crgc, SectionPlan plan, Options options)
    : crgc_(std::move(crgc)), plan_(std::move(plan)), options_(options) {
  if (options_.mode == ServeMode::prgc) {
    Circuit pub = redact_sections(crgc_.circuit, plan_);
    Crgc pub_crgc{pub, crgc_.a_prime, crgc_.meta};
    public_circuit_bytes_ = encode(pub_crgc);
    plan_bytes_ = encode(plan_);
    public_hash_ = circuit_content_hash(pub);
  } else {
    public_circuit_bytes_ = encode(crgc_);
    public_hash_ = circuit_content_hash(crgc_.circuit);
  }
  a_prime_bytes_ = pack_bit_payload(crgc_.a_prime.raw());
}

GeneratorServer::~GeneratorServer() { stop(); }

void GeneratorServer::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw NetError("socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options_.port);
  if (::inet_pton(AF_INET, options_.host.c_str(), &addr.sin_addr) != 1)
    throw NetError("bad listen address: " + options_.host);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    throw NetError("bind failed: " + std::string(std::strerror(errno)));
  if (::listen(listen_fd_, 16) != 0) throw NetError("listen failed");
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void GeneratorServer::stop() {
  if (!running_.exchange(false)) return;
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  for (auto& w : workers_)
    if (w.joinable()) w.join();
  workers_.clear();
}

void GeneratorServer::accept_loop() {
  while (running_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (!running_) break;
      continue;
    }
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void GeneratorServer::serve_connection(int raw_fd) {
  Fd fd(raw_fd);
  uint64_t session = 0;
  auto bail = [&](const std::string& why) {
    try {
      Message err{MsgType::ERROR, session, std::vector<uint8_t>(why.begin(), why.end())};
      send_message(fd.fd, err);
    } catch (const NetError&) {
    }
  };

  try {
    // HELLO: [version u16][have_cached u8][cached hash u64]
    Message hello = recv_message(fd.fd);
    session = hello.session;
    if (hello.type != MsgType::HELLO || hello.payload.size() < 11) {
      bail("expected HELLO");
      return;
    }
    uint16_t version = static_cast<uint16_t>(hello.payload[0]) |
                       (static_cast<uint16_t>(hello.payload[1]) << 8);
    if (version != kProtocolVersion) {
      bail("version mismatch");
      return;
    }
    const bool have_cached = hello.payload[2] != 0;
    const uint64_t cached_hash = get_u64le(hello.payload, 3);
    const bool skip_material = have_cached && cached_hash == public_hash_;

    std::vector<uint8_t> reply;
    reply.push_back(kProtocolVersion & 0xff);
    reply.push_back(kProtocolVersion >> 8);
    reply.push_back(static_cast<uint8_t>(options_.mode));
    put_u64le(reply, public_hash_);
    reply.push_back(skip_material ? 0 : 1);
    send_message(fd.fd, Message{MsgType::HELLO, session, reply});

    if (!skip_material) {
      send_message(fd.fd, Message{MsgType::CIRCUIT, session, public_circuit_bytes_});
      send_message(fd.fd, Message{MsgType::INPUT_A, session, a_prime_bytes_});
      if (options_.mode == ServeMode::prgc)
        send_message(fd.fd, Message{MsgType::SECTION_PLAN, session, plan_bytes_});
    }
    sessions_.fetch_add(1);

    // Per-session protocol engine, independent randomness per session.
    const uint64_t engine_seed =
        options_.protocol_seed ^ (0x7f4a7c15ULL + session_counter_.fetch_add(1) * 0x1000193ULL);
    std::unique_ptr<InProcessGenerator> engine;
    if (options_.mode == ServeMode::prgc)
      engine = std::make_unique<InProcessGenerator>(crgc_, plan_, engine_seed);

    enum class State { idle, in_eval };
    State state = State::idle;
    std::vector<uint8_t> section_done;

    while (true) {
      Message msg = recv_message(fd.fd);
      if (msg.session != session) {
        bail("session id mismatch");
        return;
      }
      if (msg.type == MsgType::BYE) return;
      if (msg.type == MsgType::RESULT) continue;  // optional echo, ignored

      if (options_.mode == ServeMode::crgc) {
        bail("unexpected message in crgc mode");
        return;
      }

      switch (msg.type) {
        case MsgType::EVAL_BEGIN: {
          if (state != State::idle) {
            bail("EVAL_BEGIN during an evaluation");
            return;
          }
          engine->begin_eval();
          auto sections = engine->fetch_garbled_sections();
          for (size_t sid = 0; sid < sections.size(); ++sid)
            send_message(fd.fd, Message{MsgType::GARBLED_SECTION, session, sections[sid]});
          section_done.assign(plan_.sections.size(), 0);
          state = State::in_eval;
          break;
        }
        case MsgType::OT_MSG: {
          if (state != State::in_eval) {
            bail("OT_MSG outside an evaluation");
            return;
          }
          const uint32_t sid = get_u32le(msg.payload, 0);
          if (sid >= plan_.sections.size() || section_done[sid]) {
            bail("OT_MSG for an invalid or finished section");
            return;
          }
          auto choices = unpack_bit_payload(msg.payload, 4);
          auto labels = engine->ot_section_inputs(sid, choices);
          std::vector<uint8_t> out;
          put_u32le(out, sid);
          put_u32le(out, static_cast<uint32_t>(labels.size()));
          for (const Label& l : labels) {
            put_u64le(out, l.lo);
            put_u64le(out, l.hi);
          }
          send_message(fd.fd, Message{MsgType::OT_MSG, session, out});
          section_done[sid] = 1;
          break;
        }
        case MsgType::OUTPUT_OT: {
          if (state != State::in_eval) {
            bail("OUTPUT_OT outside an evaluation");
            return;
          }
          for (uint8_t done : section_done)
            if (!done) {
              bail("OUTPUT_OT before all section transfers");
              return;
            }
          auto bits = unpack_bit_payload(msg.payload, 0);
          BitVector delivered(bits.size());
          for (size_t i = 0; i < bits.size(); ++i) delivered[i] = bits[i];
          BitVector truth = engine->ot_outputs(delivered);
          send_message(fd.fd, Message{MsgType::OUTPUT_OT, session,
                                      pack_bit_payload(truth.raw())});
          state = State::idle;
          break;
        }
        default:
          bail("message violates protocol state");
          return;
      }
    }
  } catch (const NetError&) {
    // peer went away; nothing to do
  } catch (const std::exception& e) {
    bail(e.what());
  }
}

// ---- evaluator ----

namespace {

class RemoteGenerator final : public GeneratorSide {
 public:
  RemoteGenerator(int fd, uint64_t session, size_t n_sections, EvaluatorResult& stats)
      : fd_(fd), session_(session), n_sections_(n_sections), stats_(stats) {}

  void begin_eval() override {
    ++eval_index_;
    send_message(fd_, Message{MsgType::EVAL_BEGIN, session_, {}});
    sections_.clear();
    for (size_t i = 0; i < n_sections_; ++i) {
      Message m = expect(MsgType::GARBLED_SECTION);
      sections_.push_back(std::move(m.payload));
    }
  }

  std::vector<std::vector<uint8_t>> fetch_garbled_sections() override { return sections_; }

  std::vector<Label> ot_section_inputs(uint32_t section,
                                       const std::vector<uint8_t>& choices) override {
    std::vector<uint8_t> payload;
    put_u32le(payload, section);
    auto packed = pack_bit_payload(choices);
    payload.insert(payload.end(), packed.begin(), packed.end());
    send_message(fd_, Message{MsgType::OT_MSG, session_, payload});
    Message m = expect(MsgType::OT_MSG);
    const uint32_t sid = get_u32le(m.payload, 0);
    const uint32_t count = get_u32le(m.payload, 4);
    if (sid != section || count != choices.size())
      throw NetError("OT reply does not match request");
    std::vector<Label> labels(count);
    for (uint32_t i = 0; i < count; ++i) {
      labels[i].lo = get_u64le(m.payload, 8 + 16 * i);
      labels[i].hi = get_u64le(m.payload, 8 + 16 * i + 8);
    }
    stats_.input_ot_labels += count;
    return labels;
  }

  BitVector ot_outputs(const BitVector& delivered) override {
    send_message(fd_, Message{MsgType::OUTPUT_OT, session_,
                              pack_bit_payload(delivered.raw())});
    Message m = expect(MsgType::OUTPUT_OT);
    auto bits = unpack_bit_payload(m.payload, 0);
    BitVector out(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) out[i] = bits[i];
    stats_.output_ot_bits += bits.size();
    return out;
  }

 private:
  Message expect(MsgType type) {
    Message m = recv_message(fd_);
    stats_.received_by_type[static_cast<uint8_t>(m.type)]++;
    if (m.type == MsgType::ERROR)
      throw NetError("server error: " + std::string(m.payload.begin(), m.payload.end()));
    if (m.type != type || m.session != session_) throw NetError("protocol violation by server");
    stats_.bytes_per_eval_total += m.payload.size();
    return m;
  }

  int fd_;
  uint64_t session_;
  size_t n_sections_;
  uint64_t eval_index_ = 0;
  std::vector<std::vector<uint8_t>> sections_;
  EvaluatorResult& stats_;
};

struct CachePaths {
  std::string circuit;
  std::string plan;
  std::string latest;
};

CachePaths cache_paths(const std::string& root, const std::string& host, uint16_t port,
                       uint64_t hash) {
  CachePaths p;
  p.circuit = root + "/" + hash_hex(hash) + ".crgc";
  p.plan = root + "/" + hash_hex(hash) + ".plan";
  p.latest = root + "/" + host + "_" + std::to_string(port) + ".latest";
  return p;
}

}  // namespace

EvaluatorResult run_evaluator(const EvaluatorOptions& options, const std::vector<BitVector>& bs) {
  EvaluatorResult result;
  const std::string root = cache_root(options);
  std::filesystem::create_directories(root);
  const std::string latest_path =
      root + "/" + options.host + "_" + std::to_string(options.port) + ".latest";

  // Cached material, if any, validated before use.
  uint64_t cached_hash = 0;
  bool have_cache = false;
  Crgc cached;
  SectionPlan cached_plan;
  bool cached_is_prgc = false;
  try {
    std::ifstream latest(latest_path);
    std::string hex;
    if (latest >> hex && hex.size() == 16) {
      cached_hash = std::stoull(hex, nullptr, 16);
      auto paths = cache_paths(root, options.host, options.port, cached_hash);
      cached = decode_crgc(read_file(paths.circuit));
      if (std::filesystem::exists(paths.plan)) {
        cached_plan = decode_section_plan(read_file(paths.plan));
        cached_is_prgc = true;
      }
      if (circuit_content_hash(cached.circuit) == cached_hash) have_cache = true;
    }
  } catch (const std::exception&) {
    have_cache = false;  // corrupt cache entries are simply re-fetched
  }

  int fd = -1;
  try {
    fd = connect_to(options.host, options.port);
  } catch (const NetError&) {
    if (options.allow_offline && have_cache && !cached_is_prgc) {
      result.mode = ServeMode::crgc;
      result.from_cache = true;
      result.offline = true;
      for (const BitVector& b : bs)
        result.outputs.push_back(evaluate(cached.circuit, cached.a_prime, b));
      return result;
    }
    throw;
  }
  Fd guard(fd);

  SplitRng session_rng(std::random_device{}());
  const uint64_t session = session_rng.next_u64();
  std::vector<uint8_t> hello;
  hello.push_back(kProtocolVersion & 0xff);
  hello.push_back(kProtocolVersion >> 8);
  hello.push_back(have_cache ? 1 : 0);
  put_u64le(hello, cached_hash);
  send_message(fd, Message{MsgType::HELLO, session, hello});

  Message reply = recv_message(fd);
  result.received_by_type[static_cast<uint8_t>(reply.type)]++;
  if (reply.type == MsgType::ERROR)
    throw NetError("server error: " + std::string(reply.payload.begin(), reply.payload.end()));
  if (reply.type != MsgType::HELLO || reply.payload.size() < 12)
    throw NetError("bad HELLO reply");
  result.mode = static_cast<ServeMode>(reply.payload[2]);
  const uint64_t server_hash = get_u64le(reply.payload, 3);
  const bool will_send = reply.payload[11] != 0;

  Crgc material;
  SectionPlan plan;
  if (!will_send) {
    if (!have_cache || cached_hash != server_hash) throw NetError("cache negotiation failed");
    material = std::move(cached);
    plan = std::move(cached_plan);
    result.from_cache = true;
  } else {
    Message mc = recv_message(fd);
    result.received_by_type[static_cast<uint8_t>(mc.type)]++;
    if (mc.type != MsgType::CIRCUIT) throw NetError("expected CIRCUIT");
    result.bytes_downloaded += mc.payload.size();
    material = decode_crgc(mc.payload);
    Message ma = recv_message(fd);
    result.received_by_type[static_cast<uint8_t>(ma.type)]++;
    if (ma.type != MsgType::INPUT_A) throw NetError("expected INPUT_A");
    result.bytes_downloaded += ma.payload.size();
    auto bits = unpack_bit_payload(ma.payload, 0);
    if (bits != material.a_prime.raw()) throw NetError("a' does not match circuit payload");
    std::vector<uint8_t> plan_payload;
    if (result.mode == ServeMode::prgc) {
      Message mp = recv_message(fd);
      result.received_by_type[static_cast<uint8_t>(mp.type)]++;
      if (mp.type != MsgType::SECTION_PLAN) throw NetError("expected SECTION_PLAN");
      result.bytes_downloaded += mp.payload.size();
      plan = decode_section_plan(mp.payload);
      plan_payload = std::move(mp.payload);
    }
    if (circuit_content_hash(material.circuit) != server_hash)
      throw NetError("downloaded circuit does not match announced hash");
    // Persist for future sessions ("store it on the hard drive").
    auto paths = cache_paths(root, options.host, options.port, server_hash);
    write_file(paths.circuit, encode(material));
    if (result.mode == ServeMode::prgc) write_file(paths.plan, plan_payload);
    std::ofstream latest(latest_path, std::ios::trunc);
    latest << hash_hex(server_hash) << "\n";
  }

  if (result.mode == ServeMode::crgc) {
    for (const BitVector& b : bs)
      result.outputs.push_back(evaluate(material.circuit, material.a_prime, b));
  } else {
    RemoteGenerator gen(fd, session, plan.sections.size(), result);
    for (const BitVector& b : bs)
      result.outputs.push_back(evaluate_prgc(plan, material.circuit, material.a_prime, gen, b));
  }

  try {
    send_message(fd, Message{MsgType::BYE, session, {}});
  } catch (const NetError&) {
  }
  return result;
}

}  // namespace crgc
