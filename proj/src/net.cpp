#include "conveyor/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace conveyor {

using nlohmann::ordered_json;

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

sockaddr_in resolve(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string host = ep.host.empty() ? "0.0.0.0" : ep.host;
  if (int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res); rc != 0 || !res)
    throw NetError("cannot resolve '" + host + "': " + ::gai_strerror(rc));
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  ::freeaddrinfo(res);
  addr.sin_port = htons(ep.port);
  return addr;
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw NetError("endpoint must be host:port, got '" + text + "'");
  Endpoint ep;
  if (colon > 0) ep.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(port, &used);
    if (used != port.size() || v > 65535) throw std::out_of_range("port");
    ep.port = static_cast<unsigned short>(v);
  } catch (const std::logic_error&) {
    throw NetError("bad port in '" + text + "'");
  }
  return ep;
}

LineStream::~LineStream() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<LineStream> LineStream::connect(const Endpoint& ep) {
  const sockaddr_in addr = resolve(ep);
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw NetError(errno_text("socket"));
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string msg = errno_text("connect");
    ::close(fd);
    throw NetError(msg);
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return std::make_unique<LineStream>(fd);
}

std::optional<std::string> LineStream::read_line() {
  for (;;) {
    if (auto nl = buf_.find('\n'); nl != std::string::npos) {
      std::string line = buf_.substr(0, nl);
      buf_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      if (buf_.empty()) return std::nullopt;
      std::string rest = std::move(buf_);
      buf_.clear();
      return rest;
    }
    buf_.append(chunk, static_cast<std::size_t>(n));
  }
}

void LineStream::write_line(const std::string& line) {
  std::string data = line + '\n';
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    const ssize_t n = ::send(fd_, p, left, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw NetError(errno_text("send"));
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

void LineStream::shutdown() { ::shutdown(fd_, SHUT_RDWR); }

BridgeServer::BridgeServer(WorldConfig cfg, std::shared_ptr<const PatternRegistry> registry, const Endpoint& bind)
    : cfg_(validated(cfg)), registry_(std::move(registry)) {
  const sockaddr_in addr = resolve(bind);
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw NetError(errno_text("socket"));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 16) != 0) {
    const std::string msg = errno_text("bind");
    ::close(listen_fd_);
    throw NetError(msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

BridgeServer::~BridgeServer() {
  stop();
  ::close(listen_fd_);
}

void BridgeServer::run() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      break;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto stream = std::make_shared<LineStream>(fd);
    std::lock_guard lock(mu_);
    if (stopping_) {
      stream->shutdown();
      break;
    }
    clients_.push_back(stream);
    workers_.emplace_back([this, stream] { serve_client(stream); });
  }
}

void BridgeServer::start() {
  acceptor_ = std::thread([this] { run(); });
}

void BridgeServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    for (auto& c : clients_) c->shutdown();
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
}

void BridgeServer::serve_client(std::shared_ptr<LineStream> stream) {
  BridgeSession session(cfg_, registry_);
  try {
    while (auto line = stream->read_line()) {
      if (line->empty()) continue;
      stream->write_line(session.handle(*line));
      if (session.closed()) break;
    }
  } catch (const NetError&) {
    // client went away
  }
  stream->shutdown();
}

void serve_stream(const WorldConfig& cfg, std::shared_ptr<const PatternRegistry> registry, std::istream& in,
                  std::ostream& out) {
  BridgeSession session(cfg, std::move(registry));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << session.handle(line) << '\n' << std::flush;
    if (session.closed()) break;
  }
}

Controller remote_controller(const Endpoint& policy, const WorldConfig& cfg) {
  std::shared_ptr<LineStream> stream = LineStream::connect(policy);
  return [stream, cfg](const DecisionRequest& req) -> std::optional<std::size_t> {
    const Observation o = encode_observation(req, cfg);
    ordered_json j;
    j["v"] = kProtocolVersion;
    j["obs"] = o.obs;
    j["mask"] = o.mask;
    ordered_json info;
    info["sim_time"] = req.sim_time;
    info["deciding_robot"] = req.robot;
    ordered_json ids = ordered_json::array();
    for (const auto& id : o.slot_ids) ids.push_back(id ? ordered_json(*id) : ordered_json(nullptr));
    info["object_ids"] = std::move(ids);
    j["info"] = std::move(info);
    stream->write_line(j.dump());
    const auto line = stream->read_line();
    if (!line) throw NetError("policy closed the connection");
    const auto reply = ordered_json::parse(*line, nullptr, false);
    if (reply.is_discarded() || !reply.contains("slot") || !reply["slot"].is_number_integer())
      throw NetError("policy reply lacks an integer \"slot\": " + *line);
    const auto slot = reply["slot"].get<long long>();
    if (slot < 0 || static_cast<std::size_t>(slot) >= req.candidates.size()) return std::nullopt;
    return static_cast<std::size_t>(slot);
  };
}

}  // namespace conveyor
