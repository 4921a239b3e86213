#pragma once

#include <atomic>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "conveyor/bridge.hpp"

namespace conveyor {

class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  unsigned short port = 0;
};

/// Parses "host:port" or ":port" (host defaults to 127.0.0.1).
Endpoint parse_endpoint(const std::string& text);

/// Blocking newline-delimited stream over a TCP socket.
class LineStream {
 public:
  explicit LineStream(int fd) : fd_(fd) {}
  ~LineStream();
  LineStream(const LineStream&) = delete;
  LineStream& operator=(const LineStream&) = delete;

  static std::unique_ptr<LineStream> connect(const Endpoint& ep);

  /// Next line without the terminator; nullopt at end of stream.
  std::optional<std::string> read_line();
  void write_line(const std::string& line);
  /// Unblocks pending reads from another thread.
  void shutdown();

 private:
  int fd_;
  std::string buf_;
};

/// Multi-session TCP front end for BridgeSession. Each accepted connection
/// gets its own session and thread.
class BridgeServer {
 public:
  BridgeServer(WorldConfig cfg, std::shared_ptr<const PatternRegistry> registry, const Endpoint& bind);
  ~BridgeServer();

  /// Actual bound port (useful with port 0).
  unsigned short port() const { return port_; }

  /// Accept loop; returns after stop().
  void run();
  /// run() on a background thread.
  void start();
  void stop();

 private:
  void serve_client(std::shared_ptr<LineStream> stream);

  WorldConfig cfg_;
  std::shared_ptr<const PatternRegistry> registry_;
  int listen_fd_ = -1;
  unsigned short port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::vector<std::shared_ptr<LineStream>> clients_;
  std::vector<std::thread> workers_;
};

/// Serves one session over a pair of streams until close or EOF.
void serve_stream(const WorldConfig& cfg, std::shared_ptr<const PatternRegistry> registry, std::istream& in,
                  std::ostream& out);

/// Controller that asks a remote policy for each decision. The remote end
/// receives {"v":1,"obs":[...],"mask":[...],"info":{...}} and answers
/// {"slot":k}; masked or padded slots become no-ops.
Controller remote_controller(const Endpoint& policy, const WorldConfig& cfg);

}  // namespace conveyor
