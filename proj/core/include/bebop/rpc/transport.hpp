#pragma once

// Frame-carrying connections: an in-process loopback with a virtual clock and
// fault injection, and TCP stream sockets.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "bebop/rpc/frame.hpp"

namespace bebop::rpc {

struct ConnectionStats {
  std::uint64_t frames_sent = 0;
  std::uint64_t bytes_sent = 0;
  /// Header and cursor bytes only.
  std::uint64_t framing_bytes_sent = 0;
};

class Connection {
 public:
  virtual ~Connection() = default;

  /// Safe to call from several threads. Throws Error(Closed).
  virtual void send(const Frame& frame) = 0;
  /// Blocks for the next frame; nullopt once the connection is closed.
  /// Malformed input closes the connection. Only one thread may receive.
  virtual std::optional<Frame> receive() = 0;
  virtual void close() = 0;
  virtual bool is_closed() const = 0;
  /// Identity of the remote side: its address unless the transport knows better.
  virtual std::string peer_identity() const = 0;

  ConnectionStats stats() const;

 protected:
  void count_sent(const Frame& frame);

 private:
  std::atomic<std::uint64_t> frames_{0};
  std::atomic<std::uint64_t> bytes_{0};
  std::atomic<std::uint64_t> framing_{0};
};

struct LoopbackOptions {
  /// One-way delivery delay, applied to the virtual clock only.
  std::chrono::nanoseconds latency{0};
  /// Close both ends once this many frames went from the server end to the
  /// client end. Zero never disconnects.
  std::size_t disconnect_after_server_frames = 0;
  std::string client_identity = "loopback-client";
  std::string server_identity = "loopback-server";
};

namespace detail {
struct LoopbackShared;
}

/// Each end keeps a virtual time in nanoseconds. A frame is stamped with the
/// sender's time and moves the receiver's time to at least stamp + latency.
/// Processing itself takes no virtual time, so elapsed virtual time counts
/// network delay only.
class LoopbackConnection final : public Connection {
 public:
  LoopbackConnection(std::shared_ptr<detail::LoopbackShared> shared, bool client_end);
  ~LoopbackConnection() override;

  void send(const Frame& frame) override;
  std::optional<Frame> receive() override;
  void close() override;
  bool is_closed() const override;
  std::string peer_identity() const override;

  std::int64_t virtual_now_ns() const noexcept { return now_.load(); }
  /// Closes both ends immediately.
  void inject_disconnect();

 private:
  std::shared_ptr<detail::LoopbackShared> shared_;
  bool client_end_;
  std::atomic<std::int64_t> now_{0};
};

/// The first element is the client end.
std::pair<std::shared_ptr<LoopbackConnection>, std::shared_ptr<LoopbackConnection>> loopback_pair(
    LoopbackOptions options = {});

/// A connected TCP socket carrying raw frames.
class TcpConnection final : public Connection {
 public:
  TcpConnection(int fd, std::string peer, std::size_t max_frame_length = kDefaultMaxFrameLength);
  ~TcpConnection() override;

  void send(const Frame& frame) override;
  std::optional<Frame> receive() override;
  void close() override;
  bool is_closed() const override;
  std::string peer_identity() const override { return peer_; }

 private:
  bool read_exact(std::uint8_t* out, std::size_t n);

  int fd_;
  std::string peer_;
  std::size_t max_frame_length_;
  std::atomic<bool> closed_{false};
  std::mutex write_mutex_;
};

/// Throws Error(Refused) when nothing listens at the address.
std::shared_ptr<TcpConnection> tcp_connect(const std::string& host, std::uint16_t port);

class TcpListener {
 public:
  /// Port 0 picks a free port. Throws Error(Refused) when binding fails.
  explicit TcpListener(const std::string& host = "127.0.0.1", std::uint16_t port = 0);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  /// Blocks for the next client; nullptr once the listener is closed.
  std::shared_ptr<TcpConnection> accept();
  void close();

 private:
  std::atomic<int> fd_;
  std::uint16_t port_ = 0;
};

}  // namespace bebop::rpc
