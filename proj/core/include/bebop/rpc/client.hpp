#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <thread>

#include "bebop/rpc/context.hpp"
#include "bebop/rpc/messages.hpp"
#include "bebop/rpc/transport.hpp"

namespace bebop::rpc {

struct CallOptions {
  std::optional<Timestamp> deadline;
  Metadata metadata;
  /// Resume position for server streams; zero on a fresh call.
  std::uint64_t cursor = 0;
};

/// Anything that can run a unary call addressed by "/Service/Method".
class UnaryChannel {
 public:
  virtual ~UnaryChannel() = default;
  /// Throws RpcError on a failure status and Error(Closed) when the
  /// transport goes away.
  virtual Bytes unary(std::string_view path, ByteView request, const CallOptions& options = {}) = 0;
};

namespace detail {
struct ClientStreamState;
}

struct StreamItem {
  Bytes payload;
  std::optional<std::uint64_t> cursor;
};

/// Receiving half of a call.
class ResponseStream {
 public:
  ResponseStream(std::shared_ptr<detail::ClientStreamState> state, std::shared_ptr<Connection> conn,
                 std::uint32_t stream_id);
  ResponseStream(ResponseStream&&) noexcept;
  ResponseStream& operator=(ResponseStream&&) noexcept;
  ~ResponseStream();

  /// Next response; nullopt after the final frame. Throws RpcError on an
  /// error frame and Error(Closed) when the connection drops mid-stream.
  std::optional<StreamItem> next();
  /// Cursor of the latest response that carried one.
  std::optional<std::uint64_t> last_cursor() const noexcept { return last_cursor_; }
  bool finished() const noexcept { return finished_; }
  /// Asks the server to stop; later next() calls return nullopt.
  void cancel();
  std::uint32_t stream_id() const noexcept { return stream_id_; }

 private:
  std::shared_ptr<detail::ClientStreamState> state_;
  std::shared_ptr<Connection> conn_;
  std::uint32_t stream_id_ = 0;
  std::optional<std::uint64_t> last_cursor_;
  bool finished_ = false;
};

/// Sending half of a client-stream or duplex call.
class RequestStream {
 public:
  RequestStream(std::shared_ptr<Connection> conn, std::uint32_t stream_id)
      : conn_(std::move(conn)), stream_id_(stream_id) {}
  void write(Bytes payload);
  /// Ends the client's side of the call.
  void close();

 private:
  std::shared_ptr<Connection> conn_;
  std::uint32_t stream_id_;
  bool closed_ = false;
};

struct StreamingCall {
  RequestStream requests;
  ResponseStream responses;
};

/// Client of one connection. A background thread routes incoming frames to
/// calls; stream ids are allocated upward from 1.
class Client final : public UnaryChannel {
 public:
  explicit Client(std::shared_ptr<Connection> connection);
  ~Client() override;
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  Bytes unary(std::uint32_t method_id, ByteView request, const CallOptions& options = {});
  Bytes unary(std::string_view path, ByteView request, const CallOptions& options = {}) override;
  ResponseStream server_stream(std::uint32_t method_id, ByteView request, const CallOptions& options = {});
  /// Client-stream and duplex calls.
  StreamingCall open_stream(std::uint32_t method_id, const CallOptions& options = {});
  /// Sends all requests, then waits for the single response.
  Bytes client_stream(std::uint32_t method_id, const std::vector<Bytes>& requests, const CallOptions& options = {});

  BatchResponse batch(const BatchRequest& request, const CallOptions& options = {});
  FutureHandle dispatch_future(const FutureDispatchRequest& request, const CallOptions& options = {});
  ResponseStream resolve_futures(const FutureResolveRequest& request, const CallOptions& options = {});
  void cancel_future(const Uuid& id, const CallOptions& options = {});

  Connection& connection() { return *conn_; }
  void close();

 private:
  std::pair<std::uint32_t, std::shared_ptr<detail::ClientStreamState>> open(const CallHeader& header,
                                                                            ByteView request, bool end);
  void read_loop();

  std::shared_ptr<Connection> conn_;
  std::atomic<std::uint32_t> next_stream_{1};
  std::mutex mutex_;
  std::map<std::uint32_t, std::shared_ptr<detail::ClientStreamState>> streams_;
  std::thread reader_;
};

}  // namespace bebop::rpc
