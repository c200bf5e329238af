#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "bebop/descriptor.hpp"
#include "bebop/rpc/batch.hpp"
#include "bebop/rpc/context.hpp"
#include "bebop/rpc/futures.hpp"
#include "bebop/rpc/transport.hpp"

namespace bebop::rpc {

/// Payload types of a method. When present, requests that do not decode as
/// `request` are rejected with INVALID_ARGUMENT before the handler runs.
struct MethodTypes {
  TypeDescriptor request;
  TypeDescriptor response;
  std::shared_ptr<const TypeRegistry> registry;
};

struct MethodRegistration {
  std::uint32_t routing_id = 0;
  /// "/Service/Method", informational.
  std::string path;
  MethodKind kind = MethodKind::Unary;
  std::optional<MethodTypes> types;
  UnaryHandler unary;
  ServerStreamHandler server_stream;
  ClientStreamHandler client_stream;
  DuplexHandler duplex;
};

struct ServerOptions {
  /// Completed futures kept by the default store.
  std::size_t future_retention = 1024;
  /// Replaces the default in-memory store.
  std::shared_ptr<FutureStore> future_store;
  /// Maps a connection's peer identity and call metadata to the caller
  /// identity that owns futures. Defaults to the peer identity.
  std::function<std::string(const std::string& peer, const Metadata& metadata)> identity;
  Clock clock = [] { return Timestamp::now(); };
};

/// Routes calls by routing id. Ids 0..4 are reserved: 1 runs batches and
/// 2, 3, 4 dispatch, resolve, and cancel futures.
///
/// On a connection, each call opens a stream id. Its first frame carries an
/// encoded CallHeader; for unary and server-stream methods the request
/// payload follows the header in the same frame, which also ends the
/// client's side. Client-stream and duplex calls send one message per later
/// frame and finish with END_STREAM. Responses are one frame per message,
/// with END_STREAM on the last; server streams end with an empty END_STREAM
/// frame. Failures end the stream with an ERROR frame holding an
/// ErrorPayload. A client ERROR frame on an open stream cancels the call.
class Server {
 public:
  explicit Server(ServerOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Throws Error(ReservedCollision) for ids 0..4 or an id already in use.
  void add(MethodRegistration registration);
  void add_unary(std::string_view path, UnaryHandler handler, std::optional<MethodTypes> types = std::nullopt);
  void add_server_stream(std::string_view path, ServerStreamHandler handler,
                         std::optional<MethodTypes> types = std::nullopt);
  void add_client_stream(std::string_view path, ClientStreamHandler handler);
  void add_duplex(std::string_view path, DuplexHandler handler);

  /// Registration for an id, or nullptr. Reserved ids have none.
  std::shared_ptr<const MethodRegistration> find(std::uint32_t routing_id) const;
  std::optional<MethodKind> kind_of(std::uint32_t routing_id) const;

  /// Serves calls until the connection closes, then waits for its handlers.
  void serve(std::shared_ptr<Connection> connection);

  /// Runs a unary or server-stream method to completion, including the
  /// built-in batch and future methods other than resolve.
  CallOutcome invoke(CallContext& ctx, ByteView request);

  BatchResponse run_batch(const BatchRequest& request, const CallContext& parent);

  FutureManager& futures() { return *futures_; }
  std::string caller_identity(const std::string& peer, const Metadata& metadata) const;
  Timestamp now() const { return options_.clock(); }

 private:
  friend class Session;

  CallOutcome invoke_registered(const MethodRegistration& reg, CallContext& ctx, ByteView request);
  void validate_request(const MethodRegistration& reg, ByteView request) const;

  ServerOptions options_;
  mutable std::shared_mutex mutex_;
  std::map<std::uint32_t, std::shared_ptr<const MethodRegistration>> methods_;
  std::unique_ptr<FutureManager> futures_;
};

/// Accepts TCP connections on a background thread and serves each on its own.
class TcpServer {
 public:
  TcpServer(Server& server, const std::string& host = "127.0.0.1", std::uint16_t port = 0);
  ~TcpServer();
  std::uint16_t port() const noexcept { return listener_.port(); }
  void stop();

 private:
  Server& server_;
  TcpListener listener_;
  std::mutex mutex_;
  std::vector<std::shared_ptr<Connection>> connections_;
  std::vector<std::thread> threads_;
  std::thread accept_thread_;
  bool stopped_ = false;
};

}  // namespace bebop::rpc
