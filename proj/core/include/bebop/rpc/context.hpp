#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bebop/rpc/frame.hpp"
#include "bebop/rpc/messages.hpp"

namespace bebop::rpc {

enum class MethodKind : std::uint8_t { Unary, ServerStream, ClientStream, Duplex };

std::string_view method_kind_name(MethodKind kind) noexcept;

/// A call failure carrying a status. Handlers throw it to fail a call;
/// clients throw it when the server reports one.
class RpcError : public std::runtime_error {
 public:
  RpcError(Status status, std::string message, Bytes details = {});
  Status status() const noexcept { return status_; }
  const std::string& message() const noexcept { return message_; }
  const Bytes& details() const noexcept { return details_; }

 private:
  Status status_;
  std::string message_;
  Bytes details_;
};

/// Cooperative cancellation. Callbacks run once, on the cancelling thread.
class CancelSignal {
 public:
  void cancel();
  bool cancelled() const;
  /// Runs `fn` now if already cancelled.
  void on_cancel(std::function<void()> fn);

 private:
  mutable std::mutex mutex_;
  bool cancelled_ = false;
  std::vector<std::function<void()>> callbacks_;
};

using Clock = std::function<Timestamp()>;

struct CallContext {
  std::uint32_t method_id = 0;
  std::optional<Timestamp> deadline;
  Metadata metadata;
  /// Zero on a fresh call; otherwise the last position the client processed.
  std::uint64_t cursor = 0;
  /// Caller identity used for ownership checks.
  std::string peer;
  std::shared_ptr<CancelSignal> cancel = std::make_shared<CancelSignal>();
  /// Filled by handlers; surfaces in future results and HTTP headers.
  Metadata response_metadata;
  Clock clock = [] { return Timestamp::now(); };

  bool cancelled() const { return cancel->cancelled(); }
  bool expired() const { return deadline && deadline_expired(*deadline, clock()); }
};

/// Result of running one call to completion.
struct CallOutcome {
  Status status = Status::Ok;
  Bytes payload;
  /// Set for server-stream calls, whose responses are in `stream`.
  bool streamed = false;
  std::vector<Bytes> stream;
  std::string error_message;
  Bytes error_details;
  Metadata metadata;

  bool ok() const noexcept { return status == Status::Ok; }
  static CallOutcome failure(Status s, std::string message) {
    CallOutcome o;
    o.status = s;
    o.error_message = std::move(message);
    return o;
  }
};

class StreamWriter {
 public:
  virtual ~StreamWriter() = default;
  /// Throws Error(Closed) once the call is gone.
  virtual void write(Bytes payload, std::optional<std::uint64_t> cursor = std::nullopt) = 0;
};

class StreamReader {
 public:
  virtual ~StreamReader() = default;
  /// Next client message; nullopt when the client finished sending.
  /// Throws Error(Closed) when the call is cancelled or the connection drops.
  virtual std::optional<Bytes> read() = 0;
};

using UnaryHandler = std::function<Bytes(CallContext&, ByteView request)>;
using ServerStreamHandler = std::function<void(CallContext&, ByteView request, StreamWriter&)>;
using ClientStreamHandler = std::function<Bytes(CallContext&, StreamReader&)>;
using DuplexHandler = std::function<void(CallContext&, StreamReader&, StreamWriter&)>;

}  // namespace bebop::rpc
