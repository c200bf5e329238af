#pragma once

// Control messages of the RPC protocol. Each struct mirrors a message in the
// built-in `bebop/rpc.bop` schema and is encoded through it.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bebop/rpc/frame.hpp"
#include "bebop/wire.hpp"

namespace bebop::rpc {

using Metadata = std::map<std::string, Bytes>;

struct CallHeader {
  std::uint32_t method_id = 0;
  std::optional<Timestamp> deadline;
  Metadata metadata;
  std::uint64_t cursor = 0;
  friend bool operator==(const CallHeader&, const CallHeader&) = default;
};

struct ErrorPayload {
  Status code = Status::Unknown;
  std::string message;
  Bytes details;
  friend bool operator==(const ErrorPayload&, const ErrorPayload&) = default;
};

struct BatchCall {
  std::int32_t call_id = 0;
  std::uint32_t method_id = 0;
  Bytes payload;
  /// -1 uses `payload`; otherwise the index of an earlier call whose result
  /// becomes this call's request. An absent field decodes as -1.
  std::int32_t input_from = -1;
  friend bool operator==(const BatchCall&, const BatchCall&) = default;
};

struct BatchRequest {
  std::vector<BatchCall> calls;
  std::optional<Timestamp> deadline;
  Metadata metadata;
  friend bool operator==(const BatchRequest&, const BatchRequest&) = default;
};

struct BatchResult {
  std::int32_t call_id = 0;
  Status status = Status::Ok;
  Bytes payload;
  /// Responses of a server-stream call, in order.
  std::vector<Bytes> stream_payloads;
  std::string error_message;
  friend bool operator==(const BatchResult&, const BatchResult&) = default;
};

struct BatchResponse {
  std::vector<BatchResult> results;
  friend bool operator==(const BatchResponse&, const BatchResponse&) = default;
};

struct UnaryCall {
  std::uint32_t method_id = 0;
  Bytes payload;
  Metadata metadata;
  friend bool operator==(const UnaryCall&, const UnaryCall&) = default;
};

struct FutureDispatchRequest {
  std::optional<UnaryCall> call;
  std::optional<BatchRequest> batch;
  std::optional<Timestamp> deadline;
  std::optional<Uuid> idempotency_key;
  bool discard_result = false;
  friend bool operator==(const FutureDispatchRequest&, const FutureDispatchRequest&) = default;
};

struct FutureHandle {
  Uuid id;
  friend bool operator==(const FutureHandle&, const FutureHandle&) = default;
};

struct FutureResolveRequest {
  std::vector<Uuid> ids;
  friend bool operator==(const FutureResolveRequest&, const FutureResolveRequest&) = default;
};

struct FutureResult {
  Uuid id;
  Status status = Status::Ok;
  Bytes payload;
  Metadata metadata;
  std::string error_message;
  friend bool operator==(const FutureResult&, const FutureResult&) = default;
};

struct FutureCancelRequest {
  Uuid id;
  friend bool operator==(const FutureCancelRequest&, const FutureCancelRequest&) = default;
};

Bytes encode(const CallHeader& m);
Bytes encode(const ErrorPayload& m);
Bytes encode(const BatchRequest& m);
Bytes encode(const BatchResponse& m);
Bytes encode(const FutureDispatchRequest& m);
Bytes encode(const FutureHandle& m);
Bytes encode(const FutureResolveRequest& m);
Bytes encode(const FutureResult& m);
Bytes encode(const FutureCancelRequest& m);

/// Each decoder reads one message from the start of `in` and advances past it.
/// Malformed input throws bebop::Error.
CallHeader decode_call_header(ByteReader& in);
ErrorPayload decode_error_payload(ByteView bytes);
BatchRequest decode_batch_request(ByteView bytes);
BatchResponse decode_batch_response(ByteView bytes);
FutureDispatchRequest decode_future_dispatch_request(ByteView bytes);
FutureHandle decode_future_handle(ByteView bytes);
FutureResolveRequest decode_future_resolve_request(ByteView bytes);
FutureResult decode_future_result(ByteView bytes);
FutureCancelRequest decode_future_cancel_request(ByteView bytes);

/// `Empty` encodes as a message with no fields.
Bytes encode_empty();
/// Encoding of `byte[][]`, used when a server-stream result feeds a batch dependent.
Bytes encode_payload_list(const std::vector<Bytes>& payloads);
std::vector<Bytes> decode_payload_list(ByteView bytes);

}  // namespace bebop::rpc
