#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bebop/rpc/context.hpp"
#include "bebop/rpc/messages.hpp"

namespace bebop::rpc {

struct BatchPlan {
  /// Indices into the call list, grouped by layer, ascending within a layer.
  std::vector<std::vector<std::size_t>> layers;
  /// Layer of each call: the length of its longest dependency path.
  std::vector<std::size_t> layer_of;
  friend bool operator==(const BatchPlan&, const BatchPlan&) = default;
};

/// Returns the kind of a method, or nullopt when it is not known. Unknown
/// methods are planned normally and fail when executed.
using MethodKindLookup = std::function<std::optional<MethodKind>(std::uint32_t method_id)>;

/// Throws Error(InvalidReference) for input_from outside [-1, own index) and
/// Error(MethodNotBatchable) for client-stream and duplex methods.
BatchPlan plan_batch(const std::vector<BatchCall>& calls, const MethodKindLookup& kind_of = {});

/// Runs one call with the given request payload.
using BatchInvoker = std::function<CallOutcome(const BatchCall& call, ByteView payload)>;

struct BatchOptions {
  std::optional<Timestamp> deadline;
  Clock clock = [] { return Timestamp::now(); };
};

/// Every call starts as soon as the call it reads from has finished; calls of
/// one layer run concurrently. A call whose dependency failed gets
/// INVALID_ARGUMENT, and once the deadline passes every unfinished call gets
/// DEADLINE_EXCEEDED. Results keep the order of `calls`.
BatchResponse execute_batch(const BatchPlan& plan, const std::vector<BatchCall>& calls, const BatchInvoker& invoke,
                            const BatchOptions& options = {});

/// The request a dependent receives from a finished call: its payload, or the
/// encoded list of stream payloads for a server-stream call.
Bytes forwarded_payload(const CallOutcome& from);

}  // namespace bebop::rpc
