#pragma once

// Background execution of unary calls and batches, addressed by UUID and
// resolved by push.

#include <atomic>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "bebop/rpc/context.hpp"
#include "bebop/rpc/messages.hpp"

namespace bebop::rpc {

struct StoredResult {
  std::string owner;
  FutureResult result;
};

/// Storage for terminal future results. Persisting and notifying are
/// separate so a durable backend can commit before fanning out; the runtime
/// always calls persist_result before notify_subscribers.
class FutureStore {
 public:
  using Subscriber = std::function<void(const FutureResult&)>;

  virtual ~FutureStore() = default;
  virtual void persist_result(const StoredResult& result) = 0;
  /// Delivers to subscribers of the result's owner. Subscribers must not block.
  virtual void notify_subscribers(const StoredResult& result) = 0;
  virtual std::optional<FutureResult> load_result(const Uuid& id) = 0;
  /// Applies the retention policy.
  virtual void evict() = 0;

  virtual std::uint64_t subscribe(const std::string& owner, Subscriber fn) = 0;
  virtual void unsubscribe(std::uint64_t token) = 0;
};

/// Keeps the `retention` most recently persisted results.
class InMemoryFutureStore : public FutureStore {
 public:
  explicit InMemoryFutureStore(std::size_t retention = 1024) : retention_(retention) {}

  void persist_result(const StoredResult& result) override;
  void notify_subscribers(const StoredResult& result) override;
  std::optional<FutureResult> load_result(const Uuid& id) override;
  void evict() override;
  std::uint64_t subscribe(const std::string& owner, Subscriber fn) override;
  void unsubscribe(std::uint64_t token) override;

  std::size_t size() const;

 private:
  std::size_t retention_;
  mutable std::mutex mutex_;
  std::unordered_map<Uuid, FutureResult, UuidHash> results_;
  std::deque<Uuid> order_;
  std::uint64_t next_token_ = 1;
  std::map<std::uint64_t, std::pair<std::string, Subscriber>> subscribers_;
};

enum class FutureState : std::uint8_t { Pending, Completed, Cancelled };

/// Runs the inner work of a future. Receives a context whose deadline is the
/// request's deadline and whose cancel signal fires on cancellation.
using FutureWork = std::function<CallOutcome(CallContext&, const FutureDispatchRequest&)>;
/// Rejects malformed requests by throwing RpcError before any work starts.
using FutureValidator = std::function<void(const FutureDispatchRequest&)>;

class FutureManager {
 public:
  FutureManager(std::shared_ptr<FutureStore> store, FutureWork work, FutureValidator validate = {});
  /// Cancels pending futures and waits for their tasks.
  ~FutureManager();
  FutureManager(const FutureManager&) = delete;
  FutureManager& operator=(const FutureManager&) = delete;

  /// Returns at once; the work runs on its own thread. Throws RpcError.
  FutureHandle dispatch(const FutureDispatchRequest& request, const std::string& caller, Clock clock = {});

  /// Streams results until every requested id was delivered, or until
  /// `cancel` fires when `ids` is empty. Throws RpcError(PERMISSION_DENIED)
  /// before sending anything when an id belongs to another caller.
  void resolve(const FutureResolveRequest& request, const std::string& caller, StreamWriter& out,
               CancelSignal& cancel);

  /// Throws RpcError(NOT_FOUND) or RpcError(PERMISSION_DENIED).
  void cancel(const Uuid& id, const std::string& caller);

  std::optional<FutureState> state(const Uuid& id) const;
  FutureStore& store() { return *store_; }

 private:
  struct Record {
    std::string owner;
    std::optional<Uuid> key;
    bool discard = false;
    FutureState state = FutureState::Pending;
    std::shared_ptr<CancelSignal> cancel;
  };

  void finish(const Uuid& id, CallOutcome outcome);
  void publish(const Record& record, FutureResult result);
  void reap_locked();

  std::shared_ptr<FutureStore> store_;
  FutureWork work_;
  FutureValidator validate_;
  mutable std::mutex mutex_;
  std::unordered_map<Uuid, Record, UuidHash> records_;
  std::map<std::pair<std::string, Uuid>, Uuid> keys_;
  std::vector<std::pair<std::thread, std::shared_ptr<std::atomic<bool>>>> tasks_;
};

}  // namespace bebop::rpc
