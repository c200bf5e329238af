#include "bebop/rpc/futures.hpp"

#include <condition_variable>
#include <set>

namespace bebop::rpc {

void InMemoryFutureStore::persist_result(const StoredResult& result) {
  std::lock_guard lock(mutex_);
  const auto [it, inserted] = results_.insert_or_assign(result.result.id, result.result);
  if (inserted) order_.push_back(result.result.id);
}

void InMemoryFutureStore::notify_subscribers(const StoredResult& result) {
  std::vector<Subscriber> targets;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [token, sub] : subscribers_) {
      if (sub.first == result.owner) targets.push_back(sub.second);
    }
  }
  for (const auto& fn : targets) fn(result.result);
}

std::optional<FutureResult> InMemoryFutureStore::load_result(const Uuid& id) {
  std::lock_guard lock(mutex_);
  const auto it = results_.find(id);
  if (it == results_.end()) return std::nullopt;
  return it->second;
}

void InMemoryFutureStore::evict() {
  std::lock_guard lock(mutex_);
  while (order_.size() > retention_) {
    results_.erase(order_.front());
    order_.pop_front();
  }
}

std::uint64_t InMemoryFutureStore::subscribe(const std::string& owner, Subscriber fn) {
  std::lock_guard lock(mutex_);
  const std::uint64_t token = next_token_++;
  subscribers_.emplace(token, std::make_pair(owner, std::move(fn)));
  return token;
}

void InMemoryFutureStore::unsubscribe(std::uint64_t token) {
  std::lock_guard lock(mutex_);
  subscribers_.erase(token);
}

std::size_t InMemoryFutureStore::size() const {
  std::lock_guard lock(mutex_);
  return results_.size();
}

FutureManager::FutureManager(std::shared_ptr<FutureStore> store, FutureWork work, FutureValidator validate)
    : store_(std::move(store)), work_(std::move(work)), validate_(std::move(validate)) {
  if (!store_) store_ = std::make_shared<InMemoryFutureStore>();
}

FutureManager::~FutureManager() {
  std::vector<std::pair<std::thread, std::shared_ptr<std::atomic<bool>>>> tasks;
  {
    std::lock_guard lock(mutex_);
    for (auto& [id, r] : records_) {
      if (r.state == FutureState::Pending) r.cancel->cancel();
    }
    tasks.swap(tasks_);
  }
  for (auto& [t, done] : tasks) t.join();
}

void FutureManager::reap_locked() {
  for (auto it = tasks_.begin(); it != tasks_.end();) {
    if (it->second->load()) {
      it->first.join();
      it = tasks_.erase(it);
    } else {
      ++it;
    }
  }
}

FutureHandle FutureManager::dispatch(const FutureDispatchRequest& request, const std::string& caller, Clock clock) {
  if (request.call.has_value() == request.batch.has_value()) {
    throw RpcError(Status::InvalidArgument, "a future wraps exactly one unary call or one batch");
  }
  if (validate_) validate_(request);

  std::lock_guard lock(mutex_);
  reap_locked();
  if (request.idempotency_key) {
    const auto it = keys_.find({caller, *request.idempotency_key});
    if (it != keys_.end()) return FutureHandle{it->second};
  }
  Uuid id;
  do {
    id = Uuid::random_v4();
  } while (records_.count(id) != 0);

  Record& record = records_[id];
  record.owner = caller;
  record.key = request.idempotency_key;
  record.discard = request.discard_result;
  record.cancel = std::make_shared<CancelSignal>();
  if (record.key) keys_[{caller, *record.key}] = id;

  auto ctx = std::make_shared<CallContext>();
  ctx->deadline = request.deadline;
  ctx->metadata = request.call ? request.call->metadata : request.batch->metadata;
  ctx->method_id = request.call ? request.call->method_id : 0;
  ctx->peer = caller;
  ctx->cancel = record.cancel;
  if (clock) ctx->clock = std::move(clock);

  auto done = std::make_shared<std::atomic<bool>>(false);
  tasks_.emplace_back(
      [this, id, ctx, request, done] {
        CallOutcome outcome;
        try {
          outcome = work_(*ctx, request);
        } catch (const RpcError& e) {
          outcome = CallOutcome::failure(e.status(), e.message());
        } catch (const std::exception& e) {
          outcome = CallOutcome::failure(Status::Internal, e.what());
        }
        finish(id, std::move(outcome));
        done->store(true);
      },
      done);
  return FutureHandle{id};
}

void FutureManager::finish(const Uuid& id, CallOutcome outcome) {
  Record copy;
  {
    std::lock_guard lock(mutex_);
    Record& r = records_.at(id);
    if (r.state != FutureState::Pending) return;
    r.state = FutureState::Completed;
    copy = r;
  }
  FutureResult result;
  result.id = id;
  result.status = outcome.status;
  result.payload = std::move(outcome.payload);
  result.metadata = std::move(outcome.metadata);
  result.error_message = std::move(outcome.error_message);
  publish(copy, std::move(result));
}

void FutureManager::publish(const Record& record, FutureResult result) {
  const StoredResult stored{record.owner, std::move(result)};
  if (!record.discard) {
    try {
      store_->persist_result(stored);
      store_->evict();
    } catch (const std::exception&) {
      // Live subscribers still get the result; a later resolve reports the
      // storage failure through load_result.
    }
  }
  store_->notify_subscribers(stored);
}

void FutureManager::cancel(const Uuid& id, const std::string& caller) {
  Record copy;
  {
    std::lock_guard lock(mutex_);
    const auto it = records_.find(id);
    if (it == records_.end()) throw RpcError(Status::NotFound, "no future " + id.to_string());
    Record& r = it->second;
    if (r.owner != caller) throw RpcError(Status::PermissionDenied, "future " + id.to_string() + " belongs to another caller");
    if (r.state != FutureState::Pending) return;
    r.state = FutureState::Cancelled;
    if (r.key) keys_.erase({r.owner, *r.key});
    copy = r;
  }
  copy.cancel->cancel();
  FutureResult result;
  result.id = id;
  result.status = Status::Cancelled;
  result.error_message = "cancelled";
  publish(copy, std::move(result));
}

std::optional<FutureState> FutureManager::state(const Uuid& id) const {
  std::lock_guard lock(mutex_);
  const auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second.state;
}

namespace {

struct Inbox {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<FutureResult> queue;
  bool stop = false;

  void push(FutureResult r) {
    {
      std::lock_guard lock(mutex);
      queue.push_back(std::move(r));
    }
    ready.notify_all();
  }
  void halt() {
    {
      std::lock_guard lock(mutex);
      stop = true;
    }
    ready.notify_all();
  }
};

FutureResult missing(const Uuid& id, std::string why) {
  FutureResult r;
  r.id = id;
  r.status = Status::NotFound;
  r.error_message = std::move(why);
  return r;
}

}  // namespace

void FutureManager::resolve(const FutureResolveRequest& request, const std::string& caller, StreamWriter& out,
                            CancelSignal& cancel) {
  const std::set<Uuid> wanted(request.ids.begin(), request.ids.end());
  {
    std::lock_guard lock(mutex_);
    for (const Uuid& id : wanted) {
      const auto it = records_.find(id);
      if (it != records_.end() && it->second.owner != caller) {
        throw RpcError(Status::PermissionDenied, "future " + id.to_string() + " belongs to another caller");
      }
    }
  }

  auto inbox = std::make_shared<Inbox>();
  const std::uint64_t token = store_->subscribe(caller, [inbox, wanted](const FutureResult& r) {
    if (wanted.empty() || wanted.count(r.id) != 0) inbox->push(r);
  });
  struct Unsubscribe {
    FutureStore& store;
    std::uint64_t token;
    ~Unsubscribe() { store.unsubscribe(token); }
  } unsubscribe{*store_, token};
  cancel.on_cancel([inbox] { inbox->halt(); });

  for (const Uuid& id : wanted) {
    const auto st = state(id);
    if (!st) {
      inbox->push(missing(id, "no future " + id.to_string()));
    } else if (*st != FutureState::Pending) {
      std::optional<FutureResult> loaded;
      try {
        loaded = store_->load_result(id);
      } catch (const std::exception& e) {
        throw RpcError(Status::Internal, std::string("future storage failed: ") + e.what());
      }
      inbox->push(loaded ? std::move(*loaded) : missing(id, "result of " + id.to_string() + " was not retained"));
    }
  }

  std::set<Uuid> delivered;
  for (;;) {
    FutureResult next;
    {
      std::unique_lock lock(inbox->mutex);
      inbox->ready.wait(lock, [&] { return !inbox->queue.empty() || inbox->stop; });
      if (inbox->queue.empty()) return;
      next = std::move(inbox->queue.front());
      inbox->queue.pop_front();
    }
    if (!delivered.insert(next.id).second) continue;
    out.write(encode(next));
    if (!wanted.empty() && delivered.size() == wanted.size()) return;
  }
}

}  // namespace bebop::rpc
