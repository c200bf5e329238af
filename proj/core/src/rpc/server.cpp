#include "bebop/rpc/server.hpp"

#include <condition_variable>
#include <deque>
#include <thread>

#include "bebop/dynvalue.hpp"
#include "bebop/routing.hpp"

namespace bebop::rpc {

std::string_view method_kind_name(MethodKind kind) noexcept {
  switch (kind) {
    case MethodKind::Unary: return "unary";
    case MethodKind::ServerStream: return "server-stream";
    case MethodKind::ClientStream: return "client-stream";
    case MethodKind::Duplex: return "duplex";
  }
  return "unknown";
}

RpcError::RpcError(Status status, std::string message, Bytes details)
    : std::runtime_error(std::string(status_name(status)) + ": " + message),
      status_(status),
      message_(std::move(message)),
      details_(std::move(details)) {}

void CancelSignal::cancel() {
  std::vector<std::function<void()>> run;
  {
    std::lock_guard lock(mutex_);
    if (cancelled_) return;
    cancelled_ = true;
    run.swap(callbacks_);
  }
  for (auto& fn : run) fn();
}

bool CancelSignal::cancelled() const {
  std::lock_guard lock(mutex_);
  return cancelled_;
}

void CancelSignal::on_cancel(std::function<void()> fn) {
  {
    std::lock_guard lock(mutex_);
    if (!cancelled_) {
      callbacks_.push_back(std::move(fn));
      return;
    }
  }
  fn();
}

namespace {

CallOutcome outcome_of_exception() {
  try {
    throw;
  } catch (const RpcError& e) {
    CallOutcome o = CallOutcome::failure(e.status(), e.message());
    o.error_details = e.details();
    return o;
  } catch (const Error& e) {
    return CallOutcome::failure(Status::InvalidArgument, e.what());
  } catch (const std::exception& e) {
    return CallOutcome::failure(Status::Internal, e.what());
  } catch (...) {
    return CallOutcome::failure(Status::Unknown, "handler threw a non-standard exception");
  }
}

class BufferWriter final : public StreamWriter {
 public:
  explicit BufferWriter(std::vector<Bytes>& out) : out_(out) {}
  void write(Bytes payload, std::optional<std::uint64_t>) override { out_.push_back(std::move(payload)); }

 private:
  std::vector<Bytes>& out_;
};

template <typename T>
T decode_or_reject(T (*decode)(ByteView), ByteView bytes, const char* what) {
  try {
    return decode(bytes);
  } catch (const Error& e) {
    throw RpcError(Status::InvalidArgument, std::string("malformed ") + what + ": " + e.what());
  }
}

Frame error_frame(std::uint32_t stream_id, const CallOutcome& o) {
  return Frame::make(stream_id, flags::kEndStream | flags::kError,
                     encode(ErrorPayload{o.status, o.error_message, o.error_details}));
}

}  // namespace

Server::Server(ServerOptions options) : options_(std::move(options)) {
  auto store = options_.future_store ? options_.future_store
                                     : std::make_shared<InMemoryFutureStore>(options_.future_retention);
  auto work = [this](CallContext& ctx, const FutureDispatchRequest& request) -> CallOutcome {
    if (request.call) {
      ctx.method_id = request.call->method_id;
      return invoke(ctx, request.call->payload);
    }
    BatchRequest batch = *request.batch;
    if (!batch.deadline) batch.deadline = ctx.deadline;
    CallOutcome out;
    out.payload = encode(run_batch(batch, ctx));
    return out;
  };
  auto validate = [this](const FutureDispatchRequest& request) {
    if (request.call) {
      const auto kind = kind_of(request.call->method_id);
      if (!kind) {
        throw RpcError(Status::Unimplemented, "no method with id " + std::to_string(request.call->method_id));
      }
      if (*kind != MethodKind::Unary) throw RpcError(Status::InvalidArgument, "only unary methods run as futures");
      return;
    }
    for (const auto& c : request.batch->calls) {
      if (is_reserved_routing_id(c.method_id)) {
        throw RpcError(Status::InvalidArgument, "batches cannot contain built-in methods");
      }
    }
    try {
      plan_batch(request.batch->calls, [this](std::uint32_t id) { return kind_of(id); });
    } catch (const Error& e) {
      throw RpcError(Status::InvalidArgument, e.what());
    }
  };
  futures_ = std::make_unique<FutureManager>(std::move(store), std::move(work), std::move(validate));
}

Server::~Server() { futures_.reset(); }

void Server::add(MethodRegistration registration) {
  if (is_reserved_routing_id(registration.routing_id)) {
    throw Error(ErrorCode::ReservedCollision, "routing id " + std::to_string(registration.routing_id) + " of " +
                                                  registration.path + " is reserved");
  }
  std::unique_lock lock(mutex_);
  const auto it = methods_.find(registration.routing_id);
  if (it != methods_.end()) {
    throw Error(ErrorCode::ReservedCollision, registration.path + " and " + it->second->path +
                                                  " share routing id " + std::to_string(registration.routing_id));
  }
  const std::uint32_t id = registration.routing_id;
  methods_.emplace(id, std::make_shared<const MethodRegistration>(std::move(registration)));
}

namespace {

MethodRegistration registration_for(std::string_view path, MethodKind kind) {
  if (!split_method_path(path)) {
    throw Error(ErrorCode::InvalidArgument, "method path must look like /Service/Method: " + std::string(path));
  }
  MethodRegistration r;
  r.routing_id = routing_id_for_path(path);
  r.path = std::string(path);
  r.kind = kind;
  return r;
}

}  // namespace

void Server::add_unary(std::string_view path, UnaryHandler handler, std::optional<MethodTypes> types) {
  auto r = registration_for(path, MethodKind::Unary);
  r.unary = std::move(handler);
  r.types = std::move(types);
  add(std::move(r));
}

void Server::add_server_stream(std::string_view path, ServerStreamHandler handler, std::optional<MethodTypes> types) {
  auto r = registration_for(path, MethodKind::ServerStream);
  r.server_stream = std::move(handler);
  r.types = std::move(types);
  add(std::move(r));
}

void Server::add_client_stream(std::string_view path, ClientStreamHandler handler) {
  auto r = registration_for(path, MethodKind::ClientStream);
  r.client_stream = std::move(handler);
  add(std::move(r));
}

void Server::add_duplex(std::string_view path, DuplexHandler handler) {
  auto r = registration_for(path, MethodKind::Duplex);
  r.duplex = std::move(handler);
  add(std::move(r));
}

std::shared_ptr<const MethodRegistration> Server::find(std::uint32_t routing_id) const {
  std::shared_lock lock(mutex_);
  const auto it = methods_.find(routing_id);
  return it == methods_.end() ? nullptr : it->second;
}

std::optional<MethodKind> Server::kind_of(std::uint32_t routing_id) const {
  switch (routing_id) {
    case method_ids::kBatch:
    case method_ids::kDispatch:
    case method_ids::kCancel: return MethodKind::Unary;
    case method_ids::kResolve: return MethodKind::ServerStream;
    default: break;
  }
  if (const auto r = find(routing_id)) return r->kind;
  return std::nullopt;
}

std::string Server::caller_identity(const std::string& peer, const Metadata& metadata) const {
  return options_.identity ? options_.identity(peer, metadata) : peer;
}

void Server::validate_request(const MethodRegistration& reg, ByteView request) const {
  if (!reg.types || !reg.types->registry) return;
  try {
    ByteReader in(request);
    skip_value(in, reg.types->request, *reg.types->registry);
    decode_value(request, reg.types->request, *reg.types->registry);
  } catch (const Error& e) {
    throw RpcError(Status::InvalidArgument, "request does not decode: " + std::string(e.what()));
  }
}

CallOutcome Server::invoke_registered(const MethodRegistration& reg, CallContext& ctx, ByteView request) {
  try {
    validate_request(reg, request);
    CallOutcome out;
    if (reg.kind == MethodKind::Unary) {
      out.payload = reg.unary(ctx, request);
    } else if (reg.kind == MethodKind::ServerStream) {
      BufferWriter writer(out.stream);
      reg.server_stream(ctx, request, writer);
      out.streamed = true;
    } else {
      throw RpcError(Status::InvalidArgument,
                     reg.path + " is a " + std::string(method_kind_name(reg.kind)) + " method");
    }
    out.metadata = std::move(ctx.response_metadata);
    return out;
  } catch (...) {
    return outcome_of_exception();
  }
}

CallOutcome Server::invoke(CallContext& ctx, ByteView request) {
  try {
    if (ctx.expired()) return CallOutcome::failure(Status::DeadlineExceeded, "deadline passed before the call started");
    switch (ctx.method_id) {
      case method_ids::kBatch: {
        const auto batch = decode_or_reject(&decode_batch_request, request, "BatchRequest");
        CallOutcome out;
        out.payload = encode(run_batch(batch, ctx));
        return out;
      }
      case method_ids::kDispatch: {
        const auto req = decode_or_reject(&decode_future_dispatch_request, request, "FutureDispatchRequest");
        CallOutcome out;
        out.payload = encode(futures_->dispatch(req, ctx.peer, options_.clock));
        return out;
      }
      case method_ids::kCancel: {
        const auto req = decode_or_reject(&decode_future_cancel_request, request, "FutureCancelRequest");
        futures_->cancel(req.id, ctx.peer);
        CallOutcome out;
        out.payload = encode_empty();
        return out;
      }
      case method_ids::kResolve: throw RpcError(Status::Unimplemented, "resolve needs a streaming transport");
      default: break;
    }
    const auto reg = find(ctx.method_id);
    if (!reg) throw RpcError(Status::Unimplemented, "no method with id " + std::to_string(ctx.method_id));
    return invoke_registered(*reg, ctx, request);
  } catch (...) {
    return outcome_of_exception();
  }
}

BatchResponse Server::run_batch(const BatchRequest& request, const CallContext& parent) {
  for (const auto& c : request.calls) {
    if (is_reserved_routing_id(c.method_id)) {
      throw RpcError(Status::InvalidArgument, "batches cannot contain built-in methods");
    }
  }
  BatchPlan plan;
  try {
    plan = plan_batch(request.calls, [this](std::uint32_t id) { return kind_of(id); });
  } catch (const Error& e) {
    throw RpcError(Status::InvalidArgument, e.what());
  }
  BatchOptions options;
  options.deadline = request.deadline;
  if (parent.deadline && (!options.deadline || parent.deadline->to_unix_nanos() < options.deadline->to_unix_nanos())) {
    options.deadline = parent.deadline;
  }
  options.clock = options_.clock;
  const Metadata& metadata = request.metadata.empty() ? parent.metadata : request.metadata;
  return execute_batch(
      plan, request.calls,
      [&](const BatchCall& call, ByteView payload) {
        CallContext ctx;
        ctx.method_id = call.method_id;
        ctx.deadline = options.deadline;
        ctx.metadata = metadata;
        ctx.peer = parent.peer;
        ctx.cancel = parent.cancel;
        ctx.clock = options_.clock;
        return invoke(ctx, payload);
      },
      options);
}

// One served connection: the reading loop plus a thread per call.
class Session {
 public:
  Session(Server& server, std::shared_ptr<Connection> conn) : server_(server), conn_(std::move(conn)) {}

  void run();

 private:
  struct Inbound final : StreamReader {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<Bytes> queue;
    bool ended = false;
    bool broken = false;

    std::optional<Bytes> read() override {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return !queue.empty() || ended || broken; });
      if (!queue.empty()) {
        Bytes b = std::move(queue.front());
        queue.pop_front();
        return b;
      }
      if (broken) throw Error(ErrorCode::Closed, "call was cancelled");
      return std::nullopt;
    }
    void push(Bytes b) {
      {
        std::lock_guard lock(mutex);
        queue.push_back(std::move(b));
      }
      ready.notify_all();
    }
    void finish(bool failed) {
      {
        std::lock_guard lock(mutex);
        (failed ? broken : ended) = true;
      }
      ready.notify_all();
    }
  };

  struct Call {
    std::shared_ptr<CancelSignal> cancel = std::make_shared<CancelSignal>();
    std::shared_ptr<Inbound> inbound;
    bool client_done = false;
    bool server_done = false;
  };

  class FrameWriter final : public StreamWriter {
   public:
    FrameWriter(Connection& conn, std::uint32_t stream_id, const CancelSignal& cancel)
        : conn_(conn), stream_id_(stream_id), cancel_(cancel) {}
    void write(Bytes payload, std::optional<std::uint64_t> cursor) override {
      if (cancel_.cancelled()) throw Error(ErrorCode::Closed, "call was cancelled");
      conn_.send(Frame::make(stream_id_, 0, std::move(payload), cursor));
    }

   private:
    Connection& conn_;
    std::uint32_t stream_id_;
    const CancelSignal& cancel_;
  };

  void on_frame(Frame frame);
  void start_call(Frame frame);
  void execute(std::uint32_t stream_id, std::shared_ptr<Call> call, CallContext ctx, Bytes request);
  void send_quietly(const Frame& f) {
    try {
      conn_->send(f);
    } catch (const Error&) {
    }
  }
  void mark_done(std::uint32_t stream_id, bool client_side);
  void reap();

  Server& server_;
  std::shared_ptr<Connection> conn_;
  std::mutex mutex_;
  std::map<std::uint32_t, std::shared_ptr<Call>> calls_;
  std::vector<std::pair<std::thread, std::shared_ptr<std::atomic<bool>>>> threads_;
};

void Session::mark_done(std::uint32_t stream_id, bool client_side) {
  std::lock_guard lock(mutex_);
  const auto it = calls_.find(stream_id);
  if (it == calls_.end()) return;
  (client_side ? it->second->client_done : it->second->server_done) = true;
  if (it->second->client_done && it->second->server_done) calls_.erase(it);
}

void Session::reap() {
  std::lock_guard lock(mutex_);
  for (auto it = threads_.begin(); it != threads_.end();) {
    if (it->second->load()) {
      it->first.join();
      it = threads_.erase(it);
    } else {
      ++it;
    }
  }
}

void Session::run() {
  while (auto frame = conn_->receive()) on_frame(std::move(*frame));
  conn_->close();
  std::vector<std::pair<std::thread, std::shared_ptr<std::atomic<bool>>>> threads;
  {
    std::lock_guard lock(mutex_);
    for (auto& [id, call] : calls_) {
      call->cancel->cancel();
      if (call->inbound) call->inbound->finish(true);
    }
    threads.swap(threads_);
  }
  for (auto& [t, done] : threads) t.join();
}

void Session::on_frame(Frame frame) {
  std::shared_ptr<Call> call;
  {
    std::lock_guard lock(mutex_);
    const auto it = calls_.find(frame.header.stream_id);
    if (it != calls_.end()) call = it->second;
  }
  if (!call) {
    // A cancel racing the end of its call lands here; it has nothing to stop.
    if (frame.header.has(flags::kError)) return;
    start_call(std::move(frame));
    return;
  }
  if (call->client_done) return;
  if (frame.header.has(flags::kError)) {
    call->cancel->cancel();
    if (call->inbound) call->inbound->finish(true);
    mark_done(frame.header.stream_id, true);
    return;
  }
  const bool end = frame.header.has(flags::kEndStream);
  if (call->inbound && (!end || !frame.payload.empty())) call->inbound->push(std::move(frame.payload));
  if (end) {
    if (call->inbound) call->inbound->finish(false);
    mark_done(frame.header.stream_id, true);
  }
}

void Session::start_call(Frame frame) {
  const std::uint32_t sid = frame.header.stream_id;
  CallHeader header;
  Bytes rest;
  try {
    ByteReader in(frame.payload);
    header = decode_call_header(in);
    const ByteView tail = frame.payload.empty() ? ByteView{} : ByteView(frame.payload).subspan(in.position());
    rest.assign(tail.begin(), tail.end());
  } catch (const Error&) {
    // Without a call header there is no way to interpret the stream.
    conn_->close();
    return;
  }
  reap();

  auto call = std::make_shared<Call>();
  call->client_done = frame.header.has(flags::kEndStream);
  {
    std::lock_guard lock(mutex_);
    calls_[sid] = call;
  }

  CallContext ctx;
  ctx.method_id = header.method_id;
  ctx.deadline = header.deadline;
  ctx.metadata = std::move(header.metadata);
  ctx.cursor = header.cursor;
  ctx.peer = server_.caller_identity(conn_->peer_identity(), ctx.metadata);
  ctx.cancel = call->cancel;
  ctx.clock = [&s = server_] { return s.now(); };

  const auto reject = [&](Status s, std::string message) {
    send_quietly(error_frame(sid, CallOutcome::failure(s, std::move(message))));
    mark_done(sid, false);
  };
  const auto kind = server_.kind_of(header.method_id);
  if (!kind) return reject(Status::Unimplemented, "no method with id " + std::to_string(header.method_id));
  if (ctx.expired()) return reject(Status::DeadlineExceeded, "deadline passed before the call arrived");
  const bool streaming_input = *kind == MethodKind::ClientStream || *kind == MethodKind::Duplex;
  if (!streaming_input && !call->client_done) {
    return reject(Status::InvalidArgument, "a " + std::string(method_kind_name(*kind)) +
                                               " request travels in a single END_STREAM frame");
  }
  if (streaming_input) {
    call->inbound = std::make_shared<Inbound>();
    if (!rest.empty()) call->inbound->push(std::move(rest));
    if (call->client_done) call->inbound->finish(false);
  }

  auto done = std::make_shared<std::atomic<bool>>(false);
  std::lock_guard lock(mutex_);
  threads_.emplace_back(
      [this, sid, call, ctx = std::move(ctx), rest = std::move(rest), done]() mutable {
        execute(sid, call, std::move(ctx), std::move(rest));
        mark_done(sid, false);
        done->store(true);
      },
      done);
}

void Session::execute(std::uint32_t sid, std::shared_ptr<Call> call, CallContext ctx, Bytes request) {
  FrameWriter writer(*conn_, sid, *call->cancel);
  const std::uint32_t id = ctx.method_id;
  try {
    if (id == method_ids::kResolve) {
      const auto req = decode_or_reject(&decode_future_resolve_request, request, "FutureResolveRequest");
      server_.futures().resolve(req, ctx.peer, writer, *ctx.cancel);
      send_quietly(Frame::make(sid, flags::kEndStream, {}));
      return;
    }
    const auto reg = is_reserved_routing_id(id) ? nullptr : server_.find(id);
    if (!reg || reg->kind == MethodKind::Unary) {
      const CallOutcome out = server_.invoke(ctx, request);
      send_quietly(out.ok() ? Frame::make(sid, flags::kEndStream, out.payload) : error_frame(sid, out));
      return;
    }
    switch (reg->kind) {
      case MethodKind::ServerStream:
        server_.validate_request(*reg, request);
        reg->server_stream(ctx, request, writer);
        send_quietly(Frame::make(sid, flags::kEndStream, {}));
        break;
      case MethodKind::ClientStream: {
        Bytes response = reg->client_stream(ctx, *call->inbound);
        send_quietly(Frame::make(sid, flags::kEndStream, std::move(response)));
        break;
      }
      case MethodKind::Duplex:
        reg->duplex(ctx, *call->inbound, writer);
        send_quietly(Frame::make(sid, flags::kEndStream, {}));
        break;
      case MethodKind::Unary: break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Closed) return;
    send_quietly(error_frame(sid, CallOutcome::failure(Status::InvalidArgument, e.what())));
  } catch (...) {
    send_quietly(error_frame(sid, outcome_of_exception()));
  }
}

void Server::serve(std::shared_ptr<Connection> connection) { Session(*this, std::move(connection)).run(); }

TcpServer::TcpServer(Server& server, const std::string& host, std::uint16_t port)
    : server_(server), listener_(host, port) {
  accept_thread_ = std::thread([this] {
    while (auto conn = listener_.accept()) {
      std::lock_guard lock(mutex_);
      if (stopped_) {
        conn->close();
        break;
      }
      connections_.push_back(conn);
      threads_.emplace_back([this, conn] { server_.serve(conn); });
    }
  });
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::stop() {
  {
    std::lock_guard lock(mutex_);
    if (stopped_) return;
    stopped_ = true;
  }
  listener_.close();
  accept_thread_.join();
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(mutex_);
    for (auto& c : connections_) c->close();
    threads.swap(threads_);
  }
  for (auto& t : threads) t.join();
}

}  // namespace bebop::rpc
