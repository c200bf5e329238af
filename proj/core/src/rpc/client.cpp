#include "bebop/rpc/client.hpp"

#include "bebop/routing.hpp"

namespace bebop::rpc {

namespace detail {

struct ClientStreamState {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<Frame> frames;
  bool closed = false;

  void push(Frame f) {
    {
      std::lock_guard lock(mutex);
      frames.push_back(std::move(f));
    }
    ready.notify_all();
  }
  void close() {
    {
      std::lock_guard lock(mutex);
      closed = true;
    }
    ready.notify_all();
  }
  /// nullopt when the connection closed before another frame arrived.
  std::optional<Frame> pop() {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return !frames.empty() || closed; });
    if (frames.empty()) return std::nullopt;
    Frame f = std::move(frames.front());
    frames.pop_front();
    return f;
  }
};

}  // namespace detail

namespace {

[[noreturn]] void throw_error_frame(const Frame& f) {
  ErrorPayload e;
  try {
    e = decode_error_payload(f.payload);
  } catch (const Error& err) {
    throw RpcError(Status::Internal, std::string("undecodable error payload: ") + err.what());
  }
  throw RpcError(e.code, e.message, e.details);
}

}  // namespace

ResponseStream::ResponseStream(std::shared_ptr<detail::ClientStreamState> state, std::shared_ptr<Connection> conn,
                               std::uint32_t stream_id)
    : state_(std::move(state)), conn_(std::move(conn)), stream_id_(stream_id) {}

ResponseStream::ResponseStream(ResponseStream&&) noexcept = default;
ResponseStream& ResponseStream::operator=(ResponseStream&&) noexcept = default;

ResponseStream::~ResponseStream() {
  if (state_ && !finished_) cancel();
}

std::optional<StreamItem> ResponseStream::next() {
  if (finished_) return std::nullopt;
  auto f = state_->pop();
  if (!f) {
    finished_ = true;
    throw Error(ErrorCode::Closed, "connection closed during the call");
  }
  if (f->header.has(flags::kError)) {
    finished_ = true;
    throw_error_frame(*f);
  }
  if (f->cursor) last_cursor_ = f->cursor;
  if (f->header.has(flags::kEndStream)) {
    finished_ = true;
    if (f->payload.empty()) return std::nullopt;
  }
  return StreamItem{std::move(f->payload), f->cursor};
}

void ResponseStream::cancel() {
  if (finished_) return;
  finished_ = true;
  try {
    conn_->send(Frame::make(stream_id_, flags::kEndStream | flags::kError,
                            encode(ErrorPayload{Status::Cancelled, "cancelled by client", {}})));
  } catch (const Error&) {
  }
}

void RequestStream::write(Bytes payload) {
  if (closed_) throw Error(ErrorCode::Closed, "request stream already closed");
  conn_->send(Frame::make(stream_id_, 0, std::move(payload)));
}

void RequestStream::close() {
  if (closed_) return;
  closed_ = true;
  conn_->send(Frame::make(stream_id_, flags::kEndStream, {}));
}

Client::Client(std::shared_ptr<Connection> connection) : conn_(std::move(connection)) {
  reader_ = std::thread([this] { read_loop(); });
}

Client::~Client() {
  close();
  reader_.join();
}

void Client::close() { conn_->close(); }

void Client::read_loop() {
  while (auto f = conn_->receive()) {
    std::shared_ptr<detail::ClientStreamState> state;
    const bool last = f->header.has(flags::kEndStream);
    {
      std::lock_guard lock(mutex_);
      const auto it = streams_.find(f->header.stream_id);
      if (it == streams_.end()) continue;
      state = it->second;
      if (last) streams_.erase(it);
    }
    state->push(std::move(*f));
  }
  std::lock_guard lock(mutex_);
  for (auto& [id, s] : streams_) s->close();
  streams_.clear();
}

std::pair<std::uint32_t, std::shared_ptr<detail::ClientStreamState>> Client::open(const CallHeader& header,
                                                                                  ByteView request, bool end) {
  const std::uint32_t sid = next_stream_.fetch_add(1);
  auto state = std::make_shared<detail::ClientStreamState>();
  {
    std::lock_guard lock(mutex_);
    if (conn_->is_closed()) throw Error(ErrorCode::Closed, "connection is closed");
    streams_[sid] = state;
  }
  Bytes payload = encode(header);
  payload.insert(payload.end(), request.begin(), request.end());
  try {
    conn_->send(Frame::make(sid, end ? flags::kEndStream : 0, std::move(payload)));
  } catch (...) {
    std::lock_guard lock(mutex_);
    streams_.erase(sid);
    throw;
  }
  return {sid, std::move(state)};
}

namespace {

CallHeader header_for(std::uint32_t method_id, const CallOptions& options) {
  return CallHeader{method_id, options.deadline, options.metadata, options.cursor};
}

}  // namespace

Bytes Client::unary(std::uint32_t method_id, ByteView request, const CallOptions& options) {
  auto [sid, state] = open(header_for(method_id, options), request, true);
  ResponseStream responses(std::move(state), conn_, sid);
  auto item = responses.next();
  if (!responses.finished()) {
    responses.cancel();
    throw RpcError(Status::Internal, "unary call received more than one response");
  }
  return item ? std::move(item->payload) : Bytes{};
}

Bytes Client::unary(std::string_view path, ByteView request, const CallOptions& options) {
  if (!split_method_path(path)) throw Error(ErrorCode::InvalidArgument, "not a /Service/Method path: " + std::string(path));
  return unary(routing_id_for_path(path), request, options);
}

ResponseStream Client::server_stream(std::uint32_t method_id, ByteView request, const CallOptions& options) {
  auto [sid, state] = open(header_for(method_id, options), request, true);
  return ResponseStream(std::move(state), conn_, sid);
}

StreamingCall Client::open_stream(std::uint32_t method_id, const CallOptions& options) {
  auto [sid, state] = open(header_for(method_id, options), {}, false);
  return StreamingCall{RequestStream(conn_, sid), ResponseStream(std::move(state), conn_, sid)};
}

Bytes Client::client_stream(std::uint32_t method_id, const std::vector<Bytes>& requests, const CallOptions& options) {
  StreamingCall call = open_stream(method_id, options);
  for (const auto& r : requests) call.requests.write(r);
  call.requests.close();
  auto item = call.responses.next();
  return item ? std::move(item->payload) : Bytes{};
}

BatchResponse Client::batch(const BatchRequest& request, const CallOptions& options) {
  return decode_batch_response(unary(method_ids::kBatch, encode(request), options));
}

FutureHandle Client::dispatch_future(const FutureDispatchRequest& request, const CallOptions& options) {
  return decode_future_handle(unary(method_ids::kDispatch, encode(request), options));
}

ResponseStream Client::resolve_futures(const FutureResolveRequest& request, const CallOptions& options) {
  return server_stream(method_ids::kResolve, encode(request), options);
}

void Client::cancel_future(const Uuid& id, const CallOptions& options) {
  unary(method_ids::kCancel, encode(FutureCancelRequest{id}), options);
}

}  // namespace bebop::rpc
