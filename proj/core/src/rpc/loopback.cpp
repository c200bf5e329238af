#include <condition_variable>
#include <deque>
#include <mutex>

#include "bebop/rpc/transport.hpp"

namespace bebop::rpc {

ConnectionStats Connection::stats() const { return ConnectionStats{frames_.load(), bytes_.load(), framing_.load()}; }

void Connection::count_sent(const Frame& frame) {
  frames_ += 1;
  bytes_ += frame.wire_size();
  framing_ += framing_overhead(frame);
}

namespace detail {

struct LoopbackShared {
  struct Packet {
    Bytes bytes;
    std::int64_t stamp;
  };

  explicit LoopbackShared(LoopbackOptions o) : options(std::move(o)) {}

  LoopbackOptions options;
  std::mutex mutex;
  std::condition_variable ready;
  // Index 0 carries client->server traffic, index 1 server->client.
  std::deque<Packet> queues[2];
  std::size_t server_frames = 0;
  bool closed = false;

  void close_all() {
    {
      std::lock_guard lock(mutex);
      closed = true;
    }
    ready.notify_all();
  }
};

}  // namespace detail

LoopbackConnection::LoopbackConnection(std::shared_ptr<detail::LoopbackShared> shared, bool client_end)
    : shared_(std::move(shared)), client_end_(client_end) {}

LoopbackConnection::~LoopbackConnection() { shared_->close_all(); }

void LoopbackConnection::send(const Frame& frame) {
  Bytes bytes = encode_frame(frame);
  {
    std::lock_guard lock(shared_->mutex);
    if (shared_->closed) throw Error(ErrorCode::Closed, "loopback connection is closed");
    shared_->queues[client_end_ ? 0 : 1].push_back({std::move(bytes), now_.load()});
    count_sent(frame);
    const std::size_t limit = shared_->options.disconnect_after_server_frames;
    if (!client_end_ && limit != 0 && ++shared_->server_frames >= limit) shared_->closed = true;
  }
  shared_->ready.notify_all();
}

std::optional<Frame> LoopbackConnection::receive() {
  detail::LoopbackShared::Packet packet;
  {
    std::unique_lock lock(shared_->mutex);
    auto& queue = shared_->queues[client_end_ ? 1 : 0];
    shared_->ready.wait(lock, [&] { return !queue.empty() || shared_->closed; });
    if (queue.empty()) return std::nullopt;
    packet = std::move(queue.front());
    queue.pop_front();
  }
  const std::int64_t arrival = packet.stamp + shared_->options.latency.count();
  std::int64_t seen = now_.load();
  while (seen < arrival && !now_.compare_exchange_weak(seen, arrival)) {
  }
  try {
    ByteReader in(packet.bytes);
    FrameView view = decode_frame(in);
    Frame f;
    f.header = view.header;
    f.payload.assign(view.payload.begin(), view.payload.end());
    f.cursor = view.cursor;
    return f;
  } catch (const Error&) {
    close();
    return std::nullopt;
  }
}

void LoopbackConnection::close() { shared_->close_all(); }

bool LoopbackConnection::is_closed() const {
  std::lock_guard lock(shared_->mutex);
  return shared_->closed;
}

std::string LoopbackConnection::peer_identity() const {
  return client_end_ ? shared_->options.server_identity : shared_->options.client_identity;
}

void LoopbackConnection::inject_disconnect() { shared_->close_all(); }

std::pair<std::shared_ptr<LoopbackConnection>, std::shared_ptr<LoopbackConnection>> loopback_pair(
    LoopbackOptions options) {
  auto shared = std::make_shared<detail::LoopbackShared>(std::move(options));
  return {std::make_shared<LoopbackConnection>(shared, true), std::make_shared<LoopbackConnection>(shared, false)};
}

}  // namespace bebop::rpc
