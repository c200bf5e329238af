#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "bebop/rpc/transport.hpp"

namespace bebop::rpc {

namespace {

std::string address_of(const sockaddr_storage& addr) {
  char host[INET6_ADDRSTRLEN] = {};
  std::uint16_t port = 0;
  if (addr.ss_family == AF_INET) {
    const auto* a = reinterpret_cast<const sockaddr_in*>(&addr);
    inet_ntop(AF_INET, &a->sin_addr, host, sizeof host);
    port = ntohs(a->sin_port);
    return std::string(host) + ":" + std::to_string(port);
  }
  const auto* a = reinterpret_cast<const sockaddr_in6*>(&addr);
  inet_ntop(AF_INET6, &a->sin6_addr, host, sizeof host);
  port = ntohs(a->sin6_port);
  return "[" + std::string(host) + "]:" + std::to_string(port);
}

void set_nodelay(int fd) {
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

TcpConnection::TcpConnection(int fd, std::string peer, std::size_t max_frame_length)
    : fd_(fd), peer_(std::move(peer)), max_frame_length_(max_frame_length) {
  set_nodelay(fd_);
}

TcpConnection::~TcpConnection() {
  close();
  ::close(fd_);
}

void TcpConnection::send(const Frame& frame) {
  const Bytes bytes = encode_frame(frame);
  std::lock_guard lock(write_mutex_);
  if (closed_) throw Error(ErrorCode::Closed, "connection to " + peer_ + " is closed");
  std::size_t done = 0;
  while (done < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      close();
      throw Error(ErrorCode::Closed, "send to " + peer_ + " failed: " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
  count_sent(frame);
}

bool TcpConnection::read_exact(std::uint8_t* out, std::size_t n) {
  std::size_t done = 0;
  while (done < n) {
    const ssize_t got = ::recv(fd_, out + done, n - done, 0);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) return false;
    done += static_cast<std::size_t>(got);
  }
  return true;
}

std::optional<Frame> TcpConnection::receive() {
  std::uint8_t head[kFrameHeaderSize];
  if (closed_ || !read_exact(head, sizeof head)) {
    close();
    return std::nullopt;
  }
  Frame f;
  f.header = decode_frame_header(head);
  if (f.header.has(flags::kCompressed) || f.header.length > max_frame_length_) {
    // Unframeable input: there is no way to find the next frame boundary.
    close();
    return std::nullopt;
  }
  f.payload.resize(f.header.length);
  if (!read_exact(f.payload.data(), f.payload.size())) {
    close();
    return std::nullopt;
  }
  if (f.header.has(flags::kCursor)) {
    std::uint8_t tail[kCursorSize];
    if (!read_exact(tail, sizeof tail)) {
      close();
      return std::nullopt;
    }
    f.cursor = bebop::detail::load_le<std::uint64_t>(tail);
  }
  return f;
}

void TcpConnection::close() {
  if (!closed_.exchange(true)) ::shutdown(fd_, SHUT_RDWR);
}

bool TcpConnection::is_closed() const { return closed_; }

std::shared_ptr<TcpConnection> tcp_connect(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (getaddrinfo(host.c_str(), service.c_str(), &hints, &found) != 0) {
    throw Error(ErrorCode::Refused, "cannot resolve " + host);
  }
  int fd = -1;
  std::string peer;
  for (addrinfo* a = found; a; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      sockaddr_storage addr{};
      std::memcpy(&addr, a->ai_addr, a->ai_addrlen);
      peer = address_of(addr);
      break;
    }
    ::close(fd);
    fd = -1;
  }
  freeaddrinfo(found);
  if (fd < 0) throw Error(ErrorCode::Refused, "connection to " + host + ":" + service + " refused");
  return std::make_shared<TcpConnection>(fd, peer);
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) : fd_(-1) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw Error(ErrorCode::Refused, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw Error(ErrorCode::Refused, "listen address must be IPv4: " + host);
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 64) != 0) {
    const std::string why = std::strerror(errno);
    ::close(fd);
    throw Error(ErrorCode::Refused, "cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  fd_ = fd;
}

TcpListener::~TcpListener() { close(); }

std::shared_ptr<TcpConnection> TcpListener::accept() {
  for (;;) {
    const int listen_fd = fd_.load();
    if (listen_fd < 0) return nullptr;
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    const int fd = ::accept(listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
    if (fd >= 0) return std::make_shared<TcpConnection>(fd, address_of(addr));
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return nullptr;
  }
}

void TcpListener::close() {
  const int fd = fd_.exchange(-1);
  if (fd >= 0) {
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
  }
}

}  // namespace bebop::rpc
