#pragma once

// Unary calls over HTTP/1.1: POST /Service/Method with the request as body.
// `bebop-deadline` holds the deadline in Unix milliseconds, `bebop-meta-<key>`
// headers carry metadata, and `bebop-status` the status code.

#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "bebop/rpc/client.hpp"
#include "bebop/rpc/server.hpp"

namespace bebop::rpc {

inline constexpr std::string_view kDeadlineHeader = "bebop-deadline";
inline constexpr std::string_view kStatusHeader = "bebop-status";
inline constexpr std::string_view kMetadataHeaderPrefix = "bebop-meta-";

/// Serves a Server's unary methods over HTTP on a background thread.
class HttpGateway {
 public:
  HttpGateway(Server& server, const std::string& host = "127.0.0.1", std::uint16_t port = 0);
  ~HttpGateway();
  HttpGateway(const HttpGateway&) = delete;
  HttpGateway& operator=(const HttpGateway&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint16_t port_ = 0;
  std::thread thread_;
};

struct HttpReply {
  int http_status = 0;
  Status status = Status::Ok;
  Bytes body;
  Metadata metadata;
};

class HttpChannel final : public UnaryChannel {
 public:
  HttpChannel(std::string host, std::uint16_t port);
  ~HttpChannel() override;

  /// The raw exchange. Throws Error(Refused) when no response arrives.
  HttpReply post(std::string_view path, ByteView body, const CallOptions& options = {});
  Bytes unary(std::string_view path, ByteView request, const CallOptions& options = {}) override;

 private:
  std::string host_;
  std::uint16_t port_;
};

}  // namespace bebop::rpc
