#pragma once

// Small service used by the RPC tests and the acceptance suite.

#include <atomic>
#include <chrono>
#include <thread>

#include "bebop/routing.hpp"
#include "bebop/rpc/server.hpp"
#include "bebop/wire.hpp"

namespace demo {

using namespace bebop;
using namespace bebop::rpc;

inline Bytes u32(std::uint32_t v) {
  ByteWriter w;
  w.write_le<std::uint32_t>(v);
  return w.take();
}

inline std::uint32_t as_u32(ByteView b) {
  ByteReader in(b);
  return in.read_le<std::uint32_t>();
}

inline constexpr std::string_view kEcho = "/Demo/Echo";
inline constexpr std::string_view kIncrement = "/Demo/Increment";
inline constexpr std::string_view kFail = "/Demo/Fail";
inline constexpr std::string_view kSlow = "/Demo/Slow";
inline constexpr std::string_view kCount = "/Demo/Count";
inline constexpr std::string_view kSum = "/Demo/Sum";
inline constexpr std::string_view kChat = "/Demo/Chat";

inline std::uint32_t id(std::string_view path) { return routing_id_for_path(path); }

struct Counters {
  std::atomic<int> echo{0};
  std::atomic<int> increment{0};
  std::atomic<int> slow{0};
};

/// Echo returns its request. Increment adds one to a u32. Fail throws
/// PERMISSION_DENIED. Slow sleeps `as_u32(request)` ms unless cancelled,
/// then echoes. Count streams u32 values i in [cursor, n) with cursor i + 1.
/// Sum adds streamed u32 values. Chat echoes each message back.
inline void install(Server& server, Counters& counters) {
  server.add_unary(kEcho, [&counters](CallContext& ctx, ByteView req) {
    ++counters.echo;
    if (const auto it = ctx.metadata.find("tag"); it != ctx.metadata.end()) ctx.response_metadata["tag"] = it->second;
    return Bytes(req.begin(), req.end());
  });
  server.add_unary(kIncrement, [&counters](CallContext&, ByteView req) {
    ++counters.increment;
    return u32(as_u32(req) + 1);
  });
  server.add_unary(kFail, [](CallContext&, ByteView) -> Bytes {
    throw RpcError(Status::PermissionDenied, "nope", Bytes{0xee});
  });
  server.add_unary(kSlow, [&counters](CallContext& ctx, ByteView req) {
    ++counters.slow;
    const auto until = std::chrono::steady_clock::now() + std::chrono::milliseconds(as_u32(req));
    while (std::chrono::steady_clock::now() < until) {
      if (ctx.cancelled()) throw RpcError(Status::Cancelled, "cancelled");
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    return Bytes(req.begin(), req.end());
  });
  server.add_server_stream(kCount, [](CallContext& ctx, ByteView req, StreamWriter& out) {
    const std::uint32_t n = as_u32(req);
    for (std::uint64_t i = ctx.cursor; i < n; ++i) out.write(u32(static_cast<std::uint32_t>(i)), i + 1);
  });
  server.add_client_stream(kSum, [](CallContext&, StreamReader& in) {
    std::uint32_t total = 0;
    while (auto m = in.read()) total += as_u32(*m);
    return u32(total);
  });
  server.add_duplex(kChat, [](CallContext&, StreamReader& in, StreamWriter& out) {
    while (auto m = in.read()) out.write(std::move(*m));
  });
}

}  // namespace demo
