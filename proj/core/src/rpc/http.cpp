#include "bebop/rpc/http.hpp"

#include <httplib.h>

#include <charconv>

#include "bebop/routing.hpp"

namespace bebop::rpc {

namespace {

constexpr const char* kContentType = "application/x-bebop";

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

template <typename Headers>
Metadata metadata_from(const Headers& headers) {
  Metadata out;
  for (const auto& [name, value] : headers) {
    const std::string key = lower(name);
    if (key.rfind(kMetadataHeaderPrefix, 0) == 0) {
      out[key.substr(kMetadataHeaderPrefix.size())] = Bytes(value.begin(), value.end());
    }
  }
  return out;
}

template <typename Integer>
std::optional<Integer> parse_integer(std::string_view text) {
  Integer v{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) return std::nullopt;
  return v;
}

void fail(httplib::Response& res, Status status, int http_status, const std::string& message, const Bytes& details = {}) {
  res.status = http_status;
  res.set_header(std::string(kStatusHeader), std::to_string(static_cast<int>(status)));
  const Bytes body = encode(ErrorPayload{status, message, details});
  res.set_content(std::string(body.begin(), body.end()), kContentType);
}

}  // namespace

struct HttpGateway::Impl {
  httplib::Server http;
};

HttpGateway::HttpGateway(Server& server, const std::string& host, std::uint16_t port)
    : impl_(std::make_unique<Impl>()) {
  impl_->http.Post(R"(/[^/]+/[^/]+)", [&server](const httplib::Request& req, httplib::Response& res) {
    const std::uint32_t id = routing_id_for_path(req.path);
    const auto reg = server.find(id);
    if (!reg) return fail(res, Status::Unimplemented, 404, "no method at " + req.path);
    if (reg->kind != MethodKind::Unary) {
      return fail(res, Status::Unimplemented, 501, req.path + " is not unary; HTTP carries unary calls only");
    }
    CallContext ctx;
    ctx.method_id = id;
    ctx.metadata = metadata_from(req.headers);
    ctx.peer = server.caller_identity(req.remote_addr + ":" + std::to_string(req.remote_port), ctx.metadata);
    ctx.clock = [&server] { return server.now(); };
    if (req.has_header(std::string(kDeadlineHeader).c_str())) {
      const auto ms = parse_integer<std::int64_t>(req.get_header_value(std::string(kDeadlineHeader).c_str()));
      if (!ms) return fail(res, Status::InvalidArgument, 400, "bebop-deadline must be Unix milliseconds");
      ctx.deadline = Timestamp::from_unix_millis(*ms);
    }
    const Bytes body(req.body.begin(), req.body.end());
    const CallOutcome out = server.invoke(ctx, body);
    for (const auto& [k, v] : out.metadata) {
      res.set_header(std::string(kMetadataHeaderPrefix) + k, std::string(v.begin(), v.end()));
    }
    if (!out.ok()) return fail(res, out.status, http_status_for(out.status), out.error_message, out.error_details);
    res.status = 200;
    res.set_header(std::string(kStatusHeader), "0");
    res.set_content(std::string(out.payload.begin(), out.payload.end()), kContentType);
  });
  impl_->http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404) fail(res, Status::Unimplemented, 404, "no method at " + req.path);
  });

  if (port == 0) {
    const int bound = impl_->http.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::Refused, "cannot listen on " + host);
    port_ = static_cast<std::uint16_t>(bound);
  } else {
    if (!impl_->http.bind_to_port(host, port)) {
      throw Error(ErrorCode::Refused, "cannot listen on " + host + ":" + std::to_string(port));
    }
    port_ = port;
  }
  thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

HttpGateway::~HttpGateway() { stop(); }

void HttpGateway::stop() {
  impl_->http.stop();
  if (thread_.joinable()) thread_.join();
}

HttpChannel::HttpChannel(std::string host, std::uint16_t port) : host_(std::move(host)), port_(port) {}

HttpChannel::~HttpChannel() = default;

HttpReply HttpChannel::post(std::string_view path, ByteView body, const CallOptions& options) {
  httplib::Client client(host_, port_);
  httplib::Headers headers;
  if (options.deadline) headers.emplace(std::string(kDeadlineHeader), std::to_string(options.deadline->to_unix_millis()));
  for (const auto& [k, v] : options.metadata) {
    headers.emplace(std::string(kMetadataHeaderPrefix) + k, std::string(v.begin(), v.end()));
  }
  const auto res = client.Post(std::string(path), headers, reinterpret_cast<const char*>(body.data()), body.size(),
                               kContentType);
  if (!res) {
    throw Error(ErrorCode::Refused,
                "HTTP request to " + host_ + ":" + std::to_string(port_) + " failed: " + httplib::to_string(res.error()));
  }
  HttpReply reply;
  reply.http_status = res->status;
  reply.body.assign(res->body.begin(), res->body.end());
  reply.metadata = metadata_from(res->headers);
  const auto code = parse_integer<int>(res->get_header_value(std::string(kStatusHeader).c_str()));
  reply.status = code ? static_cast<Status>(*code) : (res->status == 200 ? Status::Ok : Status::Unknown);
  return reply;
}

Bytes HttpChannel::unary(std::string_view path, ByteView request, const CallOptions& options) {
  HttpReply reply = post(path, request, options);
  if (reply.status == Status::Ok) return std::move(reply.body);
  ErrorPayload e{reply.status, "HTTP " + std::to_string(reply.http_status), {}};
  try {
    e = decode_error_payload(reply.body);
  } catch (const Error&) {
  }
  throw RpcError(reply.status, e.message, e.details);
}

}  // namespace bebop::rpc
