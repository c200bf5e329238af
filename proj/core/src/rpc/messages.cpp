#include "bebop/rpc/messages.hpp"

#include "bebop/dynvalue.hpp"
#include "bebop/meta_schema.hpp"
#include "../message_fields.hpp"

namespace bebop::rpc {

namespace {

using fields::In;
using fields::Out;

const TypeDescriptor& type_of(std::string_view name) {
  // The registry never changes, so the descriptors can be cached by name.
  static const auto table = [] {
    std::map<std::string, TypeDescriptor, std::less<>> t;
    for (const char* n : {"CallHeader", "ErrorPayload", "BatchCall", "BatchRequest", "BatchResult", "BatchResponse",
                          "UnaryCall", "FutureDispatchRequest", "FutureHandle", "FutureResolveRequest", "FutureResult",
                          "FutureCancelRequest", "Empty"}) {
      t.emplace(n, meta::type(n));
    }
    return t;
  }();
  return table.find(name)->second;
}

Bytes encode_as(std::string_view name, const Value& v) { return encode_value(type_of(name), v, meta::registry()); }

Value decode_as(std::string_view name, ByteView bytes) {
  return decode_value(bytes, type_of(name), meta::registry());
}

Value to_value(const UnaryCall& c) {
  Out o;
  o.num<std::uint32_t>(1, c.method_id);
  o.bytes(2, c.payload);
  o.bytes_map(3, c.metadata);
  return o.done();
}

UnaryCall unary_call_from(const Value& v) {
  In in(v);
  return UnaryCall{in.num<std::uint32_t>(1), in.bytes(2), in.bytes_map(3)};
}

Value to_value(const BatchRequest& m) {
  Out o;
  std::vector<Value> calls;
  for (const auto& c : m.calls) {
    Out call;
    call.num<std::int32_t>(1, c.call_id);
    call.num<std::uint32_t>(2, c.method_id);
    call.bytes(3, c.payload);
    call.always<std::int32_t>(4, c.input_from);
    calls.push_back(call.done());
  }
  o.list(1, std::move(calls));
  o.opt(2, m.deadline);
  o.bytes_map(3, m.metadata);
  return o.done();
}

BatchRequest batch_request_from(const Value& v) {
  In in(v);
  BatchRequest m;
  for (const auto& item : in.list(1)) {
    In c(item);
    m.calls.push_back(BatchCall{c.num<std::int32_t>(1), c.num<std::uint32_t>(2), c.bytes(3),
                                c.opt<std::int32_t>(4).value_or(-1)});
  }
  m.deadline = in.opt<Timestamp>(2);
  m.metadata = in.bytes_map(3);
  return m;
}

}  // namespace

Bytes encode(const CallHeader& m) {
  Out o;
  o.num<std::uint32_t>(1, m.method_id);
  o.opt(2, m.deadline);
  o.bytes_map(3, m.metadata);
  o.num<std::uint64_t>(4, m.cursor);
  return encode_as("CallHeader", o.done());
}

CallHeader decode_call_header(ByteReader& in) {
  const Value v = decode_value(in, type_of("CallHeader"), meta::registry());
  In f(v);
  return CallHeader{f.num<std::uint32_t>(1), f.opt<Timestamp>(2), f.bytes_map(3), f.num<std::uint64_t>(4)};
}

Bytes encode(const ErrorPayload& m) {
  Out o;
  o.always<std::uint8_t>(1, static_cast<std::uint8_t>(m.code));
  o.str(2, m.message);
  o.bytes(3, m.details);
  return encode_as("ErrorPayload", o.done());
}

ErrorPayload decode_error_payload(ByteView bytes) {
  const Value v = decode_as("ErrorPayload", bytes);
  In f(v);
  return ErrorPayload{static_cast<Status>(f.num<std::uint8_t>(1)), f.str(2), f.bytes(3)};
}

Bytes encode(const BatchRequest& m) { return encode_as("BatchRequest", to_value(m)); }

BatchRequest decode_batch_request(ByteView bytes) { return batch_request_from(decode_as("BatchRequest", bytes)); }

Bytes encode(const BatchResponse& m) {
  std::vector<Value> results;
  for (const auto& r : m.results) {
    Out o;
    o.num<std::int32_t>(1, r.call_id);
    o.always<std::uint8_t>(2, static_cast<std::uint8_t>(r.status));
    o.bytes(3, r.payload);
    if (!r.stream_payloads.empty()) {
      std::vector<Value> items;
      for (const auto& p : r.stream_payloads) items.emplace_back(p);
      o.value(4, make_array(std::move(items)));
    }
    o.str(5, r.error_message);
    results.push_back(o.done());
  }
  Out o;
  o.list(1, std::move(results));
  return encode_as("BatchResponse", o.done());
}

BatchResponse decode_batch_response(ByteView bytes) {
  const Value v = decode_as("BatchResponse", bytes);
  BatchResponse m;
  for (const auto& item : In(v).list(1)) {
    In f(item);
    BatchResult r{f.num<std::int32_t>(1), static_cast<Status>(f.num<std::uint8_t>(2)), f.bytes(3), {}, f.str(5)};
    for (const auto& p : f.list(4)) r.stream_payloads.push_back(p.as<Bytes>());
    m.results.push_back(std::move(r));
  }
  return m;
}

Bytes encode(const FutureDispatchRequest& m) {
  Out o;
  if (m.call) o.value(1, to_value(*m.call));
  if (m.batch) o.value(2, to_value(*m.batch));
  o.opt(3, m.deadline);
  o.opt(4, m.idempotency_key);
  o.flag(5, m.discard_result);
  return encode_as("FutureDispatchRequest", o.done());
}

FutureDispatchRequest decode_future_dispatch_request(ByteView bytes) {
  const Value v = decode_as("FutureDispatchRequest", bytes);
  In f(v);
  FutureDispatchRequest m;
  if (const Value* c = f.get(1)) m.call = unary_call_from(*c);
  if (const Value* b = f.get(2)) m.batch = batch_request_from(*b);
  m.deadline = f.opt<Timestamp>(3);
  m.idempotency_key = f.opt<Uuid>(4);
  m.discard_result = f.flag(5);
  return m;
}

Bytes encode(const FutureHandle& m) {
  Out o;
  o.always(1, m.id);
  return encode_as("FutureHandle", o.done());
}

FutureHandle decode_future_handle(ByteView bytes) {
  const Value v = decode_as("FutureHandle", bytes);
  return FutureHandle{In(v).opt<Uuid>(1).value_or(Uuid{})};
}

Bytes encode(const FutureResolveRequest& m) {
  Out o;
  std::vector<Value> ids;
  for (const auto& id : m.ids) ids.emplace_back(Primitive(id));
  o.list(1, std::move(ids));
  return encode_as("FutureResolveRequest", o.done());
}

FutureResolveRequest decode_future_resolve_request(ByteView bytes) {
  const Value v = decode_as("FutureResolveRequest", bytes);
  FutureResolveRequest m;
  for (const auto& id : In(v).list(1)) m.ids.push_back(std::get<Uuid>(id.as<Primitive>()));
  return m;
}

Bytes encode(const FutureResult& m) {
  Out o;
  o.always(1, m.id);
  o.always<std::uint8_t>(2, static_cast<std::uint8_t>(m.status));
  o.bytes(3, m.payload);
  o.bytes_map(4, m.metadata);
  o.str(5, m.error_message);
  return encode_as("FutureResult", o.done());
}

FutureResult decode_future_result(ByteView bytes) {
  const Value v = decode_as("FutureResult", bytes);
  In f(v);
  return FutureResult{f.opt<Uuid>(1).value_or(Uuid{}), static_cast<Status>(f.num<std::uint8_t>(2)), f.bytes(3),
                      f.bytes_map(4), f.str(5)};
}

Bytes encode(const FutureCancelRequest& m) {
  Out o;
  o.always(1, m.id);
  return encode_as("FutureCancelRequest", o.done());
}

FutureCancelRequest decode_future_cancel_request(ByteView bytes) {
  const Value v = decode_as("FutureCancelRequest", bytes);
  return FutureCancelRequest{In(v).opt<Uuid>(1).value_or(Uuid{})};
}

Bytes encode_empty() { return encode_as("Empty", make_message({})); }

Bytes encode_payload_list(const std::vector<Bytes>& payloads) {
  ByteWriter out;
  out.write_le<std::uint32_t>(static_cast<std::uint32_t>(payloads.size()));
  for (const auto& p : payloads) out.write_byte_array(p);
  return out.take();
}

std::vector<Bytes> decode_payload_list(ByteView bytes) {
  ByteReader in(bytes);
  const std::uint32_t n = in.read_le<std::uint32_t>();
  std::vector<Bytes> out;
  out.reserve(std::min<std::size_t>(n, in.remaining() / 4));
  for (std::uint32_t i = 0; i < n; ++i) {
    const ByteView p = in.read_byte_array();
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

}  // namespace bebop::rpc
