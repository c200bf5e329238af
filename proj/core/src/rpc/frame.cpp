#include "bebop/rpc/frame.hpp"

#include <limits>

namespace bebop::rpc {

Frame Frame::make(std::uint32_t stream_id, std::uint8_t flag_bits, Bytes payload, std::optional<std::uint64_t> cursor) {
  Frame f;
  f.header.length = static_cast<std::uint32_t>(payload.size());
  f.header.flags = cursor ? (flag_bits | flags::kCursor) : (flag_bits & ~flags::kCursor);
  f.header.stream_id = stream_id;
  f.payload = std::move(payload);
  f.cursor = cursor;
  return f;
}

void encode_frame(ByteWriter& out, const FrameHeader& header, ByteView payload, std::optional<std::uint64_t> cursor) {
  if (header.has(flags::kCursor) != cursor.has_value()) {
    throw Error(ErrorCode::FlagCursorMismatch,
                cursor ? "cursor given without the CURSOR flag" : "CURSOR flag set without a cursor");
  }
  if (header.length != payload.size()) {
    throw Error(ErrorCode::InvalidArgument, "frame length " + std::to_string(header.length) + " does not match payload of " +
                                                std::to_string(payload.size()) + " bytes");
  }
  out.write_le<std::uint32_t>(header.length);
  out.write_byte(header.flags);
  out.write_le<std::uint32_t>(header.stream_id);
  out.write_raw(payload);
  if (cursor) out.write_le<std::uint64_t>(*cursor);
}

Bytes encode_frame(const FrameHeader& header, ByteView payload, std::optional<std::uint64_t> cursor) {
  ByteWriter out(kFrameHeaderSize + payload.size() + kCursorSize);
  encode_frame(out, header, payload, cursor);
  return out.take();
}

Bytes encode_frame(const Frame& frame) { return encode_frame(frame.header, frame.payload, frame.cursor); }

FrameHeader decode_frame_header(ByteView nine_bytes) {
  ByteReader in(nine_bytes);
  FrameHeader h;
  h.length = in.read_le<std::uint32_t>();
  h.flags = in.read_byte();
  h.stream_id = in.read_le<std::uint32_t>();
  return h;
}

FrameView decode_frame(ByteReader& in, std::size_t max_length) {
  in.require(kFrameHeaderSize);
  FrameView f;
  f.header = decode_frame_header(in.read_raw(kFrameHeaderSize));
  if (f.header.has(flags::kCompressed)) {
    throw Error(ErrorCode::UnsupportedCompressed, "compressed frames are not supported");
  }
  if (f.header.length > max_length) {
    throw Error(ErrorCode::FrameTooLarge, "frame of " + std::to_string(f.header.length) + " bytes exceeds limit of " +
                                              std::to_string(max_length));
  }
  f.payload = in.read_raw(f.header.length);
  if (f.header.has(flags::kCursor)) f.cursor = in.read_le<std::uint64_t>();
  return f;
}

std::string_view status_name(Status s) noexcept {
  switch (s) {
    case Status::Ok: return "OK";
    case Status::Cancelled: return "CANCELLED";
    case Status::Unknown: return "UNKNOWN";
    case Status::InvalidArgument: return "INVALID_ARGUMENT";
    case Status::DeadlineExceeded: return "DEADLINE_EXCEEDED";
    case Status::NotFound: return "NOT_FOUND";
    case Status::AlreadyExists: return "ALREADY_EXISTS";
    case Status::PermissionDenied: return "PERMISSION_DENIED";
    case Status::ResourceExhausted: return "RESOURCE_EXHAUSTED";
    case Status::FailedPrecondition: return "FAILED_PRECONDITION";
    case Status::Aborted: return "ABORTED";
    case Status::OutOfRange: return "OUT_OF_RANGE";
    case Status::Unimplemented: return "UNIMPLEMENTED";
    case Status::Internal: return "INTERNAL";
    case Status::Unavailable: return "UNAVAILABLE";
    case Status::DataLoss: return "DATA_LOSS";
    case Status::Unauthenticated: return "UNAUTHENTICATED";
  }
  return "APPLICATION";
}

int http_status_for(Status s) noexcept {
  switch (s) {
    case Status::Ok: return 200;
    case Status::InvalidArgument: return 400;
    case Status::DeadlineExceeded: return 504;
    case Status::NotFound: return 404;
    case Status::PermissionDenied: return 403;
    case Status::Unimplemented: return 501;
    default: return 500;
  }
}

std::int64_t deadline_remaining(const Timestamp& deadline, const Timestamp& now) noexcept {
  const std::int64_t d = deadline.to_unix_nanos();
  const std::int64_t n = now.to_unix_nanos();
  if (n < 0 && d > std::numeric_limits<std::int64_t>::max() + n) return std::numeric_limits<std::int64_t>::max();
  if (n > 0 && d < std::numeric_limits<std::int64_t>::min() + n) return std::numeric_limits<std::int64_t>::min();
  return d - n;
}

}  // namespace bebop::rpc
