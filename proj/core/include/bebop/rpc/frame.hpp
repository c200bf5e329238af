#pragma once

// Frame layout: length u32, flags u8, stream_id u32, payload, and an 8-byte
// cursor after the payload when CURSOR is set. `length` never counts the
// cursor.

#include <cstdint>
#include <optional>
#include <string_view>

#include "bebop/wire.hpp"

namespace bebop::rpc {

namespace flags {
inline constexpr std::uint8_t kEndStream = 0x01;
inline constexpr std::uint8_t kError = 0x02;
inline constexpr std::uint8_t kCompressed = 0x04;
inline constexpr std::uint8_t kTrailer = 0x08;
inline constexpr std::uint8_t kCursor = 0x10;
}  // namespace flags

inline constexpr std::size_t kFrameHeaderSize = 9;
inline constexpr std::size_t kCursorSize = 8;
inline constexpr std::size_t kDefaultMaxFrameLength = 16u * 1024u * 1024u;

struct FrameHeader {
  std::uint32_t length = 0;
  std::uint8_t flags = 0;
  std::uint32_t stream_id = 0;

  bool has(std::uint8_t flag) const noexcept { return (flags & flag) != 0; }
  friend bool operator==(const FrameHeader&, const FrameHeader&) = default;
};

struct Frame {
  FrameHeader header;
  Bytes payload;
  std::optional<std::uint64_t> cursor;

  /// Sets length from the payload and CURSOR from `cursor`.
  static Frame make(std::uint32_t stream_id, std::uint8_t flags, Bytes payload,
                    std::optional<std::uint64_t> cursor = std::nullopt);
  std::size_t wire_size() const noexcept {
    return kFrameHeaderSize + payload.size() + (cursor ? kCursorSize : 0);
  }
  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Throws FlagCursorMismatch when CURSOR and `cursor` disagree, and
/// InvalidArgument when header.length differs from the payload size.
void encode_frame(ByteWriter& out, const FrameHeader& header, ByteView payload,
                  std::optional<std::uint64_t> cursor = std::nullopt);
Bytes encode_frame(const FrameHeader& header, ByteView payload,
                   std::optional<std::uint64_t> cursor = std::nullopt);
Bytes encode_frame(const Frame& frame);

struct FrameView {
  FrameHeader header;
  ByteView payload;
  std::optional<std::uint64_t> cursor;
};

/// Throws Truncated, UnsupportedCompressed, or FrameTooLarge.
FrameView decode_frame(ByteReader& in, std::size_t max_length = kDefaultMaxFrameLength);
FrameHeader decode_frame_header(ByteView nine_bytes);

/// Frames resulting from one exchange carry this much non-payload data.
inline std::size_t framing_overhead(const Frame& f) noexcept { return f.wire_size() - f.payload.size(); }

/// Status values 0..16 follow gRPC; 17..255 belong to applications.
enum class Status : std::uint8_t {
  Ok = 0,
  Cancelled = 1,
  Unknown = 2,
  InvalidArgument = 3,
  DeadlineExceeded = 4,
  NotFound = 5,
  AlreadyExists = 6,
  PermissionDenied = 7,
  ResourceExhausted = 8,
  FailedPrecondition = 9,
  Aborted = 10,
  OutOfRange = 11,
  Unimplemented = 12,
  Internal = 13,
  Unavailable = 14,
  DataLoss = 15,
  Unauthenticated = 16,
};

std::string_view status_name(Status s) noexcept;
/// 0->200, 3->400, 4->504, 5->404, 7->403, 12->501, 13->500, others 500.
int http_status_for(Status s) noexcept;

/// Nanoseconds from `now` until `deadline`; zero or negative means expired.
std::int64_t deadline_remaining(const Timestamp& deadline, const Timestamp& now) noexcept;
inline bool deadline_expired(const Timestamp& deadline, const Timestamp& now) noexcept {
  return deadline_remaining(deadline, now) <= 0;
}

}  // namespace bebop::rpc
