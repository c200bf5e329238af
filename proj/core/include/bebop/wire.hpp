#pragma once

// Little-endian fixed-width building blocks of the Bebop wire format.

#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "bebop/error.hpp"

namespace bebop {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// IEEE 754 binary16, stored as its raw bit pattern.
struct Half {
  std::uint16_t bits = 0;

  /// Narrowing uses round-to-nearest-even.
  static Half from_float(float value) noexcept;
  float to_float() const noexcept;

  friend bool operator==(Half, Half) = default;
};

/// Brain float: the high 16 bits of a binary32.
struct BFloat16 {
  std::uint16_t bits = 0;

  static BFloat16 from_float(float value) noexcept;
  float to_float() const noexcept {
    return std::bit_cast<float>(static_cast<std::uint32_t>(bits) << 16);
  }

  friend bool operator==(BFloat16, BFloat16) = default;
};

struct Int128 {
  std::uint64_t low = 0;
  std::int64_t high = 0;
  friend bool operator==(const Int128&, const Int128&) = default;
};

struct UInt128 {
  std::uint64_t low = 0;
  std::uint64_t high = 0;
  friend bool operator==(const UInt128&, const UInt128&) = default;
};

struct Uuid {
  std::array<std::uint8_t, 16> bytes{};

  /// Accepts the canonical 8-4-4-4-12 form, case-insensitive.
  static Uuid parse(std::string_view text);
  static bool try_parse(std::string_view text, Uuid& out) noexcept;
  /// Random version 4, variant 1.
  static Uuid random_v4(std::mt19937_64& rng);
  static Uuid random_v4();

  std::string to_string() const;
  bool is_nil() const noexcept;

  friend bool operator==(const Uuid&, const Uuid&) = default;
  friend auto operator<=>(const Uuid&, const Uuid&) = default;
};

struct UuidHash {
  std::size_t operator()(const Uuid& id) const noexcept;
};

/// Seconds and nanoseconds since the Unix epoch plus a display offset.
struct Timestamp {
  std::int64_t seconds = 0;
  std::int32_t nanos = 0;
  std::int32_t offset_ms = 0;

  using clock = std::chrono::system_clock;
  static Timestamp from_time_point(clock::time_point tp, std::int32_t offset_ms = 0);
  static Timestamp from_unix_millis(std::int64_t ms);
  static Timestamp now() { return from_time_point(clock::now()); }
  clock::time_point to_time_point() const;
  std::int64_t to_unix_millis() const noexcept;
  /// Offset-independent instant in nanoseconds; saturates outside ±292 years.
  std::int64_t to_unix_nanos() const noexcept;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

struct Duration {
  std::int64_t seconds = 0;
  std::int32_t nanos = 0;

  /// Normalizes so both fields share a sign.
  static Duration from_nanos(std::int64_t total) noexcept;
  std::int64_t to_nanos() const noexcept;

  friend bool operator==(const Duration&, const Duration&) = default;
};

enum class PrimitiveKind : std::uint8_t {
  Bool,
  Byte,
  Int8,
  Int16,
  UInt16,
  Int32,
  UInt32,
  Int64,
  UInt64,
  Int128,
  UInt128,
  Float16,
  BFloat16,
  Float32,
  Float64,
  Uuid,
  Timestamp,
  Duration,
};

inline constexpr std::size_t kPrimitiveKindCount = 18;

/// Alternative index equals the PrimitiveKind value.
using Primitive =
    std::variant<bool, std::uint8_t, std::int8_t, std::int16_t, std::uint16_t, std::int32_t,
                 std::uint32_t, std::int64_t, std::uint64_t, Int128, UInt128, Half, BFloat16,
                 float, double, Uuid, Timestamp, Duration>;

inline PrimitiveKind kind_of(const Primitive& p) noexcept {
  return static_cast<PrimitiveKind>(p.index());
}

constexpr std::size_t fixed_size(PrimitiveKind kind) noexcept {
  switch (kind) {
    case PrimitiveKind::Bool:
    case PrimitiveKind::Byte:
    case PrimitiveKind::Int8: return 1;
    case PrimitiveKind::Int16:
    case PrimitiveKind::UInt16:
    case PrimitiveKind::Float16:
    case PrimitiveKind::BFloat16: return 2;
    case PrimitiveKind::Int32:
    case PrimitiveKind::UInt32:
    case PrimitiveKind::Float32: return 4;
    case PrimitiveKind::Int64:
    case PrimitiveKind::UInt64:
    case PrimitiveKind::Float64: return 8;
    case PrimitiveKind::Duration: return 12;
    case PrimitiveKind::Int128:
    case PrimitiveKind::UInt128:
    case PrimitiveKind::Uuid:
    case PrimitiveKind::Timestamp: return 16;
  }
  return 0;
}

constexpr bool is_integer(PrimitiveKind kind) noexcept {
  switch (kind) {
    case PrimitiveKind::Byte:
    case PrimitiveKind::Int8:
    case PrimitiveKind::Int16:
    case PrimitiveKind::UInt16:
    case PrimitiveKind::Int32:
    case PrimitiveKind::UInt32:
    case PrimitiveKind::Int64:
    case PrimitiveKind::UInt64:
    case PrimitiveKind::Int128:
    case PrimitiveKind::UInt128: return true;
    default: return false;
  }
}

constexpr bool is_signed_integer(PrimitiveKind kind) noexcept {
  return kind == PrimitiveKind::Int8 || kind == PrimitiveKind::Int16 ||
         kind == PrimitiveKind::Int32 || kind == PrimitiveKind::Int64 ||
         kind == PrimitiveKind::Int128;
}

constexpr bool is_floating(PrimitiveKind kind) noexcept {
  return kind == PrimitiveKind::Float16 || kind == PrimitiveKind::BFloat16 ||
         kind == PrimitiveKind::Float32 || kind == PrimitiveKind::Float64;
}

std::string_view primitive_name(PrimitiveKind kind) noexcept;

/// Bitwise equality: NaNs with equal payloads match, +0 and -0 differ.
bool bit_equal(const Primitive& a, const Primitive& b) noexcept;

bool is_valid_utf8(std::string_view text) noexcept;

/// Lowercase bytes separated by single spaces: "0a ff".
std::string to_hex(ByteView bytes);
/// Accepts hex digits with optional whitespace between bytes.
Bytes from_hex(std::string_view text);

namespace detail {

template <typename T>
inline void store_le(std::uint8_t* out, T value) noexcept {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
    std::memcpy(out, &value, sizeof(T));
  } else {
    std::uint8_t tmp[sizeof(T)];
    std::memcpy(tmp, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) out[i] = tmp[sizeof(T) - 1 - i];
  }
}

template <typename T>
inline T load_le(const std::uint8_t* in) noexcept {
  static_assert(std::is_trivially_copyable_v<T>);
  T value;
  if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
    std::memcpy(&value, in, sizeof(T));
  } else {
    std::uint8_t tmp[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) tmp[i] = in[sizeof(T) - 1 - i];
    std::memcpy(&value, tmp, sizeof(T));
  }
  return value;
}

}  // namespace detail

/// Handle returned by ByteWriter::reserve_length.
struct LengthPatch {
  std::size_t offset = 0;
};

class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(std::size_t reserve) { buffer_.reserve(reserve); }

  std::size_t position() const noexcept { return buffer_.size(); }
  const Bytes& bytes() const noexcept { return buffer_; }
  Bytes take() noexcept { return std::move(buffer_); }
  void clear() noexcept { buffer_.clear(); }

  void write_byte(std::uint8_t v) { buffer_.push_back(v); }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void write_le(T value) {
    const auto at = grow(sizeof(T));
    detail::store_le(buffer_.data() + at, value);
  }

  void write_bool(bool v) { write_byte(v ? 0x01 : 0x00); }
  void write_raw(ByteView data) { buffer_.insert(buffer_.end(), data.begin(), data.end()); }
  void write_uuid(const Uuid& id) { write_raw(id.bytes); }
  void write_timestamp(const Timestamp& ts);
  void write_duration(const Duration& d);
  void write_int128(const Int128& v);
  void write_uint128(const UInt128& v);

  /// Appends exactly fixed_size(kind_of(value)) bytes.
  void write_fixed(const Primitive& value);

  /// Length prefix, UTF-8 bytes, NUL terminator. The caller guarantees UTF-8.
  void write_string(std::string_view text);

  /// Count prefix followed by raw element bytes.
  void write_byte_array(ByteView data);

  LengthPatch reserve_length();
  /// Stores the number of bytes written since the matching reserve_length.
  void patch_length(LengthPatch patch);

 private:
  std::size_t grow(std::size_t n) {
    const auto at = buffer_.size();
    buffer_.resize(at + n);
    return at;
  }

  Bytes buffer_;
};

/// Read-only view over a contiguous array of little-endian fixed-width elements.
template <typename T>
class ArrayView {
 public:
  ArrayView() = default;
  ArrayView(const std::uint8_t* data, std::size_t count) : data_(data), count_(count) {}

  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  ByteView raw() const noexcept { return {data_, count_ * sizeof(T)}; }

  T operator[](std::size_t i) const noexcept {
    if constexpr (std::is_arithmetic_v<T>) {
      return detail::load_le<T>(data_ + i * sizeof(T));
    } else {
      T out;
      out.bits = detail::load_le<std::uint16_t>(data_ + i * sizeof(T));
      return out;
    }
  }

  /// Materializes the elements into owned storage.
  std::vector<T> to_vector() const {
    std::vector<T> out(count_);
    if constexpr (std::endian::native == std::endian::little) {
      if (count_ != 0) std::memcpy(out.data(), data_, count_ * sizeof(T));
    } else {
      for (std::size_t i = 0; i < count_; ++i) out[i] = (*this)[i];
    }
    return out;
  }

 private:
  const std::uint8_t* data_ = nullptr;
  std::size_t count_ = 0;
};

class ByteReader {
 public:
  ByteReader() = default;
  explicit ByteReader(ByteView data) : data_(data) {}

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool at_end() const noexcept { return pos_ == data_.size(); }
  ByteView data() const noexcept { return data_; }

  void require(std::size_t n) const {
    if (n > remaining()) throw_truncated(n);
  }

  std::uint8_t read_byte() {
    require(1);
    return data_[pos_++];
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  T read_le() {
    require(sizeof(T));
    const T value = detail::load_le<T>(data_.data() + pos_);
    pos_ += sizeof(T);
    return value;
  }

  /// Any non-zero byte is true.
  bool read_bool() { return read_byte() != 0; }
  Uuid read_uuid();
  Timestamp read_timestamp();
  Duration read_duration();
  Int128 read_int128();
  UInt128 read_uint128();

  Primitive read_fixed(PrimitiveKind kind);

  /// View into the input; validates terminator and UTF-8.
  std::string_view read_string();

  ByteView read_raw(std::size_t n) {
    require(n);
    ByteView out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  /// Count-prefixed array of fixed-width elements, without copying.
  template <typename T>
  ArrayView<T> read_array_view() {
    const std::uint32_t count = read_le<std::uint32_t>();
    const std::size_t bytes = static_cast<std::size_t>(count) * sizeof(T);
    require(bytes);
    ArrayView<T> view(data_.data() + pos_, count);
    pos_ += bytes;
    return view;
  }

  ByteView read_byte_array() {
    const std::uint32_t count = read_le<std::uint32_t>();
    return read_raw(count);
  }

  void skip(std::size_t n) {
    require(n);
    pos_ += n;
  }

  /// Splits off the next n bytes as an independent reader and advances past them.
  ByteReader sub_reader(std::size_t n) { return ByteReader(read_raw(n)); }

 private:
  [[noreturn]] void throw_truncated(std::size_t wanted) const;

  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace bebop
