#include "bebop/wire.hpp"

#include <cmath>
#include <limits>

namespace bebop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int hex_digit(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr std::int64_t kNanosPerSecond = 1'000'000'000;

}  // namespace

Half Half::from_float(float value) noexcept {
  std::uint32_t x = std::bit_cast<std::uint32_t>(value);
  const std::uint32_t sign = x & 0x80000000u;
  x ^= sign;

  constexpr std::uint32_t f32_infinity = 255u << 23;
  constexpr std::uint32_t f16_overflow = (127u + 16u) << 23;
  constexpr std::uint32_t denorm_magic = ((127u - 15u) + (23u - 10u) + 1u) << 23;

  std::uint16_t out;
  if (x >= f16_overflow) {
    if (x > f32_infinity) {
      out = static_cast<std::uint16_t>(0x7e00u | ((x >> 13) & 0x3ffu));
    } else {
      out = 0x7c00u;
    }
  } else if (x < (113u << 23)) {
    // Result is subnormal or zero; the FPU performs the round-to-nearest-even.
    const float f = std::bit_cast<float>(x) + std::bit_cast<float>(denorm_magic);
    out = static_cast<std::uint16_t>(std::bit_cast<std::uint32_t>(f) - denorm_magic);
  } else {
    const std::uint32_t mant_odd = (x >> 13) & 1u;
    x += (static_cast<std::uint32_t>(15 - 127) << 23) + 0xfffu;
    x += mant_odd;
    out = static_cast<std::uint16_t>(x >> 13);
  }
  return Half{static_cast<std::uint16_t>(out | (sign >> 16))};
}

float Half::to_float() const noexcept {
  const std::uint32_t sign = (static_cast<std::uint32_t>(bits) & 0x8000u) << 16;
  const std::uint32_t exp = (bits >> 10) & 0x1fu;
  const std::uint32_t mant = bits & 0x3ffu;
  if (exp == 0) {
    const float magnitude = std::ldexp(static_cast<float>(mant), -24);
    return sign ? -magnitude : magnitude;
  }
  if (exp == 31) {
    return std::bit_cast<float>(sign | 0x7f800000u | (mant << 13));
  }
  return std::bit_cast<float>(sign | ((exp + 112u) << 23) | (mant << 13));
}

BFloat16 BFloat16::from_float(float value) noexcept {
  const std::uint32_t x = std::bit_cast<std::uint32_t>(value);
  if ((x & 0x7fffffffu) > 0x7f800000u) {
    return BFloat16{static_cast<std::uint16_t>((x >> 16) | 0x0040u)};
  }
  const std::uint32_t bias = 0x7fffu + ((x >> 16) & 1u);
  return BFloat16{static_cast<std::uint16_t>((x + bias) >> 16)};
}

bool Uuid::try_parse(std::string_view text, Uuid& out) noexcept {
  if (text.size() != 36) return false;
  std::size_t byte = 0;
  for (std::size_t i = 0; i < text.size();) {
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (text[i] != '-') return false;
      ++i;
      continue;
    }
    const int hi = hex_digit(text[i]);
    const int lo = hex_digit(text[i + 1]);
    if (hi < 0 || lo < 0) return false;
    out.bytes[byte++] = static_cast<std::uint8_t>((hi << 4) | lo);
    i += 2;
  }
  return byte == 16;
}

Uuid Uuid::parse(std::string_view text) {
  Uuid out;
  if (!try_parse(text, out)) {
    throw Error(ErrorCode::InvalidLiteral, "invalid UUID '" + std::string(text) + "'");
  }
  return out;
}

Uuid Uuid::random_v4(std::mt19937_64& rng) {
  Uuid out;
  for (std::size_t i = 0; i < 16; i += 8) {
    const std::uint64_t r = rng();
    std::memcpy(out.bytes.data() + i, &r, 8);
  }
  out.bytes[6] = static_cast<std::uint8_t>((out.bytes[6] & 0x0fu) | 0x40u);
  out.bytes[8] = static_cast<std::uint8_t>((out.bytes[8] & 0x3fu) | 0x80u);
  return out;
}

Uuid Uuid::random_v4() {
  thread_local std::mt19937_64 rng{[] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }()};
  return random_v4(rng);
}

std::string Uuid::to_string() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(36);
  for (std::size_t i = 0; i < 16; ++i) {
    if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
    out.push_back(kHex[bytes[i] >> 4]);
    out.push_back(kHex[bytes[i] & 0xf]);
  }
  return out;
}

bool Uuid::is_nil() const noexcept {
  for (auto b : bytes) {
    if (b != 0) return false;
  }
  return true;
}

std::size_t UuidHash::operator()(const Uuid& id) const noexcept {
  std::uint64_t a;
  std::uint64_t b;
  std::memcpy(&a, id.bytes.data(), 8);
  std::memcpy(&b, id.bytes.data() + 8, 8);
  return static_cast<std::size_t>(a ^ (b * 0x9e3779b97f4a7c15ull));
}

Timestamp Timestamp::from_time_point(clock::time_point tp, std::int32_t offset_ms) {
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(tp.time_since_epoch()).count();
  std::int64_t secs = ns / kNanosPerSecond;
  std::int64_t rem = ns % kNanosPerSecond;
  if (rem < 0) {
    rem += kNanosPerSecond;
    --secs;
  }
  return Timestamp{secs, static_cast<std::int32_t>(rem), offset_ms};
}

Timestamp Timestamp::from_unix_millis(std::int64_t ms) {
  std::int64_t secs = ms / 1000;
  std::int64_t rem = ms % 1000;
  if (rem < 0) {
    rem += 1000;
    --secs;
  }
  return Timestamp{secs, static_cast<std::int32_t>(rem * 1'000'000), 0};
}

Timestamp::clock::time_point Timestamp::to_time_point() const {
  const auto d = std::chrono::seconds(seconds) + std::chrono::nanoseconds(nanos);
  return clock::time_point(std::chrono::duration_cast<clock::duration>(d));
}

std::int64_t Timestamp::to_unix_millis() const noexcept {
  std::int64_t nanos_ms = nanos / 1'000'000;
  if (nanos < 0 && nanos % 1'000'000 != 0) --nanos_ms;
  return seconds * 1000 + nanos_ms;
}

std::int64_t Timestamp::to_unix_nanos() const noexcept {
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
  if (seconds > kMax / kNanosPerSecond - 1) return kMax;
  if (seconds < kMin / kNanosPerSecond + 1) return kMin;
  return seconds * kNanosPerSecond + nanos;
}

Duration Duration::from_nanos(std::int64_t total) noexcept {
  return Duration{total / kNanosPerSecond, static_cast<std::int32_t>(total % kNanosPerSecond)};
}

std::int64_t Duration::to_nanos() const noexcept { return seconds * kNanosPerSecond + nanos; }

std::string_view primitive_name(PrimitiveKind kind) noexcept {
  switch (kind) {
    case PrimitiveKind::Bool: return "bool";
    case PrimitiveKind::Byte: return "byte";
    case PrimitiveKind::Int8: return "int8";
    case PrimitiveKind::Int16: return "int16";
    case PrimitiveKind::UInt16: return "uint16";
    case PrimitiveKind::Int32: return "int32";
    case PrimitiveKind::UInt32: return "uint32";
    case PrimitiveKind::Int64: return "int64";
    case PrimitiveKind::UInt64: return "uint64";
    case PrimitiveKind::Int128: return "int128";
    case PrimitiveKind::UInt128: return "uint128";
    case PrimitiveKind::Float16: return "float16";
    case PrimitiveKind::BFloat16: return "bfloat16";
    case PrimitiveKind::Float32: return "float32";
    case PrimitiveKind::Float64: return "float64";
    case PrimitiveKind::Uuid: return "uuid";
    case PrimitiveKind::Timestamp: return "timestamp";
    case PrimitiveKind::Duration: return "duration";
  }
  return "?";
}

bool bit_equal(const Primitive& a, const Primitive& b) noexcept {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b);
        if constexpr (std::is_same_v<T, float>) {
          return std::bit_cast<std::uint32_t>(lhs) == std::bit_cast<std::uint32_t>(rhs);
        } else if constexpr (std::is_same_v<T, double>) {
          return std::bit_cast<std::uint64_t>(lhs) == std::bit_cast<std::uint64_t>(rhs);
        } else {
          return lhs == rhs;
        }
      },
      a);
}

bool is_valid_utf8(std::string_view text) noexcept {
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = s[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len;
    std::uint32_t cp;
    if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((s[i + k] & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3f);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) {
      return false;
    }
    if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
    i += len;
  }
  return true;
}

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 3);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i) out.push_back(' ');
    out.push_back(kDigits[bytes[i] >> 4]);
    out.push_back(kDigits[bytes[i] & 15]);
  }
  return out;
}

Bytes from_hex(std::string_view text) {
  Bytes out;
  int high = -1;
  for (char c : text) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      if (high >= 0) throw Error(ErrorCode::InvalidArgument, "odd number of hex digits");
      continue;
    }
    const int d = hex_digit(c);
    if (d < 0) throw Error(ErrorCode::InvalidArgument, std::string("not a hex digit: ") + c);
    if (high < 0) {
      high = d;
    } else {
      out.push_back(static_cast<std::uint8_t>(high << 4 | d));
      high = -1;
    }
  }
  if (high >= 0) throw Error(ErrorCode::InvalidArgument, "odd number of hex digits");
  return out;
}

void ByteWriter::write_timestamp(const Timestamp& ts) {
  write_le(ts.seconds);
  write_le(ts.nanos);
  write_le(ts.offset_ms);
}

void ByteWriter::write_duration(const Duration& d) {
  write_le(d.seconds);
  write_le(d.nanos);
}

void ByteWriter::write_int128(const Int128& v) {
  write_le(v.low);
  write_le(v.high);
}

void ByteWriter::write_uint128(const UInt128& v) {
  write_le(v.low);
  write_le(v.high);
}

void ByteWriter::write_fixed(const Primitive& value) {
  std::visit(overloaded{
                 [this](bool v) { write_bool(v); },
                 [this](const Half& v) { write_le(v.bits); },
                 [this](const BFloat16& v) { write_le(v.bits); },
                 [this](const Int128& v) { write_int128(v); },
                 [this](const UInt128& v) { write_uint128(v); },
                 [this](const Uuid& v) { write_uuid(v); },
                 [this](const Timestamp& v) { write_timestamp(v); },
                 [this](const Duration& v) { write_duration(v); },
                 [this](auto v) { write_le(v); },
             },
             value);
}

void ByteWriter::write_string(std::string_view text) {
  const auto at = grow(4 + text.size() + 1);
  detail::store_le(buffer_.data() + at, static_cast<std::uint32_t>(text.size()));
  if (!text.empty()) std::memcpy(buffer_.data() + at + 4, text.data(), text.size());
  buffer_[at + 4 + text.size()] = 0;
}

void ByteWriter::write_byte_array(ByteView data) {
  write_le(static_cast<std::uint32_t>(data.size()));
  write_raw(data);
}

LengthPatch ByteWriter::reserve_length() {
  const auto at = grow(4);
  return LengthPatch{at};
}

void ByteWriter::patch_length(LengthPatch patch) {
  const auto body = buffer_.size() - patch.offset - 4;
  detail::store_le(buffer_.data() + patch.offset, static_cast<std::uint32_t>(body));
}

void ByteReader::throw_truncated(std::size_t wanted) const {
  throw Error(ErrorCode::Truncated, "need " + std::to_string(wanted) + " bytes at offset " +
                                        std::to_string(pos_) + ", " + std::to_string(remaining()) +
                                        " remain");
}

Uuid ByteReader::read_uuid() {
  require(16);
  Uuid out;
  std::memcpy(out.bytes.data(), data_.data() + pos_, 16);
  pos_ += 16;
  return out;
}

Timestamp ByteReader::read_timestamp() {
  require(16);
  Timestamp ts;
  ts.seconds = read_le<std::int64_t>();
  ts.nanos = read_le<std::int32_t>();
  ts.offset_ms = read_le<std::int32_t>();
  return ts;
}

Duration ByteReader::read_duration() {
  require(12);
  Duration d;
  d.seconds = read_le<std::int64_t>();
  d.nanos = read_le<std::int32_t>();
  return d;
}

Int128 ByteReader::read_int128() {
  require(16);
  Int128 v;
  v.low = read_le<std::uint64_t>();
  v.high = read_le<std::int64_t>();
  return v;
}

UInt128 ByteReader::read_uint128() {
  require(16);
  UInt128 v;
  v.low = read_le<std::uint64_t>();
  v.high = read_le<std::uint64_t>();
  return v;
}

Primitive ByteReader::read_fixed(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Bool: return read_bool();
    case PrimitiveKind::Byte: return read_le<std::uint8_t>();
    case PrimitiveKind::Int8: return read_le<std::int8_t>();
    case PrimitiveKind::Int16: return read_le<std::int16_t>();
    case PrimitiveKind::UInt16: return read_le<std::uint16_t>();
    case PrimitiveKind::Int32: return read_le<std::int32_t>();
    case PrimitiveKind::UInt32: return read_le<std::uint32_t>();
    case PrimitiveKind::Int64: return read_le<std::int64_t>();
    case PrimitiveKind::UInt64: return read_le<std::uint64_t>();
    case PrimitiveKind::Int128: return read_int128();
    case PrimitiveKind::UInt128: return read_uint128();
    case PrimitiveKind::Float16: return Half{read_le<std::uint16_t>()};
    case PrimitiveKind::BFloat16: return BFloat16{read_le<std::uint16_t>()};
    case PrimitiveKind::Float32: return read_le<float>();
    case PrimitiveKind::Float64: return read_le<double>();
    case PrimitiveKind::Uuid: return read_uuid();
    case PrimitiveKind::Timestamp: return read_timestamp();
    case PrimitiveKind::Duration: return read_duration();
  }
  throw Error(ErrorCode::TypeMismatch, "unknown primitive kind");
}

std::string_view ByteReader::read_string() {
  const std::uint32_t length = read_le<std::uint32_t>();
  // Content plus terminator must fit; never read partially.
  if (static_cast<std::size_t>(length) >= remaining()) {
    pos_ -= 4;
    throw_truncated(static_cast<std::size_t>(length) + 5);
  }
  const auto* start = data_.data() + pos_;
  if (start[length] != 0) {
    throw Error(ErrorCode::MissingTerminator,
                "string at offset " + std::to_string(pos_ - 4) + " lacks NUL terminator");
  }
  std::string_view text(reinterpret_cast<const char*>(start), length);
  if (!is_valid_utf8(text)) {
    throw Error(ErrorCode::InvalidUtf8,
                "string at offset " + std::to_string(pos_ - 4) + " is not valid UTF-8");
  }
  pos_ += static_cast<std::size_t>(length) + 1;
  return text;
}

}  // namespace bebop
