#include "bebop/schema/literals.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <limits>

namespace bebop::schema {

namespace {

constexpr std::int64_t kNanos = 1'000'000'000;

bool read_digits(std::string_view text, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > text.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = text[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += count;
  out = v;
  return true;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  std::size_t pos = 0;
  int year = 0;
  int month = 0;
  int day = 0;
  if (!read_digits(text, pos, 4, year)) return std::nullopt;
  if (pos >= text.size() || text[pos++] != '-') return std::nullopt;
  if (!read_digits(text, pos, 2, month)) return std::nullopt;
  if (pos >= text.size() || text[pos++] != '-') return std::nullopt;
  if (!read_digits(text, pos, 2, day)) return std::nullopt;

  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();

  int hour = 0;
  int minute = 0;
  int second = 0;
  std::int64_t frac = 0;
  std::int64_t offset_ms = 0;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != 't') return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, hour)) return std::nullopt;
    if (pos >= text.size() || text[pos++] != ':') return std::nullopt;
    if (!read_digits(text, pos, 2, minute)) return std::nullopt;
    if (pos >= text.size() || text[pos++] != ':') return std::nullopt;
    if (!read_digits(text, pos, 2, second)) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      int digits = 0;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        if (++digits > 9) return std::nullopt;
        frac = frac * 10 + (text[pos] - '0');
        ++pos;
      }
      if (digits == 0) return std::nullopt;
      for (int i = digits; i < 9; ++i) frac *= 10;
    }
    if (pos >= text.size()) {
      // No zone designator: UTC.
    } else if (text[pos] == 'Z' || text[pos] == 'z') {
      ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
      const bool negative = text[pos] == '-';
      ++pos;
      int oh = 0;
      int om = 0;
      int os = 0;
      int oms = 0;
      if (!read_digits(text, pos, 2, oh)) return std::nullopt;
      if (pos >= text.size() || text[pos++] != ':') return std::nullopt;
      if (!read_digits(text, pos, 2, om)) return std::nullopt;
      if (pos < text.size() && text[pos] == ':') {
        ++pos;
        if (!read_digits(text, pos, 2, os)) return std::nullopt;
        if (pos < text.size() && text[pos] == '.') {
          ++pos;
          if (!read_digits(text, pos, 3, oms)) return std::nullopt;
        }
      }
      if (oh > 23 || om > 59 || os > 59) return std::nullopt;
      offset_ms = ((oh * 60 + om) * 60 + os) * std::int64_t{1000} + oms;
      if (negative) offset_ms = -offset_ms;
    } else {
      return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;
  }

  const std::int64_t local_seconds = days * 86400 + hour * 3600 + minute * 60 + second;
  std::int64_t seconds = local_seconds - offset_ms / 1000;
  std::int64_t nanos = frac - (offset_ms % 1000) * 1'000'000;
  while (nanos < 0) {
    nanos += kNanos;
    --seconds;
  }
  while (nanos >= kNanos) {
    nanos -= kNanos;
    ++seconds;
  }
  return Timestamp{seconds, static_cast<std::int32_t>(nanos), static_cast<std::int32_t>(offset_ms)};
}

std::string format_timestamp(const Timestamp& ts) {
  using namespace std::chrono;
  // Render local wall time: instant plus offset.
  std::int64_t seconds = ts.seconds + ts.offset_ms / 1000;
  std::int64_t nanos = ts.nanos + static_cast<std::int64_t>(ts.offset_ms % 1000) * 1'000'000;
  while (nanos < 0) {
    nanos += kNanos;
    --seconds;
  }
  while (nanos >= kNanos) {
    nanos -= kNanos;
    ++seconds;
  }
  std::int64_t days = seconds / 86400;
  std::int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[96];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                        static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                        static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                        static_cast<int>(rem % 60));
  std::string out(buf, static_cast<std::size_t>(n));
  if (nanos != 0) {
    n = std::snprintf(buf, sizeof buf, ".%09lld", static_cast<long long>(nanos));
    out.append(buf, static_cast<std::size_t>(n));
  }
  if (ts.offset_ms == 0) {
    out += 'Z';
  } else {
    std::int64_t off = ts.offset_ms;
    out += off < 0 ? '-' : '+';
    if (off < 0) off = -off;
    const std::int64_t ms = off % 1000;
    const std::int64_t total_s = off / 1000;
    n = std::snprintf(buf, sizeof buf, "%02lld:%02lld", static_cast<long long>(total_s / 3600),
                      static_cast<long long>((total_s / 60) % 60));
    out.append(buf, static_cast<std::size_t>(n));
    if (total_s % 60 != 0 || ms != 0) {
      n = std::snprintf(buf, sizeof buf, ":%02lld", static_cast<long long>(total_s % 60));
      out.append(buf, static_cast<std::size_t>(n));
      if (ms != 0) {
        n = std::snprintf(buf, sizeof buf, ".%03lld", static_cast<long long>(ms));
        out.append(buf, static_cast<std::size_t>(n));
      }
    }
  }
  return out;
}

std::optional<Duration> parse_duration(std::string_view text) {
  bool negative = false;
  std::size_t pos = 0;
  if (pos < text.size() && text[pos] == '-') {
    negative = true;
    ++pos;
  }
  if (pos >= text.size()) return std::nullopt;
  std::int64_t total = 0;
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  while (pos < text.size()) {
    std::int64_t amount = 0;
    const std::size_t digits_start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (amount > (kMax - 9) / 10) return std::nullopt;
      amount = amount * 10 + (text[pos] - '0');
      ++pos;
    }
    if (pos == digits_start) return std::nullopt;
    std::int64_t unit;
    auto rest = text.substr(pos);
    if (rest.starts_with("ms")) {
      unit = 1'000'000;
      pos += 2;
    } else if (rest.starts_with("us")) {
      unit = 1'000;
      pos += 2;
    } else if (rest.starts_with("ns")) {
      unit = 1;
      pos += 2;
    } else if (rest.starts_with("h")) {
      unit = 3600 * kNanos;
      pos += 1;
    } else if (rest.starts_with("m")) {
      unit = 60 * kNanos;
      pos += 1;
    } else if (rest.starts_with("s")) {
      unit = kNanos;
      pos += 1;
    } else {
      return std::nullopt;
    }
    if (amount > (kMax - total) / unit) return std::nullopt;
    total += amount * unit;
  }
  return Duration::from_nanos(negative ? -total : total);
}

std::string format_duration(const Duration& d) {
  std::int64_t total = d.to_nanos();
  if (total == 0) return "0s";
  std::string out;
  std::uint64_t mag;
  if (total < 0) {
    out += '-';
    mag = static_cast<std::uint64_t>(-(total + 1)) + 1;
  } else {
    mag = static_cast<std::uint64_t>(total);
  }
  struct Unit {
    std::uint64_t nanos;
    const char* suffix;
  };
  static constexpr Unit kUnits[] = {{3600ull * 1'000'000'000ull, "h"}, {60ull * 1'000'000'000ull, "m"},
                                    {1'000'000'000ull, "s"},           {1'000'000ull, "ms"},
                                    {1'000ull, "us"},                  {1ull, "ns"}};
  for (const auto& u : kUnits) {
    if (mag >= u.nanos) {
      out += std::to_string(mag / u.nanos);
      out += u.suffix;
      mag %= u.nanos;
    }
  }
  return out;
}

std::optional<std::uint64_t> parse_integer_magnitude(std::string_view text) {
  std::uint64_t v = 0;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    for (std::size_t i = 2; i < text.size(); ++i) {
      const char c = text[i];
      int d;
      if (c >= '0' && c <= '9') {
        d = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        d = c - 'a' + 10;
      } else if (c >= 'A' && c <= 'F') {
        d = c - 'A' + 10;
      } else {
        return std::nullopt;
      }
      if (v > (std::numeric_limits<std::uint64_t>::max() >> 4)) return std::nullopt;
      v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    return v;
  }
  if (text.empty()) return std::nullopt;
  for (const char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    const auto d = static_cast<std::uint64_t>(c - '0');
    if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10) return std::nullopt;
    v = v * 10 + d;
  }
  return v;
}

bool integer_fits(PrimitiveKind kind, bool negative, std::uint64_t magnitude) {
  auto signed_fits = [&](std::uint64_t max_positive) {
    return negative ? magnitude <= max_positive + 1 : magnitude <= max_positive;
  };
  auto unsigned_fits = [&](std::uint64_t max) { return (!negative || magnitude == 0) && magnitude <= max; };
  switch (kind) {
    case PrimitiveKind::Byte: return unsigned_fits(0xff);
    case PrimitiveKind::UInt16: return unsigned_fits(0xffff);
    case PrimitiveKind::UInt32: return unsigned_fits(0xffffffffull);
    case PrimitiveKind::UInt64:
    case PrimitiveKind::UInt128: return unsigned_fits(~0ull);
    case PrimitiveKind::Int8: return signed_fits(0x7f);
    case PrimitiveKind::Int16: return signed_fits(0x7fff);
    case PrimitiveKind::Int32: return signed_fits(0x7fffffffull);
    case PrimitiveKind::Int64:
    case PrimitiveKind::Int128: return signed_fits(0x7fffffffffffffffull);
    default: return false;
  }
}

std::string quote_string(std::string_view text) {
  std::string out = "\"";
  for (const char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\0': out += "\\0"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string quote_bytes(ByteView bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "b\"";
  for (const auto b : bytes) {
    if (b >= 0x20 && b < 0x7f && b != '"' && b != '\\') {
      out += static_cast<char>(b);
    } else {
      out += "\\x";
      out += kHex[b >> 4];
      out += kHex[b & 0xf];
    }
  }
  out += '"';
  return out;
}

}  // namespace bebop::schema

namespace bebop {

bool operator==(const Literal& a, const Literal& b) noexcept {
  if (a.value.index() != b.value.index()) return false;
  if (const auto* x = std::get_if<double>(&a.value)) {
    const double y = std::get<double>(b.value);
    std::uint64_t xb;
    std::uint64_t yb;
    std::memcpy(&xb, x, 8);
    std::memcpy(&yb, &y, 8);
    return xb == yb;
  }
  return a.value == b.value;
}

std::string_view to_string(DefinitionKind kind) noexcept {
  switch (kind) {
    case DefinitionKind::Unknown: return "unknown";
    case DefinitionKind::Enum: return "enum";
    case DefinitionKind::Struct: return "struct";
    case DefinitionKind::Message: return "message";
    case DefinitionKind::Union: return "union";
    case DefinitionKind::Service: return "service";
    case DefinitionKind::Const: return "const";
    case DefinitionKind::Decorator: return "decorator";
  }
  return "unknown";
}

}  // namespace bebop

namespace bebop::schema {

std::optional<Literal> coerce_literal(const Literal& raw, const TypeExpr& type) {
  const auto& v = raw.value;
  if (type.kind == TypeExpr::Kind::String) {
    if (std::holds_alternative<std::string>(v)) return raw;
    return std::nullopt;
  }
  if (type.kind == TypeExpr::Kind::Array) {
    if (type.args.size() == 1 && type.args[0].kind == TypeExpr::Kind::Primitive &&
        type.args[0].primitive == PrimitiveKind::Byte && std::holds_alternative<Bytes>(v)) {
      return raw;
    }
    return std::nullopt;
  }
  if (type.kind != TypeExpr::Kind::Primitive) return std::nullopt;

  const PrimitiveKind k = type.primitive;
  if (k == PrimitiveKind::Bool) {
    if (std::holds_alternative<bool>(v)) return raw;
    return std::nullopt;
  }
  if (is_integer(k)) {
    bool negative = false;
    std::uint64_t magnitude = 0;
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      negative = *i < 0;
      magnitude = negative ? static_cast<std::uint64_t>(-(*i + 1)) + 1 : static_cast<std::uint64_t>(*i);
    } else if (const auto* u = std::get_if<std::uint64_t>(&v)) {
      magnitude = *u;
    } else {
      return std::nullopt;
    }
    if (!integer_fits(k, negative, magnitude)) return std::nullopt;
    if (is_signed_integer(k)) {
      const auto bits = negative ? ~magnitude + 1 : magnitude;
      return Literal{static_cast<std::int64_t>(bits)};
    }
    return Literal{magnitude};
  }
  if (is_floating(k)) {
    if (const auto* d = std::get_if<double>(&v)) return Literal{*d};
    if (const auto* i = std::get_if<std::int64_t>(&v)) return Literal{static_cast<double>(*i)};
    if (const auto* u = std::get_if<std::uint64_t>(&v)) return Literal{static_cast<double>(*u)};
    return std::nullopt;
  }
  const auto* text = std::get_if<std::string>(&v);
  switch (k) {
    case PrimitiveKind::Timestamp:
      if (std::holds_alternative<Timestamp>(v)) return raw;
      if (text) {
        if (auto ts = parse_timestamp(*text)) return Literal{*ts};
      }
      return std::nullopt;
    case PrimitiveKind::Duration:
      if (std::holds_alternative<Duration>(v)) return raw;
      if (text) {
        if (auto d = parse_duration(*text)) return Literal{*d};
      }
      return std::nullopt;
    case PrimitiveKind::Uuid:
      if (std::holds_alternative<Uuid>(v)) return raw;
      if (text) {
        Uuid u;
        if (Uuid::try_parse(*text, u)) return Literal{u};
      }
      return std::nullopt;
    default: return std::nullopt;
  }
}

std::string format_literal(const Literal& lit) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, std::uint64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          if (std::isnan(x)) return std::signbit(x) ? "-nan" : "nan";
          if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
          char buf[64];
          const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
          std::string out(buf, static_cast<std::size_t>(n));
          if (out.find_first_of(".e") == std::string::npos) out += ".0";
          return out;
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote_string(x);
        } else if constexpr (std::is_same_v<T, Bytes>) {
          return quote_bytes(x);
        } else if constexpr (std::is_same_v<T, Timestamp>) {
          return quote_string(format_timestamp(x));
        } else if constexpr (std::is_same_v<T, Duration>) {
          return quote_string(format_duration(x));
        } else {
          return quote_string(x.to_string());
        }
      },
      lit.value);
}

}  // namespace bebop::schema
