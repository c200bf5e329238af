#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bebop/schema/ast.hpp"
#include "bebop/wire.hpp"

namespace bebop::schema {

/// ISO 8601 date-time with optional fraction (up to nanoseconds) and a zone
/// designator `Z` or `±HH:MM[:SS[.mmm]]`. A bare date means midnight UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);
/// Canonical text that parse_timestamp maps back to the same value.
std::string format_timestamp(const Timestamp& ts);

/// Sequence of `<integer><unit>` with units h, m, s, ms, us, ns, optionally
/// preceded by `-`. Example: "1h30m", "500ms".
std::optional<Duration> parse_duration(std::string_view text);
std::string format_duration(const Duration& d);

/// Decimal or `0x` hexadecimal magnitude. Returns nullopt on overflow.
std::optional<std::uint64_t> parse_integer_magnitude(std::string_view text);

/// Whether (negative, magnitude) fits in the integer kind. 128-bit kinds
/// accept the 64-bit range only.
bool integer_fits(PrimitiveKind kind, bool negative, std::uint64_t magnitude);

/// Converts an untyped literal (as parsed) to the representation for `type`:
/// integers become int64 for signed kinds and uint64 otherwise, numbers become
/// double for float kinds, and strings become timestamps, durations or uuids.
/// Returns nullopt when the literal cannot represent a value of `type`.
std::optional<Literal> coerce_literal(const Literal& raw, const TypeExpr& type);

/// Text for a literal that the parser reads back as an equal literal.
std::string format_literal(const Literal& lit);

/// Quote and escape text so the lexer reads back the same string.
std::string quote_string(std::string_view text);
std::string quote_bytes(ByteView bytes);

}  // namespace bebop::schema
