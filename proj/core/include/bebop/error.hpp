#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bebop {

enum class ErrorCode : std::uint8_t {
  // wire / dynamic codec
  Truncated,
  MissingTerminator,
  InvalidUtf8,
  MissingEndMarker,
  DiscriminatorUnknown,
  DepthExceeded,
  ElementLimitExceeded,
  DuplicateMapKey,
  TypeMismatch,
  TagOutOfRange,
  // schema front end
  InvalidEscape,
  UnterminatedString,
  SyntaxError,
  DuplicateTag,
  DuplicateDiscriminator,
  DuplicateDefinition,
  MissingZeroEnumMember,
  InvalidMapKeyType,
  FixedArrayTooLarge,
  InvalidLiteral,
  InvalidDecorator,
  UnresolvedType,
  UnresolvedImport,
  ImportCycle,
  MethodNameCollision,
  UndefinedEnvVar,
  RecursiveStruct,
  InvalidTypeUse,
  // descriptor
  ReservedCollision,
  // rpc framing
  FlagCursorMismatch,
  UnsupportedCompressed,
  FrameTooLarge,
  // rpc runtime
  InvalidReference,
  MethodNotBatchable,
  // transport
  Closed,
  Refused,
  // plugins
  PluginNotFound,
  PluginProtocolError,
  PluginReportedError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Location inside a schema source file. Lines and columns are 1-based.
///
/// Spans never take part in structural comparison of syntax trees, so two
/// spans always compare equal. Tests that care about positions inspect the
/// fields directly.
struct Span {
  std::string file;
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::uint32_t offset = 0;
  std::uint32_t length = 0;

  friend bool operator==(const Span&, const Span&) noexcept { return true; }
};

std::string format_span(const Span& span);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::optional<Span> span = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<Span>& span() const noexcept { return span_; }
  /// Message without the location prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<Span> span_;
};

}  // namespace bebop
