#include "bebop/error.hpp"

namespace bebop {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::MissingTerminator: return "MissingTerminator";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::MissingEndMarker: return "MissingEndMarker";
    case ErrorCode::DiscriminatorUnknown: return "DiscriminatorUnknown";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::ElementLimitExceeded: return "ElementLimitExceeded";
    case ErrorCode::DuplicateMapKey: return "DuplicateMapKey";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::TagOutOfRange: return "TagOutOfRange";
    case ErrorCode::InvalidEscape: return "InvalidEscape";
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateTag: return "DuplicateTag";
    case ErrorCode::DuplicateDiscriminator: return "DuplicateDiscriminator";
    case ErrorCode::DuplicateDefinition: return "DuplicateDefinition";
    case ErrorCode::MissingZeroEnumMember: return "MissingZeroEnumMember";
    case ErrorCode::InvalidMapKeyType: return "InvalidMapKeyType";
    case ErrorCode::FixedArrayTooLarge: return "FixedArrayTooLarge";
    case ErrorCode::InvalidLiteral: return "InvalidLiteral";
    case ErrorCode::InvalidDecorator: return "InvalidDecorator";
    case ErrorCode::UnresolvedType: return "UnresolvedType";
    case ErrorCode::UnresolvedImport: return "UnresolvedImport";
    case ErrorCode::ImportCycle: return "ImportCycle";
    case ErrorCode::MethodNameCollision: return "MethodNameCollision";
    case ErrorCode::UndefinedEnvVar: return "UndefinedEnvVar";
    case ErrorCode::RecursiveStruct: return "RecursiveStruct";
    case ErrorCode::InvalidTypeUse: return "InvalidTypeUse";
    case ErrorCode::ReservedCollision: return "ReservedCollision";
    case ErrorCode::FlagCursorMismatch: return "FlagCursorMismatch";
    case ErrorCode::UnsupportedCompressed: return "UnsupportedCompressed";
    case ErrorCode::FrameTooLarge: return "FrameTooLarge";
    case ErrorCode::InvalidReference: return "InvalidReference";
    case ErrorCode::MethodNotBatchable: return "MethodNotBatchable";
    case ErrorCode::Closed: return "Closed";
    case ErrorCode::Refused: return "Refused";
    case ErrorCode::PluginNotFound: return "PluginNotFound";
    case ErrorCode::PluginProtocolError: return "PluginProtocolError";
    case ErrorCode::PluginReportedError: return "PluginReportedError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string format_span(const Span& span) {
  std::string out = span.file.empty() ? std::string("<input>") : span.file;
  out += ':';
  out += std::to_string(span.line);
  out += ':';
  out += std::to_string(span.column);
  return out;
}

namespace {

std::string compose(const std::string& message, const std::optional<Span>& span) {
  if (!span) return message;
  return format_span(*span) + ": " + message;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, std::optional<Span> span)
    : std::runtime_error(compose(message, span)),
      code_(code),
      detail_(std::move(message)),
      span_(std::move(span)) {}

}  // namespace bebop
