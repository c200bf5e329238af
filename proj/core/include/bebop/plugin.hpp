#pragma once

// Code generator plugins: executables named bebopc-gen-<name> that read one
// CodeGeneratorRequest on stdin and write one CodeGeneratorResponse on
// stdout. Each message travels as a 4-byte little-endian byte count followed
// by the encoded message.

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bebop/compiler.hpp"
#include "bebop/descriptor.hpp"

namespace bebop::plugin {

struct CodeGeneratorRequest {
  std::vector<std::string> files_to_generate;
  std::string parameter;
  CompilerVersion compiler_version;
  /// Dependencies before dependents.
  std::vector<SchemaDescriptor> schemas;
  friend bool operator==(const CodeGeneratorRequest&, const CodeGeneratorRequest&) = default;
};

struct GeneratedFile {
  /// Relative to the output directory.
  std::string name;
  std::string content;
  friend bool operator==(const GeneratedFile&, const GeneratedFile&) = default;
};

struct PluginDiagnostic {
  schema::Diagnostic::Severity severity = schema::Diagnostic::Severity::Error;
  std::string message;
  std::string file;
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::uint32_t length = 0;
  friend bool operator==(const PluginDiagnostic&, const PluginDiagnostic&) = default;
};

struct CodeGeneratorResponse {
  std::string error;
  std::vector<GeneratedFile> files;
  std::vector<PluginDiagnostic> diagnostics;
  friend bool operator==(const CodeGeneratorResponse&, const CodeGeneratorResponse&) = default;
};

Bytes encode(const CodeGeneratorRequest& request);
CodeGeneratorRequest decode_request(ByteView bytes);
Bytes encode(const CodeGeneratorResponse& response);
CodeGeneratorResponse decode_response(ByteView bytes);

/// Length-prefixed transport form of an encoded message.
Bytes frame(ByteView message);
/// Inverse of frame(); Error(PluginProtocolError) when the input is not
/// exactly one framed message.
ByteView unframe(ByteView framed);

/// The request for a compilation: every schema the roots depend on.
CodeGeneratorRequest make_request(const Compilation& compilation, std::string parameter = {});

/// Searches PATH for bebopc-gen-<name>.
std::optional<std::filesystem::path> find_plugin(const std::string& name);

inline constexpr std::chrono::seconds kDefaultPluginTimeout{60};

/// Runs the plugin and returns its response. Throws Error(PluginNotFound)
/// when it cannot be started and Error(PluginProtocolError) when it times
/// out (it is then killed), exits nonzero, or answers with anything but one
/// framed response.
CodeGeneratorResponse run_plugin(const std::filesystem::path& executable, const CodeGeneratorRequest& request,
                                 std::chrono::milliseconds timeout = kDefaultPluginTimeout);

/// Writes response files below `out_dir`. Throws Error(PluginProtocolError)
/// for names that are absolute or contain "..", before writing anything.
std::vector<std::filesystem::path> write_files(const CodeGeneratorResponse& response,
                                               const std::filesystem::path& out_dir);

}  // namespace bebop::plugin
