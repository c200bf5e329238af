#pragma once

// Front end in one call: parse, resolve, and lower schema files.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bebop/descriptor.hpp"
#include "bebop/schema/resolver.hpp"

namespace bebop {

struct CompilerVersion {
  std::uint32_t major = 0;
  std::uint32_t minor = 0;
  std::uint32_t patch = 0;
  friend bool operator==(const CompilerVersion&, const CompilerVersion&) = default;
};

inline constexpr CompilerVersion kCompilerVersion{0, 1, 0};

std::string version_string();

struct Compilation {
  schema::ResolvedSchema resolved;
  DescriptorSet descriptors;
  /// Schema names of the files named on the command line, in order.
  std::vector<std::string> roots;
};

/// Reads `paths` from disk. Imports are searched next to the importing file,
/// then in `include_dirs`. Schema names are made relative to the working
/// directory when they lie below it.
Compilation compile_files(const std::vector<std::string>& paths, const std::vector<std::string>& include_dirs = {},
                          const schema::ResolveOptions& options = {});

Compilation compile_source(std::string_view source, std::string_view name = "schema.bop",
                           const schema::ResolveOptions& options = {});

}  // namespace bebop
