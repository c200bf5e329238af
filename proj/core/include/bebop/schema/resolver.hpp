#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bebop/schema/ast.hpp"

namespace bebop::schema {

struct SourceFile {
  /// Canonical name; identical names are the same file.
  std::string name;
  std::string content;
};

/// Maps an import path, as written, to a file. `importer` is the canonical
/// name of the file containing the import.
using ImportLoader =
    std::function<std::optional<SourceFile>(std::string_view path, std::string_view importer)>;

/// Looks paths up relative to the importing file, then in each include dir.
ImportLoader filesystem_loader(std::vector<std::string> include_dirs = {});

/// Serves a fixed set of in-memory files by name; for tests and tools.
ImportLoader memory_loader(std::vector<SourceFile> files);

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

/// Reads the process environment.
EnvLookup process_env();

struct ResolveOptions {
  EnvLookup env = process_env();
};

/// Path of the built-in decorator prelude. Importing it is optional.
inline constexpr std::string_view kPreludePath = "bebop/decorators.bop";
std::string_view prelude_source() noexcept;

/// A compilation unit after name binding. Files are ordered so that every
/// file follows the files it imports; the root files come last.
struct ResolvedSchema {
  std::vector<SchemaAst> files;
  /// Names of the root files, in the order given.
  std::vector<std::string> roots;
  std::vector<Diagnostic> warnings;

  const Definition* find(std::string_view fqn) const;
  /// Index into `files` of the file that defines `fqn`, or -1.
  int file_of(std::string_view fqn) const;

  struct Location {
    std::size_t file = 0;
    std::vector<std::size_t> path;
  };
  std::map<std::string, Location, std::less<>> index;
};

/// Parses and binds `roots` together with everything they import.
/// Throws bebop::Error (with a span) on the first problem.
ResolvedSchema resolve(const std::vector<SourceFile>& roots, const ImportLoader& loader,
                       const ResolveOptions& options = {});

/// Single in-memory file with no imports besides the prelude.
ResolvedSchema resolve_source(std::string_view source, std::string_view name = "schema.bop",
                              const ResolveOptions& options = {});

}  // namespace bebop::schema
