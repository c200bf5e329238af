#include "bebop/compiler.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace bebop {

namespace fs = std::filesystem;

std::string version_string() {
  return std::to_string(kCompilerVersion.major) + "." + std::to_string(kCompilerVersion.minor) + "." +
         std::to_string(kCompilerVersion.patch);
}

namespace {

std::string display_name(const std::string& canonical) {
  std::error_code ec;
  const fs::path rel = fs::relative(canonical, fs::current_path(ec), ec);
  if (ec || rel.empty()) return canonical;
  const std::string s = rel.generic_string();
  if (s.rfind("..", 0) == 0) return canonical;
  return s;
}

}  // namespace

Compilation compile_files(const std::vector<std::string>& paths, const std::vector<std::string>& include_dirs,
                          const schema::ResolveOptions& options) {
  std::vector<schema::SourceFile> roots;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::UnresolvedImport, "cannot read " + p);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::error_code ec;
    roots.push_back({fs::weakly_canonical(p, ec).string(), ss.str()});
  }
  Compilation c;
  c.resolved = schema::resolve(roots, schema::filesystem_loader(include_dirs), options);
  c.descriptors = build_descriptor_set(c.resolved);
  std::map<std::string, std::string> renamed;
  for (auto& s : c.descriptors.schemas) {
    const std::string shown = display_name(s.name);
    renamed[s.name] = shown;
    s.name = shown;
  }
  for (const auto& r : c.resolved.roots) c.roots.push_back(renamed.count(r) ? renamed[r] : r);
  return c;
}

Compilation compile_source(std::string_view source, std::string_view name, const schema::ResolveOptions& options) {
  Compilation c;
  c.resolved = schema::resolve_source(source, name, options);
  c.descriptors = build_descriptor_set(c.resolved);
  c.roots = c.resolved.roots;
  return c;
}

}  // namespace bebop
