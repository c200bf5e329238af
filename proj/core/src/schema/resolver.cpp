#include "bebop/schema/resolver.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bebop/schema/literals.hpp"
#include "bebop/schema/parser.hpp"

namespace bebop::schema {

namespace {

constexpr std::string_view kPrelude = R"(edition = "2026"
package bebop

/// Marks an element as deprecated. Generators may warn on use.
#decorator(deprecated) {
  targets = ALL
  param reason?: string
}
)";

std::string parent_scope(std::string_view fqn) {
  const auto dot = fqn.rfind('.');
  if (dot == std::string_view::npos) return {};
  return std::string(fqn.substr(0, dot));
}

std::string join(std::string_view scope, std::string_view name) {
  if (scope.empty()) return std::string(name);
  std::string out(scope);
  out += '.';
  out += name;
  return out;
}

std::uint16_t target_for(DefinitionKind kind) {
  switch (kind) {
    case DefinitionKind::Enum: return static_cast<std::uint16_t>(DecoratorTarget::Enum);
    case DefinitionKind::Struct: return static_cast<std::uint16_t>(DecoratorTarget::Struct);
    case DefinitionKind::Message: return static_cast<std::uint16_t>(DecoratorTarget::Message);
    case DefinitionKind::Union: return static_cast<std::uint16_t>(DecoratorTarget::Union);
    case DefinitionKind::Service: return static_cast<std::uint16_t>(DecoratorTarget::Service);
    default: return 0;
  }
}

class Resolver {
 public:
  Resolver(const ImportLoader& loader, const ResolveOptions& options)
      : loader_(loader), options_(options) {
    prelude_ = parse_source(kPrelude, kPreludePath);
    for (auto& def : prelude_.definitions) {
      def.fqn = join(prelude_.package.value_or(""), def.name);
    }
  }

  ResolvedSchema run(const std::vector<SourceFile>& roots) {
    for (const auto& root : roots) {
      load(root, nullptr);
      out_.roots.push_back(root.name);
    }
    for (std::size_t i = 0; i < out_.files.size(); ++i) {
      for (std::size_t d = 0; d < out_.files[i].definitions.size(); ++d) {
        register_definition(out_.files[i].definitions[d], out_.files[i].package.value_or(""), i, {d});
      }
    }
    for (std::size_t i = 0; i < out_.files.size(); ++i) {
      for (auto& def : out_.files[i].definitions) bind_definition(def, i);
    }
    check_struct_recursion();
    for (std::size_t i = 0; i < out_.files.size(); ++i) {
      for (auto& def : out_.files[i].definitions) check_decorators(def, i);
    }
    flatten_services();
    return std::move(out_);
  }

 private:
  // ---- loading ----

  std::size_t load(const SourceFile& file, const Span* from) {
    if (auto it = loaded_.find(file.name); it != loaded_.end()) return it->second;
    if (visiting_.count(file.name)) {
      throw Error(ErrorCode::ImportCycle, "import cycle through '" + file.name + "'", from ? *from : Span{});
    }
    visiting_.insert(file.name);
    SchemaAst ast = parse_source(file.content, file.name, &out_.warnings);
    std::set<std::size_t> reach;
    for (const auto& imp : ast.imports) {
      if (imp.path == kPreludePath) continue;
      auto src = loader_ ? loader_(imp.path, file.name) : std::nullopt;
      if (!src) {
        throw Error(ErrorCode::UnresolvedImport, "cannot find import \"" + imp.path + "\"", imp.span);
      }
      const std::size_t idx = load(*src, &imp.span);
      reach.insert(idx);
      reach.insert(closure_[idx].begin(), closure_[idx].end());
    }
    visiting_.erase(file.name);
    const std::size_t idx = out_.files.size();
    reach.insert(idx);
    out_.files.push_back(std::move(ast));
    closure_.push_back(std::move(reach));
    loaded_[file.name] = idx;
    return idx;
  }

  // ---- symbols ----

  void register_definition(Definition& def, const std::string& scope, std::size_t file,
                           std::vector<std::size_t> path) {
    def.fqn = join(scope, def.name);
    if (auto it = out_.index.find(def.fqn); it != out_.index.end()) {
      throw Error(ErrorCode::DuplicateDefinition,
                  "'" + def.fqn + "' is already defined in " + out_.files[it->second.file].file, def.span);
    }
    out_.index[def.fqn] = ResolvedSchema::Location{file, path};
    for (std::size_t n = 0; n < def.nested.size(); ++n) {
      auto sub = path;
      sub.push_back(n);
      register_definition(def.nested[n], def.fqn, file, std::move(sub));
    }
  }

  Definition* lookup(std::string_view name, std::string_view scope, std::size_t file, const Span& span) {
    std::string s(scope);
    for (;;) {
      const std::string candidate = join(s, name);
      if (auto it = out_.index.find(candidate); it != out_.index.end()) {
        Definition* def = const_cast<Definition*>(out_.find(candidate));
        const std::size_t def_file = it->second.file;
        if (def_file != file) {
          if (!closure_[file].count(def_file)) {
            throw Error(ErrorCode::UnresolvedType,
                        "'" + candidate + "' is defined in " + out_.files[def_file].file + ", which is not imported",
                        span);
          }
          if (def->visibility == Visibility::Local) {
            throw Error(ErrorCode::UnresolvedType,
                        "'" + candidate + "' is local to " + out_.files[def_file].file, span);
          }
        }
        return def;
      }
      if (s.empty()) break;
      s = parent_scope(s);
    }
    return nullptr;
  }

  Definition& require(std::string_view name, std::string_view scope, std::size_t file, const Span& span) {
    Definition* def = lookup(name, scope, file, span);
    if (!def) throw Error(ErrorCode::UnresolvedType, "unknown type '" + std::string(name) + "'", span);
    return *def;
  }

  // ---- binding ----

  void bind_type(TypeExpr& t, std::string_view scope, std::size_t file) {
    for (auto& arg : t.args) bind_type(arg, scope, file);
    if (t.kind != TypeExpr::Kind::Named) return;
    Definition& def = require(t.name, scope, file, t.span);
    switch (def.kind) {
      case DefinitionKind::Enum:
      case DefinitionKind::Struct:
      case DefinitionKind::Message:
      case DefinitionKind::Union: break;
      default:
        throw Error(ErrorCode::InvalidTypeUse,
                    "'" + t.name + "' is a " + std::string(to_string(def.kind)) + ", not a type", t.span);
    }
    t.resolved = def.fqn;
    t.resolved_kind = def.kind;
  }

  void bind_fields(std::vector<Field>& fields, std::string_view scope, std::size_t file) {
    for (auto& f : fields) bind_type(f.type, scope, file);
  }

  void bind_definition(Definition& def, std::size_t file) {
    std::visit(
        [&](auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, StructBody> || std::is_same_v<T, MessageBody>) {
            bind_fields(body.fields, def.fqn, file);
          } else if constexpr (std::is_same_v<T, UnionBody>) {
            for (auto& b : body.branches) {
              bind_type(b.type, def.fqn, file);
              if (b.type.resolved_kind == DefinitionKind::Enum) {
                throw Error(ErrorCode::InvalidTypeUse, "union branch '" + b.name + "' cannot be an enum",
                            b.type.span);
              }
            }
          } else if constexpr (std::is_same_v<T, ServiceBody>) {
            for (auto& inc : body.includes) {
              Definition* target = lookup(inc.name, def.fqn, file, inc.span);
              if (!target) throw Error(ErrorCode::UnresolvedType, "unknown service '" + inc.name + "'", inc.span);
              if (target->kind != DefinitionKind::Service) {
                throw Error(ErrorCode::InvalidTypeUse, "'" + inc.name + "' is not a service", inc.span);
              }
              inc.resolved = target->fqn;
            }
            for (auto& m : body.methods) {
              m.origin = def.fqn;
              bind_method_type(m.request, def.fqn, file);
              bind_method_type(m.response, def.fqn, file);
            }
          } else if constexpr (std::is_same_v<T, ConstBody>) {
            if (auto* text = std::get_if<std::string>(&body.value.value)) {
              *text = substitute_env(*text, def.span);
            }
          }
        },
        def.body);
    for (auto& nested : def.nested) bind_definition(nested, file);
  }

  void bind_method_type(TypeExpr& t, std::string_view scope, std::size_t file) {
    bind_type(t, scope, file);
    if (t.resolved_kind == DefinitionKind::Enum) {
      throw Error(ErrorCode::InvalidTypeUse,
                  "method request and response types must be named struct, message, or union definitions", t.span);
    }
  }

  std::string substitute_env(const std::string& text, const Span& span) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
      if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '(') {
        const auto close = text.find(')', i + 2);
        if (close != std::string::npos) {
          const std::string var = text.substr(i + 2, close - i - 2);
          const bool valid = !var.empty() && var.find_first_not_of(
                                                 "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_") ==
                                                 std::string::npos;
          if (valid) {
            auto value = options_.env ? options_.env(var) : std::nullopt;
            if (!value) {
              throw Error(ErrorCode::UndefinedEnvVar, "environment variable '" + var + "' is not set", span);
            }
            out += *value;
            i = close + 1;
            continue;
          }
        }
      }
      out += text[i++];
    }
    return out;
  }

  // ---- service composition ----

  void flatten_services() {
    std::vector<Definition*> services;
    for (auto& [fqn, loc] : out_.index) {
      auto* def = const_cast<Definition*>(out_.find(fqn));
      if (def->kind == DefinitionKind::Service) services.push_back(def);
    }
    std::map<std::string, std::vector<Method>> own;
    for (auto* s : services) own[s->fqn] = s->as<ServiceBody>().methods;
    std::map<std::string, std::vector<Method>> done;
    std::set<std::string> active;
    for (auto* s : services) flatten(*s, own, done, active);
    for (auto* s : services) s->as<ServiceBody>().methods = done[s->fqn];
  }

  const std::vector<Method>& flatten(const Definition& svc, const std::map<std::string, std::vector<Method>>& own,
                                     std::map<std::string, std::vector<Method>>& done,
                                     std::set<std::string>& active) {
    if (auto it = done.find(svc.fqn); it != done.end()) return it->second;
    if (!active.insert(svc.fqn).second) {
      throw Error(ErrorCode::InvalidTypeUse, "service '" + svc.fqn + "' includes itself", svc.span);
    }
    std::vector<Method> methods;
    std::map<std::string, std::string> origin_of;
    auto add = [&](const Method& m, const Span& at) {
      if (auto it = origin_of.find(m.name); it != origin_of.end()) {
        if (it->second == m.origin) return;  // same method reached twice
        throw Error(ErrorCode::MethodNameCollision,
                    "method '" + m.name + "' from " + m.origin + " collides with the one from " + it->second +
                        " in service " + svc.fqn,
                    at);
      }
      origin_of[m.name] = m.origin;
      methods.push_back(m);
    };
    for (const auto& inc : svc.as<ServiceBody>().includes) {
      const Definition* target = out_.find(inc.resolved);
      for (const auto& m : flatten(*target, own, done, active)) add(m, inc.span);
    }
    for (const auto& m : own.at(svc.fqn)) add(m, m.span);
    active.erase(svc.fqn);
    return done[svc.fqn] = std::move(methods);
  }

  // ---- recursion ----

  void collect_by_value(const TypeExpr& t, std::vector<std::pair<std::string, Span>>& out) {
    if (t.kind == TypeExpr::Kind::Named && t.resolved_kind == DefinitionKind::Struct) {
      out.emplace_back(t.resolved, t.span);
    } else if (t.kind == TypeExpr::Kind::FixedArray) {
      collect_by_value(t.args[0], out);
    }
  }

  void check_struct_recursion() {
    std::map<std::string, std::vector<std::pair<std::string, Span>>> edges;
    for (auto& [fqn, loc] : out_.index) {
      const Definition* def = out_.find(fqn);
      if (def->kind != DefinitionKind::Struct) continue;
      auto& e = edges[fqn];
      for (const auto& f : def->as<StructBody>().fields) collect_by_value(f.type, e);
    }
    std::map<std::string, int> color;
    std::function<void(const std::string&)> dfs = [&](const std::string& s) {
      color[s] = 1;
      for (const auto& [to, span] : edges[s]) {
        if (color[to] == 1) {
          throw Error(ErrorCode::RecursiveStruct,
                      "struct '" + to + "' contains itself by value; use a message, union, array, or map to break "
                      "the cycle",
                      span);
        }
        if (color[to] == 0) dfs(to);
      }
      color[s] = 2;
    };
    for (auto& [s, e] : edges) {
      if (color[s] == 0) dfs(s);
    }
  }

  // ---- decorators ----

  const Definition* find_decorator(const std::string& name, std::string_view scope, std::size_t file,
                                   const Span& span) {
    const Definition* def = lookup(name, scope, file, span);
    if (!def) {
      for (const auto& p : prelude_.definitions) {
        if (p.name == name || p.fqn == name) def = &p;
      }
    }
    if (!def) throw Error(ErrorCode::InvalidDecorator, "unknown decorator '@" + name + "'", span);
    if (def->kind != DefinitionKind::Decorator) {
      throw Error(ErrorCode::InvalidDecorator, "'" + name + "' is not a decorator", span);
    }
    return def;
  }

  void apply_decorators(std::vector<DecoratorUse>& uses, std::uint16_t target, std::string_view what,
                        std::string_view scope, std::size_t file) {
    for (auto& use : uses) {
      const Definition* decl = find_decorator(use.name, scope, file, use.span);
      const auto& body = decl->as<DecoratorBody>();
      if ((body.targets & target) == 0) {
        throw Error(ErrorCode::InvalidDecorator,
                    "decorator '@" + use.name + "' cannot be applied to " + std::string(what), use.span);
      }
      std::vector<DecoratorArg> named(body.params.size());
      std::vector<bool> seen(body.params.size(), false);
      std::size_t positional = 0;
      for (auto& arg : use.args) {
        std::size_t slot = 0;
        if (arg.name.empty()) {
          slot = positional++;
          if (slot >= body.params.size()) {
            throw Error(ErrorCode::InvalidDecorator, "too many arguments for '@" + use.name + "'", arg.span);
          }
        } else {
          bool found = false;
          for (std::size_t i = 0; i < body.params.size(); ++i) {
            if (body.params[i].name == arg.name) {
              slot = i;
              found = true;
            }
          }
          if (!found) {
            throw Error(ErrorCode::InvalidDecorator,
                        "'@" + use.name + "' has no parameter named '" + arg.name + "'", arg.span);
          }
        }
        if (seen[slot]) {
          throw Error(ErrorCode::InvalidDecorator,
                      "parameter '" + body.params[slot].name + "' given twice", arg.span);
        }
        seen[slot] = true;
        auto value = coerce_literal(arg.value, body.params[slot].type);
        if (!value) {
          throw Error(ErrorCode::InvalidDecorator,
                      "argument for '" + body.params[slot].name + "' has the wrong type", arg.span);
        }
        named[slot] = DecoratorArg{body.params[slot].name, std::move(*value), arg.span};
      }
      std::vector<DecoratorArg> args;
      for (std::size_t i = 0; i < body.params.size(); ++i) {
        if (!seen[i]) {
          if (body.params[i].required) {
            throw Error(ErrorCode::InvalidDecorator,
                        "'@" + use.name + "' requires parameter '" + body.params[i].name + "'", use.span);
          }
          continue;
        }
        args.push_back(std::move(named[i]));
      }
      use.args = std::move(args);
    }
  }

  void check_decorators(Definition& def, std::size_t file) {
    const std::string& scope = def.fqn;
    const auto field = static_cast<std::uint16_t>(DecoratorTarget::Field);
    apply_decorators(def.decorators, target_for(def.kind), "a " + std::string(to_string(def.kind)), scope, file);
    std::visit(
        [&](auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, StructBody> || std::is_same_v<T, MessageBody>) {
            for (auto& f : body.fields) apply_decorators(f.decorators, field, "a field", scope, file);
          } else if constexpr (std::is_same_v<T, EnumBody>) {
            for (auto& m : body.members) apply_decorators(m.decorators, field, "an enum member", scope, file);
          } else if constexpr (std::is_same_v<T, UnionBody>) {
            for (auto& b : body.branches) {
              apply_decorators(b.decorators, static_cast<std::uint16_t>(DecoratorTarget::Branch), "a union branch",
                               scope, file);
            }
          } else if constexpr (std::is_same_v<T, ServiceBody>) {
            for (auto& m : body.methods) {
              apply_decorators(m.decorators, static_cast<std::uint16_t>(DecoratorTarget::Method), "a method",
                               scope, file);
            }
          }
        },
        def.body);
    for (auto& nested : def.nested) check_decorators(nested, file);
  }

  const ImportLoader& loader_;
  const ResolveOptions& options_;
  SchemaAst prelude_;
  ResolvedSchema out_;
  std::map<std::string, std::size_t> loaded_;
  std::set<std::string> visiting_;
  std::vector<std::set<std::size_t>> closure_;
};

}  // namespace

const Definition* ResolvedSchema::find(std::string_view fqn) const {
  auto it = index.find(fqn);
  if (it == index.end()) return nullptr;
  const Location& loc = it->second;
  const Definition* def = &files[loc.file].definitions[loc.path[0]];
  for (std::size_t i = 1; i < loc.path.size(); ++i) def = &def->nested[loc.path[i]];
  return def;
}

int ResolvedSchema::file_of(std::string_view fqn) const {
  auto it = index.find(fqn);
  return it == index.end() ? -1 : static_cast<int>(it->second.file);
}

std::string_view prelude_source() noexcept { return kPrelude; }

ImportLoader filesystem_loader(std::vector<std::string> include_dirs) {
  namespace fs = std::filesystem;
  return [dirs = std::move(include_dirs)](std::string_view path,
                                          std::string_view importer) -> std::optional<SourceFile> {
    std::vector<fs::path> candidates;
    const fs::path rel(path);
    if (rel.is_absolute()) {
      candidates.push_back(rel);
    } else {
      if (!importer.empty()) candidates.push_back(fs::path(importer).parent_path() / rel);
      for (const auto& d : dirs) candidates.push_back(fs::path(d) / rel);
    }
    for (const auto& c : candidates) {
      std::error_code ec;
      if (!fs::is_regular_file(c, ec)) continue;
      std::ifstream in(c, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return SourceFile{fs::weakly_canonical(c, ec).string(), ss.str()};
    }
    return std::nullopt;
  };
}

ImportLoader memory_loader(std::vector<SourceFile> files) {
  return [files = std::move(files)](std::string_view path, std::string_view) -> std::optional<SourceFile> {
    for (const auto& f : files) {
      if (f.name == path) return f;
    }
    return std::nullopt;
  };
}

EnvLookup process_env() {
  return [](std::string_view name) -> std::optional<std::string> {
    const char* v = std::getenv(std::string(name).c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

ResolvedSchema resolve(const std::vector<SourceFile>& roots, const ImportLoader& loader,
                       const ResolveOptions& options) {
  return Resolver(loader, options).run(roots);
}

ResolvedSchema resolve_source(std::string_view source, std::string_view name, const ResolveOptions& options) {
  return resolve({SourceFile{std::string(name), std::string(source)}}, ImportLoader{}, options);
}

}  // namespace bebop::schema
