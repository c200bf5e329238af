#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <queue>
#include <set>

#include "bebop/descriptor.hpp"
#include "bebop/routing.hpp"
#include "bebop/schema/resolver.hpp"

namespace bebop {

namespace {

using schema::Definition;
using schema::TypeExpr;

TypeDescriptor lower_type(const TypeExpr& t) {
  switch (t.kind) {
    case TypeExpr::Kind::Primitive: return TypeDescriptor::primitive(t.primitive);
    case TypeExpr::Kind::String: return TypeDescriptor::string();
    case TypeExpr::Kind::Named: return TypeDescriptor::defined(t.resolved.empty() ? t.name : t.resolved);
    case TypeExpr::Kind::Array: return TypeDescriptor::array(lower_type(t.args[0]));
    case TypeExpr::Kind::FixedArray: return TypeDescriptor::fixed_array(lower_type(t.args[0]), t.fixed_length);
    case TypeExpr::Kind::Map: return TypeDescriptor::map(lower_type(t.args[0]), lower_type(t.args[1]));
  }
  return {};
}

std::vector<DecoratorUsage> lower_decorators(const std::vector<schema::DecoratorUse>& uses) {
  std::vector<DecoratorUsage> out;
  for (const auto& u : uses) {
    DecoratorUsage d;
    d.name = u.name;
    for (const auto& a : u.args) d.arguments.push_back({a.name, a.value});
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<FieldDescriptor> lower_fields(const std::vector<schema::Field>& fields) {
  std::vector<FieldDescriptor> out;
  for (const auto& f : fields) {
    FieldDescriptor d;
    d.name = f.name;
    d.type = lower_type(f.type);
    d.tag = f.tag.value_or(0);
    d.documentation = f.doc;
    d.decorators = lower_decorators(f.decorators);
    out.push_back(std::move(d));
  }
  return out;
}

// Every fqn a definition (or anything nested in it) refers to.
void collect_refs(const TypeExpr& t, std::set<std::string>& out) {
  if (t.kind == TypeExpr::Kind::Named && !t.resolved.empty()) out.insert(t.resolved);
  for (const auto& a : t.args) collect_refs(a, out);
}

void collect_refs(const Definition& def, std::set<std::string>& out) {
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, schema::StructBody> || std::is_same_v<T, schema::MessageBody>) {
          for (const auto& f : body.fields) collect_refs(f.type, out);
        } else if constexpr (std::is_same_v<T, schema::UnionBody>) {
          for (const auto& b : body.branches) collect_refs(b.type, out);
        } else if constexpr (std::is_same_v<T, schema::ServiceBody>) {
          for (const auto& inc : body.includes) out.insert(inc.resolved);
          for (const auto& m : body.methods) {
            collect_refs(m.request, out);
            collect_refs(m.response, out);
          }
        }
      },
      def.body);
  for (const auto& n : def.nested) collect_refs(n, out);
}

bool within(std::string_view fqn, std::string_view root) {
  return fqn == root || (fqn.size() > root.size() && fqn.substr(0, root.size()) == root && fqn[root.size()] == '.');
}

/// Order of `defs` (indices) with dependencies first. Strongly connected
/// groups stay together in source order; ready groups are emitted by the
/// position of their first member.
std::vector<std::size_t> topo_order(const std::vector<const Definition*>& defs) {
  const std::size_t n = defs.size();
  std::vector<std::vector<std::size_t>> deps(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> refs;
    collect_refs(*defs[i], refs);
    std::set<std::size_t> targets;
    for (const auto& r : refs) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && within(r, defs[j]->fqn)) targets.insert(j);
      }
    }
    deps[i].assign(targets.begin(), targets.end());
  }

  // Tarjan.
  std::vector<int> index(n, -1);
  std::vector<int> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<int> comp(n, -1);
  int counter = 0;
  int comps = 0;
  std::function<void(std::size_t)> strong = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : deps[v]) {
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      for (;;) {
        const std::size_t w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = comps;
        if (w == v) break;
      }
      ++comps;
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) strong(v);
  }

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(comps));
  for (std::size_t v = 0; v < n; ++v) members[static_cast<std::size_t>(comp[v])].push_back(v);
  std::vector<std::set<int>> comp_deps(static_cast<std::size_t>(comps));
  std::vector<std::set<int>> comp_users(static_cast<std::size_t>(comps));
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w : deps[v]) {
      if (comp[v] != comp[w]) {
        comp_deps[static_cast<std::size_t>(comp[v])].insert(comp[w]);
        comp_users[static_cast<std::size_t>(comp[w])].insert(comp[v]);
      }
    }
  }
  // Members are already ascending, so members[c][0] is the first appearance.
  using Item = std::pair<std::size_t, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  std::vector<std::size_t> pending(static_cast<std::size_t>(comps));
  for (int c = 0; c < comps; ++c) {
    pending[static_cast<std::size_t>(c)] = comp_deps[static_cast<std::size_t>(c)].size();
    if (pending[static_cast<std::size_t>(c)] == 0) ready.emplace(members[static_cast<std::size_t>(c)][0], c);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const int c = ready.top().second;
    ready.pop();
    for (std::size_t v : members[static_cast<std::size_t>(c)]) order.push_back(v);
    for (int u : comp_users[static_cast<std::size_t>(c)]) {
      if (--pending[static_cast<std::size_t>(u)] == 0) ready.emplace(members[static_cast<std::size_t>(u)][0], u);
    }
  }
  return order;
}

struct RouteOwner {
  std::string method;
  std::string path;
  Span span;
};

class Builder {
 public:
  DescriptorSet run(const schema::ResolvedSchema& resolved) {
    DescriptorSet set;
    for (const auto& file : resolved.files) {
      SchemaDescriptor sd;
      sd.name = file.file;
      sd.package = file.package.value_or("");
      sd.definitions = lower_list(file.definitions);
      set.schemas.push_back(std::move(sd));
    }
    return set;
  }

 private:
  std::vector<DefinitionDescriptor> lower_list(const std::vector<Definition>& defs) {
    std::vector<const Definition*> kept;
    for (const auto& d : defs) {
      if (d.kind != DefinitionKind::Decorator) kept.push_back(&d);
    }
    std::vector<DefinitionDescriptor> out;
    for (std::size_t i : topo_order(kept)) out.push_back(lower(*kept[i]));
    return out;
  }

  DefinitionDescriptor lower(const Definition& def) {
    DefinitionDescriptor d;
    d.kind = def.kind;
    d.name = def.name;
    d.fqn = def.fqn;
    d.documentation = def.doc;
    d.visibility = def.visibility;
    d.decorators = lower_decorators(def.decorators);
    d.nested = lower_list(def.nested);
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, schema::EnumBody>) {
            EnumDef e;
            e.base = body.base;
            for (const auto& m : body.members) {
              e.members.push_back({m.name, m.value, m.doc, lower_decorators(m.decorators)});
            }
            d.enum_def = std::move(e);
          } else if constexpr (std::is_same_v<T, schema::StructBody>) {
            d.struct_def = StructDef{lower_fields(body.fields), body.is_mutable};
          } else if constexpr (std::is_same_v<T, schema::MessageBody>) {
            d.message_def = MessageDef{lower_fields(body.fields)};
          } else if constexpr (std::is_same_v<T, schema::UnionBody>) {
            UnionDef u;
            for (const auto& b : body.branches) {
              UnionBranchDescriptor bd;
              bd.discriminator = static_cast<std::uint8_t>(b.discriminator);
              bd.name = b.name;
              bd.type_fqn = b.type.resolved.empty() ? b.type.name : b.type.resolved;
              bd.documentation = b.doc;
              bd.decorators = lower_decorators(b.decorators);
              bd.is_inline = b.is_inline;
              u.branches.push_back(std::move(bd));
            }
            d.union_def = std::move(u);
          } else if constexpr (std::is_same_v<T, schema::ServiceBody>) {
            ServiceDef s;
            for (const auto& m : body.methods) {
              MethodDescriptor md;
              md.name = m.name;
              md.request_type = m.request.resolved;
              md.response_type = m.response.resolved;
              md.request_stream = m.request_stream;
              md.response_stream = m.response_stream;
              md.routing_id = method_routing_id(def.name, m.name);
              md.documentation = m.doc;
              md.decorators = lower_decorators(m.decorators);
              claim_route(md.routing_id, def.fqn + "." + m.name, "/" + def.name + "/" + m.name, m.span);
              s.methods.push_back(std::move(md));
            }
            d.service_def = std::move(s);
          } else if constexpr (std::is_same_v<T, schema::ConstBody>) {
            d.const_def = ConstDef{lower_type(body.type), body.value};
          }
        },
        def.body);
    return d;
  }

  void claim_route(std::uint32_t id, std::string method, std::string path, const Span& span) {
    char hex[16];
    std::snprintf(hex, sizeof hex, "0x%08x", id);
    if (is_reserved_routing_id(id)) {
      throw Error(ErrorCode::ReservedCollision,
                  "routing id " + std::string(hex) + " of " + path + " is reserved for protocol methods", span);
    }
    auto [it, inserted] = routes_.emplace(id, RouteOwner{method, path, span});
    if (!inserted && it->second.method != method) {
      throw Error(ErrorCode::ReservedCollision,
                  "routing id " + std::string(hex) + " of " + path + " collides with " + it->second.path + " of " + it->second.method + " (" +
                      format_span(it->second.span) + ")",
                  span);
    }
  }

  std::map<std::uint32_t, RouteOwner> routes_;
};

}  // namespace

DescriptorSet build_descriptor_set(const schema::ResolvedSchema& resolved) { return Builder().run(resolved); }

}  // namespace bebop
