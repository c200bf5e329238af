#include "bebop/descriptor.hpp"

namespace bebop {

std::string to_string(const TypeDescriptor& type) {
  if (is_primitive(type.kind)) return std::string(primitive_name(primitive_of(type.kind)));
  switch (type.kind) {
    case TypeKind::String: return "string";
    case TypeKind::Array: return (type.element ? to_string(*type.element) : "?") + "[]";
    case TypeKind::FixedArray:
      return (type.element ? to_string(*type.element) : "?") + "[" + std::to_string(type.fixed_length) + "]";
    case TypeKind::Map:
      return "map[" + (type.key ? to_string(*type.key) : "?") + ", " + (type.value ? to_string(*type.value) : "?") +
             "]";
    case TypeKind::Defined: return type.defined_fqn;
    default: return "unknown";
  }
}

namespace {

const DefinitionDescriptor* find_in(const std::vector<DefinitionDescriptor>& defs, std::string_view fqn) {
  for (const auto& d : defs) {
    if (d.fqn == fqn) return &d;
    if (fqn.size() > d.fqn.size() && fqn.substr(0, d.fqn.size()) == d.fqn && fqn[d.fqn.size()] == '.') {
      if (const auto* hit = find_in(d.nested, fqn)) return hit;
    }
  }
  return nullptr;
}

}  // namespace

const DefinitionDescriptor* find_definition(const DescriptorSet& set, std::string_view fqn) {
  for (const auto& s : set.schemas) {
    if (const auto* hit = find_in(s.definitions, fqn)) return hit;
  }
  return nullptr;
}

TypeRegistry::TypeRegistry(DescriptorSet set) : TypeRegistry(std::make_shared<const DescriptorSet>(std::move(set))) {}

TypeRegistry::TypeRegistry(std::shared_ptr<const DescriptorSet> set) : set_(std::move(set)) { index(*set_); }

void TypeRegistry::add(std::shared_ptr<const DescriptorSet> set) {
  index(*set);
  extra_.push_back(std::move(set));
}

void TypeRegistry::index(const DescriptorSet& set) {
  for (const auto& s : set.schemas) {
    for (const auto& d : s.definitions) index(d);
  }
}

void TypeRegistry::index(const DefinitionDescriptor& def) {
  by_fqn_.emplace(def.fqn, &def);
  for (const auto& n : def.nested) index(n);
}

const DefinitionDescriptor* TypeRegistry::find(std::string_view fqn) const {
  auto it = by_fqn_.find(fqn);
  return it == by_fqn_.end() ? nullptr : it->second;
}

const DefinitionDescriptor& TypeRegistry::get(std::string_view fqn) const {
  const auto* def = find(fqn);
  if (!def) throw Error(ErrorCode::UnresolvedType, "no definition named '" + std::string(fqn) + "'");
  return *def;
}

}  // namespace bebop
