#include "bebop/evolution.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace bebop {

namespace {

using DefMap = std::map<std::string, const DefinitionDescriptor*>;

void flatten(const DefinitionDescriptor& d, DefMap& out, std::vector<std::string>& order) {
  if (out.emplace(d.fqn, &d).second) order.push_back(d.fqn);
  for (const auto& n : d.nested) flatten(n, out, order);
}

bool is_deprecated(const std::vector<DecoratorUsage>& decorators) {
  return std::any_of(decorators.begin(), decorators.end(), [](const DecoratorUsage& u) {
    return u.name == "deprecated" || u.name == "bebop.deprecated";
  });
}

class Checker {
 public:
  std::vector<Change> run(const DescriptorSet& before, const DescriptorSet& after) {
    DefMap old_defs, new_defs;
    std::vector<std::string> old_order, new_order;
    for (const auto& s : before.schemas) {
      for (const auto& d : s.definitions) flatten(d, old_defs, old_order);
    }
    for (const auto& s : after.schemas) {
      for (const auto& d : s.definitions) flatten(d, new_defs, new_order);
    }
    for (const auto& fqn : old_order) {
      const auto it = new_defs.find(fqn);
      if (it == new_defs.end()) {
        add(fqn, "Remove definition", Verdict::Breaking, "Existing data and peers still use it");
        continue;
      }
      compare(*old_defs.at(fqn), *it->second);
    }
    for (const auto& fqn : new_order) {
      if (!old_defs.count(fqn)) add(fqn, "Add definition", Verdict::Safe, "");
    }
    return std::move(changes_);
  }

 private:
  void add(std::string subject, std::string change, Verdict v, std::string reason) {
    changes_.push_back({std::move(subject), std::move(change), v, std::move(reason)});
  }

  void compare(const DefinitionDescriptor& a, const DefinitionDescriptor& b) {
    if (a.kind != b.kind) {
      add(a.fqn, "Change definition kind", Verdict::Breaking,
          std::string(to_string(a.kind)) + " became " + std::string(to_string(b.kind)));
      return;
    }
    if (a.message_def) compare_message(a.fqn, *a.message_def, *b.message_def);
    if (a.struct_def) compare_struct(a.fqn, *a.struct_def, *b.struct_def);
    if (a.union_def) compare_union(a.fqn, *a.union_def, *b.union_def);
    if (a.enum_def) compare_enum(a.fqn, *a.enum_def, *b.enum_def);
    if (a.service_def) compare_service(a.fqn, *a.service_def, *b.service_def);
    if (a.const_def && !(a.const_def->type == b.const_def->type)) {
      add(a.fqn, "Change const type", Verdict::Breaking, "");
    }
  }

  void compare_message(const std::string& fqn, const MessageDef& a, const MessageDef& b) {
    std::map<std::uint32_t, const FieldDescriptor*> old_tags, new_tags;
    std::map<std::string, std::uint32_t> old_names, new_names;
    for (const auto& f : a.fields) {
      old_tags[f.tag] = &f;
      old_names[f.name] = f.tag;
    }
    for (const auto& f : b.fields) {
      new_tags[f.tag] = &f;
      new_names[f.name] = f.tag;
    }
    std::set<std::string> retagged;
    for (const auto& f : b.fields) {
      const auto was = old_names.find(f.name);
      if (was != old_names.end() && was->second != f.tag && !new_tags.count(was->second)) {
        retagged.insert(f.name);
        add(fqn + "." + f.name, "Change tag number", Verdict::Breaking, "Equivalent to remove + add");
      }
    }
    for (const auto& f : b.fields) {
      const auto it = old_tags.find(f.tag);
      if (it == old_tags.end()) {
        if (!retagged.count(f.name)) add(fqn + "." + f.name, "Add field", Verdict::Safe, "Use new tag; old readers ignore");
        continue;
      }
      const FieldDescriptor& o = *it->second;
      if (!(o.type == f.type)) {
        add(fqn + "." + f.name, "Change field type", Verdict::Breaking, "Never reuse tag with different type");
      }
      if (o.name != f.name) {
        add(fqn + "." + o.name, "Rename field", Verdict::Safe, "Names not on wire");
      }
      if (!is_deprecated(o.decorators) && is_deprecated(f.decorators)) {
        add(fqn + "." + f.name, "Deprecate field", Verdict::Safe, "Skipped on wire; don't reuse tag");
      }
    }
    for (const auto& f : a.fields) {
      if (!new_tags.count(f.tag) && !retagged.count(f.name)) {
        add(fqn + "." + f.name, "Remove field", Verdict::Breaking,
            "Readers stop at unknown tags; deprecate instead");
      }
    }
  }

  void compare_struct(const std::string& fqn, const StructDef& a, const StructDef& b) {
    std::map<std::string, const FieldDescriptor*> old_by_name, new_by_name;
    for (const auto& f : a.fields) old_by_name[f.name] = &f;
    for (const auto& f : b.fields) new_by_name[f.name] = &f;
    bool structural = false;
    for (const auto& f : b.fields) {
      if (!old_by_name.count(f.name) && a.fields.size() < b.fields.size()) {
        add(fqn + "." + f.name, "Add field", Verdict::Breaking, "Positional encoding; no tags");
        structural = true;
      }
    }
    for (const auto& f : a.fields) {
      if (!new_by_name.count(f.name) && a.fields.size() > b.fields.size()) {
        add(fqn + "." + f.name, "Remove field", Verdict::Breaking, "Create versioned type instead");
        structural = true;
      }
    }
    if (structural) return;

    if (a.fields.size() == b.fields.size()) {
      bool same_names = true;
      for (const auto& f : a.fields) same_names = same_names && new_by_name.count(f.name);
      bool moved = false;
      for (std::size_t i = 0; i < a.fields.size(); ++i) moved = moved || a.fields[i].name != b.fields[i].name;
      if (same_names && moved) {
        add(fqn, "Reorder fields", Verdict::Breaking, "Or convert to message");
        return;
      }
      for (std::size_t i = 0; i < a.fields.size(); ++i) {
        const auto& o = a.fields[i];
        const auto& n = b.fields[i];
        if (!(o.type == n.type)) {
          add(fqn + "." + n.name, "Change field type", Verdict::Breaking, "");
        } else if (o.name != n.name) {
          add(fqn + "." + o.name, "Rename field", Verdict::Safe, "Names not on wire");
        }
      }
    }
  }

  void compare_union(const std::string& fqn, const UnionDef& a, const UnionDef& b) {
    std::map<std::uint8_t, const UnionBranchDescriptor*> old_disc, new_disc;
    for (const auto& br : a.branches) old_disc[br.discriminator] = &br;
    for (const auto& br : b.branches) new_disc[br.discriminator] = &br;
    for (const auto& br : b.branches) {
      const auto it = old_disc.find(br.discriminator);
      if (it == old_disc.end()) {
        add(fqn + "." + br.name, "Add branch", Verdict::Safe, "");
      } else if (it->second->type_fqn != br.type_fqn || it->second->is_inline != br.is_inline) {
        add(fqn + "." + br.name, "Change branch type", Verdict::Breaking, "");
      }
    }
    for (const auto& br : a.branches) {
      if (!new_disc.count(br.discriminator)) {
        add(fqn + "." + br.name, "Remove branch", Verdict::Breaking, "Decode fails for existing data");
      }
    }
  }

  void compare_enum(const std::string& fqn, const EnumDef& a, const EnumDef& b) {
    if (a.base != b.base) {
      add(fqn, "Change base type", Verdict::Breaking,
          to_string(TypeDescriptor::primitive(a.base)) + " to " + to_string(TypeDescriptor::primitive(b.base)));
      return;
    }
    std::map<std::uint64_t, const EnumMemberDescriptor*> old_vals, new_vals;
    for (const auto& m : a.members) old_vals[m.value] = &m;
    for (const auto& m : b.members) new_vals[m.value] = &m;
    for (const auto& m : b.members) {
      const auto it = old_vals.find(m.value);
      if (it == old_vals.end()) {
        add(fqn + "." + m.name, "Add value", Verdict::Safe, "");
      } else if (it->second->name != m.name) {
        add(fqn + "." + it->second->name, "Rename value", Verdict::Safe, "Names not on wire");
      }
    }
    for (const auto& m : a.members) {
      if (!new_vals.count(m.value)) {
        add(fqn + "." + m.name, "Remove value", Verdict::Breaking, "Existing data may contain it");
      }
    }
  }

  void compare_service(const std::string& fqn, const ServiceDef& a, const ServiceDef& b) {
    std::map<std::string, const MethodDescriptor*> old_methods;
    for (const auto& m : a.methods) old_methods[m.name] = &m;
    std::set<std::string> seen;
    for (const auto& m : b.methods) {
      seen.insert(m.name);
      const auto it = old_methods.find(m.name);
      if (it == old_methods.end()) {
        add(fqn + "." + m.name, "Add method", Verdict::Safe, "");
        continue;
      }
      const MethodDescriptor& o = *it->second;
      if (o.request_type != m.request_type || o.response_type != m.response_type) {
        add(fqn + "." + m.name, "Change method types", Verdict::Breaking, "");
      }
      if (o.request_stream != m.request_stream || o.response_stream != m.response_stream) {
        add(fqn + "." + m.name, "Change method streaming", Verdict::Breaking, "");
      }
    }
    for (const auto& m : a.methods) {
      if (!seen.count(m.name)) add(fqn + "." + m.name, "Remove method", Verdict::Breaking, "Existing clients still call it");
    }
  }

  std::vector<Change> changes_;
};

}  // namespace

std::vector<Change> check_evolution(const DescriptorSet& before, const DescriptorSet& after) {
  return Checker().run(before, after);
}

bool has_breaking(const std::vector<Change>& changes) noexcept {
  return std::any_of(changes.begin(), changes.end(), [](const Change& c) { return c.verdict == Verdict::Breaking; });
}

std::string format_change(const Change& change) {
  std::string out = change.verdict == Verdict::Breaking ? "breaking: " : "safe: ";
  out += change.subject + ": " + change.change;
  if (!change.reason.empty()) out += " (" + change.reason + ")";
  return out;
}

}  // namespace bebop
