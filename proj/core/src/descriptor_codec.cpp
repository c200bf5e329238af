// Descriptor sets travel as `bebop.DescriptorSet` messages. Only fields that
// differ from their defaults are written.

#include "bebop/descriptor.hpp"
#include "bebop/dynvalue.hpp"
#include "bebop/meta_schema.hpp"
#include "message_fields.hpp"

namespace bebop {

namespace {

using fields::In;
using fields::Out;
using fields::enum_u8;

Value to_value(const TypeDescriptor& t) {
  Out o;
  o.enumeration(1, static_cast<std::uint8_t>(t.kind));
  if (t.element) o.value(2, to_value(*t.element));
  if (t.key) o.value(3, to_value(*t.key));
  if (t.value) o.value(4, to_value(*t.value));
  o.num<std::uint32_t>(5, t.fixed_length);
  o.str(6, t.defined_fqn);
  return o.done();
}

TypeDescriptor type_from(const Value& v) {
  In in(v);
  TypeDescriptor t;
  const std::uint8_t kind = in.enumeration(1);
  if (kind > static_cast<std::uint8_t>(TypeKind::Defined)) {
    throw Error(ErrorCode::TypeMismatch, "unknown type kind " + std::to_string(kind));
  }
  t.kind = static_cast<TypeKind>(kind);
  if (const Value* e = in.get(2)) t.element = type_from(*e);
  if (const Value* k = in.get(3)) t.key = type_from(*k);
  if (const Value* x = in.get(4)) t.value = type_from(*x);
  t.fixed_length = in.num<std::uint32_t>(5);
  t.defined_fqn = in.str(6);
  return t;
}

Value to_value(const Literal& lit) {
  return std::visit(
      [&](const auto& x) -> Value {
        using T = std::decay_t<decltype(x)>;
        Value inner;
        std::uint8_t disc = 0;
        if constexpr (std::is_same_v<T, bool>) {
          disc = 1;
          inner = Value(Primitive(x));
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          disc = 2;
          inner = Value(Primitive(x));
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          disc = 3;
          inner = Value(Primitive(x));
        } else if constexpr (std::is_same_v<T, double>) {
          disc = 4;
          inner = Value(Primitive(x));
        } else if constexpr (std::is_same_v<T, std::string>) {
          disc = 5;
          inner = Value(x);
        } else if constexpr (std::is_same_v<T, Bytes>) {
          disc = 6;
          inner = Value(x);
        } else if constexpr (std::is_same_v<T, Timestamp>) {
          disc = 7;
          inner = Value(Primitive(x));
        } else if constexpr (std::is_same_v<T, Duration>) {
          disc = 8;
          inner = Value(Primitive(x));
        } else {
          disc = 9;
          inner = Value(Primitive(x));
        }
        return make_union(disc, make_struct({std::move(inner)}));
      },
      lit.value);
}

Literal literal_from(const Value& v) {
  const auto& u = v.as<UnionValue>();
  const Value& inner = u.value->as<StructValue>().fields.at(0);
  switch (u.discriminator) {
    case 1: return Literal{std::get<bool>(inner.as<Primitive>())};
    case 2: return Literal{std::get<std::int64_t>(inner.as<Primitive>())};
    case 3: return Literal{std::get<std::uint64_t>(inner.as<Primitive>())};
    case 4: return Literal{std::get<double>(inner.as<Primitive>())};
    case 5: return Literal{inner.as<std::string>()};
    case 6: return Literal{inner.as<Bytes>()};
    case 7: return Literal{std::get<Timestamp>(inner.as<Primitive>())};
    case 8: return Literal{std::get<Duration>(inner.as<Primitive>())};
    default: return Literal{std::get<Uuid>(inner.as<Primitive>())};
  }
}

Value to_value(const std::vector<DecoratorUsage>& decorators) {
  std::vector<Value> items;
  for (const auto& d : decorators) {
    std::vector<Value> args;
    for (const auto& a : d.arguments) {
      Out arg;
      arg.str(1, a.name);
      arg.value(2, to_value(a.value));
      args.push_back(arg.done());
    }
    Out o;
    o.str(1, d.name);
    o.list(2, std::move(args));
    items.push_back(o.done());
  }
  return make_array(std::move(items));
}

std::vector<DecoratorUsage> decorators_from(const std::vector<Value>& items) {
  std::vector<DecoratorUsage> out;
  for (const auto& item : items) {
    In in(item);
    DecoratorUsage d;
    d.name = in.str(1);
    for (const auto& a : in.list(2)) {
      In arg(a);
      const Value* lit = arg.get(2);
      if (!lit) throw Error(ErrorCode::TypeMismatch, "decorator argument without a value");
      d.arguments.push_back({arg.str(1), literal_from(*lit)});
    }
    out.push_back(std::move(d));
  }
  return out;
}

void put_decorators(Out& o, std::uint8_t tag, const std::vector<DecoratorUsage>& decorators) {
  if (!decorators.empty()) o.value(tag, to_value(decorators));
}

Value to_value(const std::vector<FieldDescriptor>& fields) {
  std::vector<Value> items;
  for (const auto& f : fields) {
    Out o;
    o.str(1, f.name);
    o.value(2, to_value(f.type));
    o.num<std::uint8_t>(3, static_cast<std::uint8_t>(f.tag));
    o.str(4, f.documentation);
    put_decorators(o, 5, f.decorators);
    items.push_back(o.done());
  }
  return make_array(std::move(items));
}

std::vector<FieldDescriptor> fields_from(const std::vector<Value>& items) {
  std::vector<FieldDescriptor> out;
  for (const auto& item : items) {
    In in(item);
    FieldDescriptor f;
    f.name = in.str(1);
    if (const Value* t = in.get(2)) f.type = type_from(*t);
    f.tag = in.num<std::uint8_t>(3);
    f.documentation = in.str(4);
    f.decorators = decorators_from(in.list(5));
    out.push_back(std::move(f));
  }
  return out;
}

Value to_value(const DefinitionDescriptor& d) {
  Out o;
  o.enumeration(1, static_cast<std::uint8_t>(d.kind));
  o.str(2, d.name);
  o.str(3, d.fqn);
  o.str(4, d.documentation);
  o.enumeration(5, static_cast<std::uint8_t>(d.visibility));
  put_decorators(o, 6, d.decorators);
  std::vector<Value> nested;
  for (const auto& n : d.nested) nested.push_back(to_value(n));
  o.list(7, std::move(nested));
  if (d.enum_def) {
    Out e;
    e.enumeration(1, static_cast<std::uint8_t>(type_kind_of(d.enum_def->base)));
    std::vector<Value> members;
    for (const auto& m : d.enum_def->members) {
      Out mo;
      mo.str(1, m.name);
      mo.num<std::uint64_t>(2, m.value);
      mo.str(3, m.documentation);
      put_decorators(mo, 4, m.decorators);
      members.push_back(mo.done());
    }
    e.list(2, std::move(members));
    o.value(8, e.done());
  }
  if (d.struct_def) {
    Out s;
    if (!d.struct_def->fields.empty()) s.value(1, to_value(d.struct_def->fields));
    s.flag(2, d.struct_def->is_mutable);
    o.value(9, s.done());
  }
  if (d.message_def) {
    Out m;
    if (!d.message_def->fields.empty()) m.value(1, to_value(d.message_def->fields));
    o.value(10, m.done());
  }
  if (d.union_def) {
    std::vector<Value> branches;
    for (const auto& b : d.union_def->branches) {
      Out bo;
      bo.num<std::uint8_t>(1, b.discriminator);
      bo.str(2, b.name);
      bo.str(3, b.type_fqn);
      bo.str(4, b.documentation);
      put_decorators(bo, 5, b.decorators);
      bo.flag(6, b.is_inline);
      branches.push_back(bo.done());
    }
    Out u;
    u.list(1, std::move(branches));
    o.value(11, u.done());
  }
  if (d.service_def) {
    std::vector<Value> methods;
    for (const auto& m : d.service_def->methods) {
      Out mo;
      mo.str(1, m.name);
      mo.str(2, m.request_type);
      mo.str(3, m.response_type);
      mo.flag(4, m.request_stream);
      mo.flag(5, m.response_stream);
      mo.num<std::uint32_t>(6, m.routing_id);
      mo.str(7, m.documentation);
      put_decorators(mo, 8, m.decorators);
      methods.push_back(mo.done());
    }
    Out s;
    s.list(1, std::move(methods));
    o.value(12, s.done());
  }
  if (d.const_def) {
    Out c;
    c.value(1, to_value(d.const_def->type));
    c.value(2, to_value(d.const_def->value));
    o.value(13, c.done());
  }
  return o.done();
}

DefinitionDescriptor definition_from(const Value& v) {
  In in(v);
  DefinitionDescriptor d;
  const std::uint8_t kind = in.enumeration(1);
  if (kind > static_cast<std::uint8_t>(DefinitionKind::Const)) {
    throw Error(ErrorCode::TypeMismatch, "unknown definition kind " + std::to_string(kind));
  }
  d.kind = static_cast<DefinitionKind>(kind);
  d.name = in.str(2);
  d.fqn = in.str(3);
  d.documentation = in.str(4);
  d.visibility = in.enumeration(5) == 1 ? Visibility::Local : Visibility::Exported;
  d.decorators = decorators_from(in.list(6));
  for (const auto& n : in.list(7)) d.nested.push_back(definition_from(n));
  if (const Value* ev = in.get(8)) {
    In e(*ev);
    EnumDef def;
    const auto base = static_cast<TypeKind>(e.enumeration(1));
    def.base = is_primitive(base) ? primitive_of(base) : PrimitiveKind::UInt32;
    for (const auto& mv : e.list(2)) {
      In m(mv);
      def.members.push_back({m.str(1), m.num<std::uint64_t>(2), m.str(3), decorators_from(m.list(4))});
    }
    d.enum_def = std::move(def);
  }
  if (const Value* sv = in.get(9)) {
    In s(*sv);
    d.struct_def = StructDef{fields_from(s.list(1)), s.flag(2)};
  }
  if (const Value* mv = in.get(10)) {
    In m(*mv);
    d.message_def = MessageDef{fields_from(m.list(1))};
  }
  if (const Value* uv = in.get(11)) {
    In u(*uv);
    UnionDef def;
    for (const auto& bv : u.list(1)) {
      In b(bv);
      UnionBranchDescriptor br;
      br.discriminator = b.num<std::uint8_t>(1);
      br.name = b.str(2);
      br.type_fqn = b.str(3);
      br.documentation = b.str(4);
      br.decorators = decorators_from(b.list(5));
      br.is_inline = b.flag(6);
      def.branches.push_back(std::move(br));
    }
    d.union_def = std::move(def);
  }
  if (const Value* sv = in.get(12)) {
    In s(*sv);
    ServiceDef def;
    for (const auto& mv : s.list(1)) {
      In m(mv);
      MethodDescriptor md;
      md.name = m.str(1);
      md.request_type = m.str(2);
      md.response_type = m.str(3);
      md.request_stream = m.flag(4);
      md.response_stream = m.flag(5);
      md.routing_id = m.num<std::uint32_t>(6);
      md.documentation = m.str(7);
      md.decorators = decorators_from(m.list(8));
      def.methods.push_back(std::move(md));
    }
    d.service_def = std::move(def);
  }
  if (const Value* cv = in.get(13)) {
    In c(*cv);
    ConstDef def;
    if (const Value* t = c.get(1)) def.type = type_from(*t);
    if (const Value* l = c.get(2)) def.value = literal_from(*l);
    d.const_def = std::move(def);
  }
  return d;
}

}  // namespace

Value descriptor_set_to_value(const DescriptorSet& set) {
  std::vector<Value> schemas;
  for (const auto& s : set.schemas) {
    Out o;
    o.str(1, s.name);
    o.str(2, s.package);
    std::vector<Value> defs;
    for (const auto& d : s.definitions) defs.push_back(to_value(d));
    o.list(3, std::move(defs));
    schemas.push_back(o.done());
  }
  Out root;
  root.list(1, std::move(schemas));
  return root.done();
}

DescriptorSet descriptor_set_from_value(const Value& v) {
  DescriptorSet set;
  for (const auto& sv : In(v).list(1)) {
    In s(sv);
    SchemaDescriptor sd;
    sd.name = s.str(1);
    sd.package = s.str(2);
    for (const auto& dv : s.list(3)) sd.definitions.push_back(definition_from(dv));
    set.schemas.push_back(std::move(sd));
  }
  return set;
}

Value schema_descriptor_to_value(const SchemaDescriptor& schema) {
  DescriptorSet one;
  one.schemas.push_back(schema);
  return descriptor_set_to_value(one).as<MessageValue>().get(1)->as<ArrayValue>().items.at(0);
}

SchemaDescriptor schema_descriptor_from_value(const Value& v) {
  Out root;
  root.list(1, {v});
  return descriptor_set_from_value(root.done()).schemas.at(0);
}

Bytes encode_descriptor_set(const DescriptorSet& set) {
  return encode_value(meta::type("DescriptorSet"), descriptor_set_to_value(set), meta::registry());
}

DescriptorSet decode_descriptor_set(ByteView bytes) {
  try {
    return descriptor_set_from_value(decode_value(bytes, meta::type("DescriptorSet"), meta::registry()));
  } catch (const std::bad_variant_access&) {
    throw Error(ErrorCode::TypeMismatch, "descriptor field has an unexpected shape");
  }
}

}  // namespace bebop
