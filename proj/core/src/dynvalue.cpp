#include "bebop/dynvalue.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace bebop {

bool operator==(const ArrayValue& a, const ArrayValue& b) { return a.items == b.items; }
bool operator==(const MapValue& a, const MapValue& b) { return a.entries == b.entries; }
bool operator==(const StructValue& a, const StructValue& b) { return a.fields == b.fields; }
bool operator==(const MessageValue& a, const MessageValue& b) { return a.fields == b.fields; }
bool operator==(const UnionValue& a, const UnionValue& b) {
  return a.discriminator == b.discriminator && a.value == b.value;
}

bool operator==(const Value& a, const Value& b) {
  if (a.data.index() != b.data.index()) return false;
  if (const auto* p = std::get_if<Primitive>(&a.data)) return bit_equal(*p, std::get<Primitive>(b.data));
  return a.data == b.data;
}

const Value* MessageValue::get(std::uint8_t tag) const {
  for (const auto& [t, v] : fields) {
    if (t == tag) return &v;
  }
  return nullptr;
}

void MessageValue::set(std::uint8_t tag, Value v) {
  auto it = std::lower_bound(fields.begin(), fields.end(), tag,
                             [](const auto& entry, std::uint8_t t) { return entry.first < t; });
  if (it != fields.end() && it->first == tag) {
    it->second = std::move(v);
  } else {
    fields.insert(it, {tag, std::move(v)});
  }
}

namespace {

template <std::size_t I = 0>
Primitive zero_at(std::size_t k) {
  if constexpr (I < std::variant_size_v<Primitive>) {
    if (k == I) return Primitive(std::in_place_index<I>);
    return zero_at<I + 1>(k);
  } else {
    throw Error(ErrorCode::TypeMismatch, "unknown primitive kind");
  }
}

}  // namespace

Primitive zero_primitive(PrimitiveKind kind) { return zero_at(static_cast<std::size_t>(kind)); }

Value make_struct(std::vector<Value> fields) { return Value(StructValue{std::move(fields)}); }

Value make_message(std::vector<std::pair<std::uint8_t, Value>> fields) {
  MessageValue m;
  for (auto& [tag, v] : fields) m.set(tag, std::move(v));
  return Value(std::move(m));
}

Value make_union(std::uint8_t discriminator, Value value) {
  return Value(UnionValue{discriminator, Box<Value>(std::move(value))});
}

Value make_array(std::vector<Value> items) { return Value(ArrayValue{std::move(items)}); }

namespace {

bool is_byte(const Box<TypeDescriptor>& t) { return t && t->kind == TypeKind::Byte; }

[[noreturn]] void mismatch(const TypeDescriptor& type, const char* got) {
  throw Error(ErrorCode::TypeMismatch, "expected " + to_string(type) + ", got " + got);
}

const char* shape_name(const Value& v) {
  static constexpr const char* kNames[] = {"primitive", "string", "bytes",   "array", "map",
                                           "struct",    "message", "union", "enum"};
  return kNames[v.data.index()];
}

const FieldDescriptor* field_by_tag(const MessageDef& m, std::uint32_t tag) {
  for (const auto& f : m.fields) {
    if (f.tag == tag) return &f;
  }
  return nullptr;
}

const UnionBranchDescriptor* branch_by_disc(const UnionDef& u, std::uint8_t disc) {
  for (const auto& b : u.branches) {
    if (b.discriminator == disc) return &b;
  }
  return nullptr;
}

class Encoder {
 public:
  Encoder(ByteWriter& out, const TypeRegistry& reg) : out_(out), reg_(reg) {}

  void encode(const TypeDescriptor& type, const Value& v) {
    if (is_primitive(type.kind)) {
      const auto* p = std::get_if<Primitive>(&v.data);
      if (!p) mismatch(type, shape_name(v));
      if (kind_of(*p) != primitive_of(type.kind)) mismatch(type, primitive_name(kind_of(*p)).data());
      out_.write_fixed(*p);
      return;
    }
    switch (type.kind) {
      case TypeKind::String: {
        const auto* s = std::get_if<std::string>(&v.data);
        if (!s) mismatch(type, shape_name(v));
        if (!is_valid_utf8(*s)) throw Error(ErrorCode::InvalidUtf8, "string value is not valid UTF-8");
        if (s->size() > std::numeric_limits<std::uint32_t>::max()) {
          throw Error(ErrorCode::TypeMismatch, "string too long for a 32-bit length prefix");
        }
        out_.write_string(*s);
        return;
      }
      case TypeKind::Array:
      case TypeKind::FixedArray: {
        const bool fixed = type.kind == TypeKind::FixedArray;
        if (is_byte(type.element)) {
          const auto* b = std::get_if<Bytes>(&v.data);
          if (!b) mismatch(type, shape_name(v));
          if (fixed) {
            if (b->size() != type.fixed_length) {
              throw Error(ErrorCode::TypeMismatch, "expected " + std::to_string(type.fixed_length) + " bytes, got " +
                                                       std::to_string(b->size()));
            }
            out_.write_raw(*b);
          } else {
            check_count(b->size());
            out_.write_byte_array(*b);
          }
          return;
        }
        const auto* a = std::get_if<ArrayValue>(&v.data);
        if (!a) mismatch(type, shape_name(v));
        if (fixed) {
          if (a->items.size() != type.fixed_length) {
            throw Error(ErrorCode::TypeMismatch, "expected " + std::to_string(type.fixed_length) +
                                                     " elements, got " + std::to_string(a->items.size()));
          }
        } else {
          check_count(a->items.size());
          out_.write_le<std::uint32_t>(static_cast<std::uint32_t>(a->items.size()));
        }
        for (const auto& item : a->items) encode(*type.element, item);
        return;
      }
      case TypeKind::Map: {
        const auto* m = std::get_if<MapValue>(&v.data);
        if (!m) mismatch(type, shape_name(v));
        check_count(m->entries.size());
        out_.write_le<std::uint32_t>(static_cast<std::uint32_t>(m->entries.size()));
        for (const auto& [k, val] : m->entries) {
          encode(*type.key, k);
          encode(*type.value, val);
        }
        return;
      }
      case TypeKind::Defined: encode_defined(type, reg_.get(type.defined_fqn), v); return;
      default: throw Error(ErrorCode::TypeMismatch, "cannot encode type " + to_string(type));
    }
  }

 private:
  static void check_count(std::size_t n) {
    if (n > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::TypeMismatch, "collection too large for a 32-bit count");
    }
  }

  void encode_defined(const TypeDescriptor& type, const DefinitionDescriptor& def, const Value& v) {
    switch (def.kind) {
      case DefinitionKind::Enum: {
        const auto* e = std::get_if<EnumValue>(&v.data);
        if (!e) mismatch(type, shape_name(v));
        if (kind_of(e->value) != def.enum_def->base) {
          throw Error(ErrorCode::TypeMismatch, "enum " + def.fqn + " has base " +
                                                   std::string(primitive_name(def.enum_def->base)));
        }
        out_.write_fixed(e->value);
        return;
      }
      case DefinitionKind::Struct: {
        const auto* s = std::get_if<StructValue>(&v.data);
        if (!s) mismatch(type, shape_name(v));
        const auto& fields = def.struct_def->fields;
        if (s->fields.size() != fields.size()) {
          throw Error(ErrorCode::TypeMismatch, "struct " + def.fqn + " has " + std::to_string(fields.size()) +
                                                   " fields, value has " + std::to_string(s->fields.size()));
        }
        for (std::size_t i = 0; i < fields.size(); ++i) encode(fields[i].type, s->fields[i]);
        return;
      }
      case DefinitionKind::Message: {
        const auto* m = std::get_if<MessageValue>(&v.data);
        if (!m) mismatch(type, shape_name(v));
        std::vector<const std::pair<std::uint8_t, Value>*> order;
        order.reserve(m->fields.size());
        for (const auto& entry : m->fields) order.push_back(&entry);
        std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->first < b->first; });
        const auto patch = out_.reserve_length();
        std::uint32_t previous = 0;
        for (const auto* entry : order) {
          if (entry->first == previous) {
            throw Error(ErrorCode::TypeMismatch, "message " + def.fqn + " sets tag " + std::to_string(previous) +
                                                     " twice");
          }
          previous = entry->first;
          const auto* f = field_by_tag(*def.message_def, entry->first);
          if (!f) {
            throw Error(ErrorCode::TagOutOfRange,
                        "message " + def.fqn + " has no field with tag " + std::to_string(entry->first));
          }
          out_.write_byte(entry->first);
          encode(f->type, entry->second);
        }
        out_.write_byte(0);
        out_.patch_length(patch);
        return;
      }
      case DefinitionKind::Union: {
        const auto* u = std::get_if<UnionValue>(&v.data);
        if (!u) mismatch(type, shape_name(v));
        const auto* b = branch_by_disc(*def.union_def, u->discriminator);
        if (!b) {
          throw Error(ErrorCode::DiscriminatorUnknown,
                      "union " + def.fqn + " has no branch " + std::to_string(u->discriminator));
        }
        if (!u->value) throw Error(ErrorCode::TypeMismatch, "union value is empty");
        const auto patch = out_.reserve_length();
        out_.write_byte(u->discriminator);
        encode(TypeDescriptor::defined(b->type_fqn), *u->value);
        out_.patch_length(patch);
        return;
      }
      default: throw Error(ErrorCode::TypeMismatch, def.fqn + " is not a data type");
    }
  }

  ByteWriter& out_;
  const TypeRegistry& reg_;
};

class Decoder {
 public:
  Decoder(const TypeRegistry& reg, const DecodeLimits& limits) : reg_(reg), limits_(limits) {}

  Value decode(ByteReader& in, const TypeDescriptor& type) {
    count(1);
    if (is_primitive(type.kind)) return Value(in.read_fixed(primitive_of(type.kind)));
    switch (type.kind) {
      case TypeKind::String: return Value(std::string(in.read_string()));
      case TypeKind::Array:
      case TypeKind::FixedArray: {
        const bool fixed = type.kind == TypeKind::FixedArray;
        if (is_byte(type.element)) {
          const ByteView raw = fixed ? in.read_raw(type.fixed_length) : in.read_byte_array();
          return Value(Bytes(raw.begin(), raw.end()));
        }
        const std::uint32_t n = fixed ? type.fixed_length : in.read_le<std::uint32_t>();
        precheck(in, n, min_size(*type.element, 0));
        Guard g(*this);
        ArrayValue a;
        a.items.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) a.items.push_back(decode(in, *type.element));
        return Value(std::move(a));
      }
      case TypeKind::Map: {
        const std::uint32_t n = in.read_le<std::uint32_t>();
        precheck(in, n, min_size(*type.key, 0) + min_size(*type.value, 0));
        Guard g(*this);
        MapValue m;
        m.entries.reserve(n);
        std::set<std::string> seen;
        for (std::uint32_t i = 0; i < n; ++i) {
          const std::size_t start = in.position();
          Value k = decode(in, *type.key);
          const auto raw = in.data().subspan(start, in.position() - start);
          if (!seen.emplace(raw.begin(), raw.end()).second) {
            throw Error(ErrorCode::DuplicateMapKey, "map contains a duplicate key");
          }
          Value v = decode(in, *type.value);
          m.entries.emplace_back(std::move(k), std::move(v));
        }
        return Value(std::move(m));
      }
      case TypeKind::Defined: return decode_defined(in, reg_.get(type.defined_fqn));
      default: throw Error(ErrorCode::TypeMismatch, "cannot decode type " + to_string(type));
    }
  }

  std::size_t min_size(const TypeDescriptor& type, int depth) const {
    if (depth > 64) return 0;
    if (is_primitive(type.kind)) return fixed_size(primitive_of(type.kind));
    switch (type.kind) {
      case TypeKind::String: return 5;
      case TypeKind::Array:
      case TypeKind::Map: return 4;
      case TypeKind::FixedArray: return type.fixed_length * min_size(*type.element, depth + 1);
      case TypeKind::Defined: {
        const auto* def = reg_.find(type.defined_fqn);
        if (!def) return 0;
        switch (def->kind) {
          case DefinitionKind::Enum: return fixed_size(def->enum_def->base);
          case DefinitionKind::Message:
          case DefinitionKind::Union: return 5;
          case DefinitionKind::Struct: {
            std::size_t total = 0;
            for (const auto& f : def->struct_def->fields) total += min_size(f.type, depth + 1);
            return total;
          }
          default: return 0;
        }
      }
      default: return 0;
    }
  }

 private:
  struct Guard {
    explicit Guard(Decoder& d) : d_(d) {
      if (++d_.depth_ > d_.limits_.max_depth) {
        throw Error(ErrorCode::DepthExceeded,
                    "nesting deeper than " + std::to_string(d_.limits_.max_depth));
      }
    }
    ~Guard() { --d_.depth_; }
    Decoder& d_;
  };

  void count(std::size_t n) {
    elements_ += n;
    if (elements_ > limits_.max_elements) {
      throw Error(ErrorCode::ElementLimitExceeded,
                  "more than " + std::to_string(limits_.max_elements) + " decoded values");
    }
  }

  // Rejects counts that cannot fit in the remaining input before allocating.
  void precheck(const ByteReader& in, std::uint32_t n, std::size_t element_min) {
    if (element_min != 0 && static_cast<std::uint64_t>(n) * element_min > in.remaining()) {
      in.require(static_cast<std::size_t>(static_cast<std::uint64_t>(n) * element_min));
    }
    if (n > limits_.max_elements - elements_) {
      throw Error(ErrorCode::ElementLimitExceeded,
                  "collection of " + std::to_string(n) + " elements exceeds the decode limit");
    }
  }

  Value decode_defined(ByteReader& in, const DefinitionDescriptor& def) {
    switch (def.kind) {
      case DefinitionKind::Enum: return Value(EnumValue{in.read_fixed(def.enum_def->base)});
      case DefinitionKind::Struct: {
        Guard g(*this);
        StructValue s;
        s.fields.reserve(def.struct_def->fields.size());
        for (const auto& f : def.struct_def->fields) s.fields.push_back(decode(in, f.type));
        return Value(std::move(s));
      }
      case DefinitionKind::Message: {
        Guard g(*this);
        const std::uint32_t len = in.read_le<std::uint32_t>();
        ByteReader body = in.sub_reader(len);
        MessageValue m;
        for (;;) {
          if (body.at_end()) {
            throw Error(ErrorCode::MissingEndMarker, "message " + def.fqn + " ends without an end marker");
          }
          const std::uint8_t tag = body.read_byte();
          if (tag == 0) break;
          const auto* f = field_by_tag(*def.message_def, tag);
          if (!f) break;  // unknown: the rest of the body is unreadable
          m.set(tag, decode(body, f->type));
        }
        return Value(std::move(m));
      }
      case DefinitionKind::Union: {
        Guard g(*this);
        const std::uint32_t len = in.read_le<std::uint32_t>();
        ByteReader body = in.sub_reader(len);
        const std::uint8_t disc = body.read_byte();
        const auto* b = branch_by_disc(*def.union_def, disc);
        if (!b) {
          throw Error(ErrorCode::DiscriminatorUnknown,
                      "union " + def.fqn + " has no branch " + std::to_string(disc));
        }
        Value inner = decode(body, TypeDescriptor::defined(b->type_fqn));
        return make_union(disc, std::move(inner));
      }
      default: throw Error(ErrorCode::TypeMismatch, def.fqn + " is not a data type");
    }
  }

  const TypeRegistry& reg_;
  const DecodeLimits& limits_;
  std::size_t depth_ = 0;
  std::size_t elements_ = 0;
};

void skip_impl(ByteReader& in, const TypeDescriptor& type, const TypeRegistry& reg, int depth) {
  if (depth > 256) throw Error(ErrorCode::DepthExceeded, "type nesting too deep to skip");
  if (is_primitive(type.kind)) {
    in.skip(fixed_size(primitive_of(type.kind)));
    return;
  }
  switch (type.kind) {
    case TypeKind::String: {
      const std::uint32_t n = in.read_le<std::uint32_t>();
      in.skip(static_cast<std::size_t>(n) + 1);
      return;
    }
    case TypeKind::Array:
    case TypeKind::FixedArray: {
      const std::uint32_t n = type.kind == TypeKind::FixedArray ? type.fixed_length : in.read_le<std::uint32_t>();
      const auto& el = *type.element;
      if (is_primitive(el.kind)) {
        in.skip(static_cast<std::size_t>(n) * fixed_size(primitive_of(el.kind)));
        return;
      }
      for (std::uint32_t i = 0; i < n; ++i) skip_impl(in, el, reg, depth + 1);
      return;
    }
    case TypeKind::Map: {
      const std::uint32_t n = in.read_le<std::uint32_t>();
      for (std::uint32_t i = 0; i < n; ++i) {
        skip_impl(in, *type.key, reg, depth + 1);
        skip_impl(in, *type.value, reg, depth + 1);
      }
      return;
    }
    case TypeKind::Defined: {
      const auto& def = reg.get(type.defined_fqn);
      switch (def.kind) {
        case DefinitionKind::Enum: in.skip(fixed_size(def.enum_def->base)); return;
        case DefinitionKind::Struct:
          for (const auto& f : def.struct_def->fields) skip_impl(in, f.type, reg, depth + 1);
          return;
        case DefinitionKind::Message:
        case DefinitionKind::Union: in.skip(in.read_le<std::uint32_t>()); return;
        default: throw Error(ErrorCode::TypeMismatch, def.fqn + " is not a data type");
      }
    }
    default: throw Error(ErrorCode::TypeMismatch, "cannot skip type " + to_string(type));
  }
}

Value default_impl(const TypeDescriptor& type, const TypeRegistry& reg, int depth) {
  if (depth > 64) throw Error(ErrorCode::DepthExceeded, "type nesting too deep for a default value");
  if (is_primitive(type.kind)) return Value(zero_primitive(primitive_of(type.kind)));
  switch (type.kind) {
    case TypeKind::String: return Value(std::string());
    case TypeKind::Array:
      if (is_byte(type.element)) return Value(Bytes{});
      return make_array({});
    case TypeKind::FixedArray: {
      if (is_byte(type.element)) return Value(Bytes(type.fixed_length, 0));
      std::vector<Value> items;
      items.reserve(type.fixed_length);
      for (std::uint32_t i = 0; i < type.fixed_length; ++i) items.push_back(default_impl(*type.element, reg, depth + 1));
      return make_array(std::move(items));
    }
    case TypeKind::Map: return Value(MapValue{});
    case TypeKind::Defined: {
      const auto& def = reg.get(type.defined_fqn);
      switch (def.kind) {
        case DefinitionKind::Enum: return Value(EnumValue{zero_primitive(def.enum_def->base)});
        case DefinitionKind::Struct: {
          std::vector<Value> fields;
          for (const auto& f : def.struct_def->fields) fields.push_back(default_impl(f.type, reg, depth + 1));
          return make_struct(std::move(fields));
        }
        case DefinitionKind::Message: return Value(MessageValue{});
        case DefinitionKind::Union: {
          const auto& b = def.union_def->branches.front();
          return make_union(b.discriminator, default_impl(TypeDescriptor::defined(b.type_fqn), reg, depth + 1));
        }
        default: throw Error(ErrorCode::TypeMismatch, def.fqn + " is not a data type");
      }
    }
    default: throw Error(ErrorCode::TypeMismatch, "no default for type " + to_string(type));
  }
}

}  // namespace

void encode_value(ByteWriter& out, const TypeDescriptor& type, const Value& v, const TypeRegistry& registry) {
  Encoder(out, registry).encode(type, v);
}

Bytes encode_value(const TypeDescriptor& type, const Value& v, const TypeRegistry& registry) {
  ByteWriter w;
  encode_value(w, type, v, registry);
  return w.take();
}

Value decode_value(ByteReader& in, const TypeDescriptor& type, const TypeRegistry& registry,
                   const DecodeLimits& limits) {
  return Decoder(registry, limits).decode(in, type);
}

Value decode_value(ByteView bytes, const TypeDescriptor& type, const TypeRegistry& registry,
                   const DecodeLimits& limits) {
  ByteReader r(bytes);
  return decode_value(r, type, registry, limits);
}

void skip_value(ByteReader& in, const TypeDescriptor& type, const TypeRegistry& registry) {
  skip_impl(in, type, registry, 0);
}

Value default_value(const TypeDescriptor& type, const TypeRegistry& registry) {
  return default_impl(type, registry, 0);
}

bool conforms(const TypeDescriptor& type, const Value& v, const TypeRegistry& registry, std::string* why) {
  try {
    ByteWriter scratch;
    encode_value(scratch, type, v, registry);
    return true;
  } catch (const Error& e) {
    if (why) *why = e.detail();
    return false;
  }
}

}  // namespace bebop
