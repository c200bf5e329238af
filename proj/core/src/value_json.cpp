#include "bebop/value_json.hpp"

#include <cmath>
#include <limits>
#include <json.hpp>

namespace bebop {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void mismatch(const TypeDescriptor& type, const std::string& why) {
  throw Error(ErrorCode::TypeMismatch, to_string(type) + ": " + why);
}

std::string u128_decimal(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

std::string i128_decimal(__int128 v) {
  if (v >= 0) return u128_decimal(static_cast<unsigned __int128>(v));
  return "-" + u128_decimal(-static_cast<unsigned __int128>(v));
}

Json float_json(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  return d;
}

Json primitive_json(const Primitive& p) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x;
        } else if constexpr (std::is_integral_v<T>) {
          if constexpr (std::is_signed_v<T>) return static_cast<std::int64_t>(x);
          else return static_cast<std::uint64_t>(x);
        } else if constexpr (std::is_same_v<T, Int128>) {
          return i128_decimal(static_cast<__int128>((static_cast<unsigned __int128>(x.high) << 64) | x.low));
        } else if constexpr (std::is_same_v<T, UInt128>) {
          return u128_decimal((static_cast<unsigned __int128>(x.high) << 64) | x.low);
        } else if constexpr (std::is_same_v<T, Half> || std::is_same_v<T, BFloat16>) {
          return float_json(x.to_float());
        } else if constexpr (std::is_floating_point_v<T>) {
          return float_json(x);
        } else if constexpr (std::is_same_v<T, Uuid>) {
          return x.to_string();
        } else if constexpr (std::is_same_v<T, Timestamp>) {
          return Json{{"seconds", x.seconds}, {"nanos", x.nanos}, {"offset_ms", x.offset_ms}};
        } else {
          return Json{{"seconds", x.seconds}, {"nanos", x.nanos}};
        }
      },
      p);
}

std::uint64_t width_mask(PrimitiveKind k) {
  const std::size_t bits = fixed_size(k) * 8;
  return bits >= 64 ? ~0ULL : (1ULL << bits) - 1;
}

std::int64_t enum_bits(const Primitive& p) {
  return std::visit(
      [](const auto& x) -> std::int64_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_integral_v<T>) return static_cast<std::int64_t>(x);
        else return 0;
      },
      p);
}

class ToJson {
 public:
  explicit ToJson(const TypeRegistry& reg) : reg_(reg) {}

  Json operator()(const TypeDescriptor& type, const Value& v) const {
    if (is_primitive(type.kind)) return primitive_json(v.as<Primitive>());
    switch (type.kind) {
      case TypeKind::String: return v.as<std::string>();
      case TypeKind::Array:
      case TypeKind::FixedArray: {
        if (v.is<Bytes>()) return to_hex(v.as<Bytes>());
        Json out = Json::array();
        for (const auto& item : v.as<ArrayValue>().items) out.push_back((*this)(*type.element, item));
        return out;
      }
      case TypeKind::Map: {
        Json out = Json::array();
        for (const auto& [k, x] : v.as<MapValue>().entries) {
          out.push_back(Json::array({(*this)(*type.key, k), (*this)(*type.value, x)}));
        }
        return out;
      }
      case TypeKind::Defined: return defined(reg_.get(type.defined_fqn), v);
      default: mismatch(type, "no JSON form");
    }
  }

 private:
  Json defined(const DefinitionDescriptor& def, const Value& v) const {
    switch (def.kind) {
      case DefinitionKind::Enum: {
        const Primitive& p = v.as<EnumValue>().value;
        for (const auto& m : def.enum_def->members) {
          const std::uint64_t mask = width_mask(def.enum_def->base);
          if ((m.value & mask) == (static_cast<std::uint64_t>(enum_bits(p)) & mask)) return m.name;
        }
        return primitive_json(p);
      }
      case DefinitionKind::Struct: {
        Json out = Json::object();
        const auto& fields = def.struct_def->fields;
        const auto& values = v.as<StructValue>().fields;
        for (std::size_t i = 0; i < fields.size() && i < values.size(); ++i) {
          out[fields[i].name] = (*this)(fields[i].type, values[i]);
        }
        return out;
      }
      case DefinitionKind::Message: {
        Json out = Json::object();
        for (const auto& [tag, x] : v.as<MessageValue>().fields) {
          const FieldDescriptor* f = nullptr;
          for (const auto& c : def.message_def->fields) {
            if (c.tag == tag) f = &c;
          }
          if (f) out[f->name] = (*this)(f->type, x);
        }
        return out;
      }
      case DefinitionKind::Union: {
        const auto& u = v.as<UnionValue>();
        for (const auto& b : def.union_def->branches) {
          if (b.discriminator == u.discriminator) {
            return Json{{b.name, (*this)(TypeDescriptor::defined(b.type_fqn), *u.value)}};
          }
        }
        return Json{{std::to_string(u.discriminator), nullptr}};
      }
      default: throw Error(ErrorCode::TypeMismatch, def.fqn + " has no value form");
    }
  }

  const TypeRegistry& reg_;
};

double json_float(const TypeDescriptor& type, const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
  }
  mismatch(type, "expected a number, got " + j.dump());
}

template <typename T>
T json_int(const TypeDescriptor& type, const Json& j) {
  if (!j.is_number_integer()) mismatch(type, "expected an integer, got " + j.dump());
  if constexpr (std::is_signed_v<T>) {
    const auto x = j.get<std::int64_t>();
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
      mismatch(type, j.dump() + " is out of range");
    }
    if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) {
      mismatch(type, j.dump() + " is out of range");
    }
    return static_cast<T>(x);
  } else {
    if (j.get<std::int64_t>() < 0 && !j.is_number_unsigned()) mismatch(type, j.dump() + " is out of range");
    const auto x = j.get<std::uint64_t>();
    if (x > std::numeric_limits<T>::max()) mismatch(type, j.dump() + " is out of range");
    return static_cast<T>(x);
  }
}

unsigned __int128 parse_u128(const TypeDescriptor& type, std::string_view s) {
  if (s.empty()) mismatch(type, "empty number");
  unsigned __int128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') mismatch(type, "not a decimal integer: " + std::string(s));
    const unsigned __int128 next = v * 10 + static_cast<unsigned>(c - '0');
    if (next / 10 != v) mismatch(type, std::string(s) + " is out of range");
    v = next;
  }
  return v;
}

std::string json_text(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

Primitive json_primitive(const TypeDescriptor& type, const Json& j) {
  switch (primitive_of(type.kind)) {
    case PrimitiveKind::Bool:
      if (!j.is_boolean()) mismatch(type, "expected true or false");
      return j.get<bool>();
    case PrimitiveKind::Byte: return json_int<std::uint8_t>(type, j);
    case PrimitiveKind::Int8: return json_int<std::int8_t>(type, j);
    case PrimitiveKind::Int16: return json_int<std::int16_t>(type, j);
    case PrimitiveKind::UInt16: return json_int<std::uint16_t>(type, j);
    case PrimitiveKind::Int32: return json_int<std::int32_t>(type, j);
    case PrimitiveKind::UInt32: return json_int<std::uint32_t>(type, j);
    case PrimitiveKind::Int64: return json_int<std::int64_t>(type, j);
    case PrimitiveKind::UInt64: return json_int<std::uint64_t>(type, j);
    case PrimitiveKind::Int128: {
      std::string s = json_text(j);
      const bool negative = !s.empty() && s[0] == '-';
      const unsigned __int128 mag = parse_u128(type, negative ? std::string_view(s).substr(1) : s);
      const unsigned __int128 limit = static_cast<unsigned __int128>(1) << 127;
      if (mag > (negative ? limit : limit - 1)) mismatch(type, s + " is out of range");
      const unsigned __int128 bits = negative ? -mag : mag;
      return Int128{static_cast<std::uint64_t>(bits), static_cast<std::int64_t>(bits >> 64)};
    }
    case PrimitiveKind::UInt128: {
      const unsigned __int128 v = parse_u128(type, json_text(j));
      return UInt128{static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(v >> 64)};
    }
    case PrimitiveKind::Float16: return Half::from_float(static_cast<float>(json_float(type, j)));
    case PrimitiveKind::BFloat16: return BFloat16::from_float(static_cast<float>(json_float(type, j)));
    case PrimitiveKind::Float32: return static_cast<float>(json_float(type, j));
    case PrimitiveKind::Float64: return json_float(type, j);
    case PrimitiveKind::Uuid: {
      Uuid id;
      if (!j.is_string() || !Uuid::try_parse(j.get<std::string>(), id)) mismatch(type, "expected a UUID string");
      return id;
    }
    case PrimitiveKind::Timestamp: {
      if (!j.is_object()) mismatch(type, "expected {\"seconds\", \"nanos\", \"offset_ms\"}");
      return Timestamp{json_int<std::int64_t>(type, j.value("seconds", Json(0))),
                       json_int<std::int32_t>(type, j.value("nanos", Json(0))),
                       json_int<std::int32_t>(type, j.value("offset_ms", Json(0)))};
    }
    case PrimitiveKind::Duration: {
      if (!j.is_object()) mismatch(type, "expected {\"seconds\", \"nanos\"}");
      return Duration{json_int<std::int64_t>(type, j.value("seconds", Json(0))),
                      json_int<std::int32_t>(type, j.value("nanos", Json(0)))};
    }
  }
  mismatch(type, "unknown primitive");
}

class FromJson {
 public:
  explicit FromJson(const TypeRegistry& reg) : reg_(reg) {}

  Value operator()(const TypeDescriptor& type, const Json& j) const {
    if (is_primitive(type.kind)) return json_primitive(type, j);
    switch (type.kind) {
      case TypeKind::String:
        if (!j.is_string()) mismatch(type, "expected a string");
        return j.get<std::string>();
      case TypeKind::Array:
      case TypeKind::FixedArray: {
        if (type.element->kind == TypeKind::Byte) {
          if (!j.is_string()) mismatch(type, "expected a hex string");
          Bytes b;
          try {
            b = from_hex(j.get<std::string>());
          } catch (const Error&) {
            mismatch(type, "expected a hex string");
          }
          if (type.kind == TypeKind::FixedArray && b.size() != type.fixed_length) {
            mismatch(type, "expected " + std::to_string(type.fixed_length) + " bytes");
          }
          return b;
        }
        if (!j.is_array()) mismatch(type, "expected an array");
        if (type.kind == TypeKind::FixedArray && j.size() != type.fixed_length) {
          mismatch(type, "expected " + std::to_string(type.fixed_length) + " elements");
        }
        ArrayValue out;
        for (const auto& item : j) out.items.push_back((*this)(*type.element, item));
        return out;
      }
      case TypeKind::Map: {
        if (!j.is_array()) mismatch(type, "expected an array of [key, value] pairs");
        MapValue out;
        for (const auto& pair : j) {
          if (!pair.is_array() || pair.size() != 2) mismatch(type, "expected a [key, value] pair");
          out.entries.emplace_back((*this)(*type.key, pair[0]), (*this)(*type.value, pair[1]));
        }
        return out;
      }
      case TypeKind::Defined: return defined(type, reg_.get(type.defined_fqn), j);
      default: mismatch(type, "no JSON form");
    }
  }

 private:
  Value defined(const TypeDescriptor& type, const DefinitionDescriptor& def, const Json& j) const {
    switch (def.kind) {
      case DefinitionKind::Enum: {
        const TypeDescriptor base = TypeDescriptor::primitive(def.enum_def->base);
        if (j.is_string()) {
          for (const auto& m : def.enum_def->members) {
            if (m.name == j.get<std::string>()) {
              const PrimitiveKind k = def.enum_def->base;
              const std::uint64_t bits = m.value & width_mask(k);
              const std::size_t width = fixed_size(k) * 8;
              if (!is_signed_integer(k)) return EnumValue{json_primitive(base, Json(bits))};
              const std::uint64_t sign = 1ULL << (width - 1);
              const auto extended = static_cast<std::int64_t>(width >= 64 ? bits : (bits ^ sign) - sign);
              return EnumValue{json_primitive(base, Json(extended))};
            }
          }
          mismatch(type, "no member " + j.dump());
        }
        return EnumValue{json_primitive(base, j)};
      }
      case DefinitionKind::Struct: {
        if (!j.is_object()) mismatch(type, "expected an object");
        StructValue out;
        for (const auto& f : def.struct_def->fields) {
          if (!j.contains(f.name)) mismatch(type, "missing field " + f.name);
          out.fields.push_back((*this)(f.type, j.at(f.name)));
        }
        for (const auto& [k, _] : j.items()) {
          bool known = false;
          for (const auto& f : def.struct_def->fields) known = known || f.name == k;
          if (!known) mismatch(type, "no field " + k);
        }
        return out;
      }
      case DefinitionKind::Message: {
        if (!j.is_object()) mismatch(type, "expected an object");
        MessageValue out;
        for (const auto& [k, x] : j.items()) {
          const FieldDescriptor* f = nullptr;
          for (const auto& c : def.message_def->fields) {
            if (c.name == k) f = &c;
          }
          if (!f) mismatch(type, "no field " + k);
          out.set(static_cast<std::uint8_t>(f->tag), (*this)(f->type, x));
        }
        return out;
      }
      case DefinitionKind::Union: {
        if (!j.is_object() || j.size() != 1) mismatch(type, "expected {\"Branch\": value}");
        const auto& [name, x] = *j.items().begin();
        for (const auto& b : def.union_def->branches) {
          if (b.name == name) return make_union(b.discriminator, (*this)(TypeDescriptor::defined(b.type_fqn), x));
        }
        mismatch(type, "no branch " + name);
      }
      default: mismatch(type, "has no value form");
    }
  }

  const TypeRegistry& reg_;
};

}  // namespace

std::string value_to_json(const Value& v, const TypeDescriptor& type, const TypeRegistry& registry, int indent) {
  return ToJson(registry)(type, v).dump(indent);
}

Value value_from_json(std::string_view json, const TypeDescriptor& type, const TypeRegistry& registry) {
  Json j;
  try {
    j = Json::parse(json);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, std::string("invalid JSON: ") + e.what());
  }
  return FromJson(registry)(type, j);
}

}  // namespace bebop
