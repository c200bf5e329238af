#pragma once

// Schema-driven values: encode and decode any type described by a
// TypeRegistry without generated code.

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bebop/descriptor.hpp"
#include "bebop/wire.hpp"

namespace bebop {

struct Value;

struct ArrayValue {
  std::vector<Value> items;
  friend bool operator==(const ArrayValue&, const ArrayValue&);
};

/// Entries keep their insertion order, which is also the wire order.
struct MapValue {
  std::vector<std::pair<Value, Value>> entries;
  friend bool operator==(const MapValue&, const MapValue&);
};

/// Field values in definition order.
struct StructValue {
  std::vector<Value> fields;
  friend bool operator==(const StructValue&, const StructValue&);
};

/// Present fields only, sorted by tag.
struct MessageValue {
  std::vector<std::pair<std::uint8_t, Value>> fields;

  const Value* get(std::uint8_t tag) const;
  /// Inserts or replaces, keeping tag order.
  void set(std::uint8_t tag, Value v);
  friend bool operator==(const MessageValue&, const MessageValue&);
};

struct UnionValue {
  std::uint8_t discriminator = 0;
  Box<Value> value;
  friend bool operator==(const UnionValue&, const UnionValue&);
};

/// Enum member as a value of the enum's base type.
struct EnumValue {
  Primitive value;
  friend bool operator==(const EnumValue& a, const EnumValue& b) noexcept { return bit_equal(a.value, b.value); }
};

/// `byte[]` and `byte[N]` always decode to Bytes; other arrays to ArrayValue.
struct Value {
  using Storage = std::variant<Primitive, std::string, Bytes, ArrayValue, MapValue, StructValue, MessageValue,
                               UnionValue, EnumValue>;
  Storage data;

  Value() = default;
  Value(Primitive p) : data(std::move(p)) {}
  Value(std::string s) : data(std::move(s)) {}
  Value(const char* s) : data(std::string(s)) {}
  Value(Bytes b) : data(std::move(b)) {}
  Value(ArrayValue a) : data(std::move(a)) {}
  Value(MapValue m) : data(std::move(m)) {}
  Value(StructValue s) : data(std::move(s)) {}
  Value(MessageValue m) : data(std::move(m)) {}
  Value(UnionValue u) : data(std::move(u)) {}
  Value(EnumValue e) : data(std::move(e)) {}

  template <typename T>
  bool is() const noexcept {
    return std::holds_alternative<T>(data);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(data);
  }
  template <typename T>
  T& as() {
    return std::get<T>(data);
  }

  /// Floats compare by bit pattern.
  friend bool operator==(const Value& a, const Value& b);
};

/// Zero of the given primitive kind.
Primitive zero_primitive(PrimitiveKind kind);

Value make_struct(std::vector<Value> fields);
Value make_message(std::vector<std::pair<std::uint8_t, Value>> fields);
Value make_union(std::uint8_t discriminator, Value value);
Value make_array(std::vector<Value> items);

struct DecodeLimits {
  std::size_t max_depth = 256;
  /// Total decoded values, counting every element, key, and field.
  std::size_t max_elements = 16u * 1024u * 1024u;
};

/// Throws Error(TypeMismatch, TagOutOfRange, DiscriminatorUnknown) when `v`
/// does not conform to `type`.
void encode_value(ByteWriter& out, const TypeDescriptor& type, const Value& v, const TypeRegistry& registry);
Bytes encode_value(const TypeDescriptor& type, const Value& v, const TypeRegistry& registry);

Value decode_value(ByteReader& in, const TypeDescriptor& type, const TypeRegistry& registry,
                   const DecodeLimits& limits = {});
/// Decodes one value from the start of `bytes`; trailing bytes are ignored.
Value decode_value(ByteView bytes, const TypeDescriptor& type, const TypeRegistry& registry,
                   const DecodeLimits& limits = {});

/// Advances past one value. Messages and unions are skipped through their
/// length prefix without looking inside.
void skip_value(ByteReader& in, const TypeDescriptor& type, const TypeRegistry& registry);

/// The value `type` would have with all fields zero, strings and collections
/// empty, messages without fields, and unions on their first branch.
Value default_value(const TypeDescriptor& type, const TypeRegistry& registry);

/// Whether `v` has the shape `type` requires; the message in `why` on failure.
bool conforms(const TypeDescriptor& type, const Value& v, const TypeRegistry& registry, std::string* why = nullptr);

}  // namespace bebop
