#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bebop/error.hpp"
#include "bebop/wire.hpp"

namespace bebop {

enum class DefinitionKind : std::uint8_t {
  Unknown = 0,
  Enum = 1,
  Struct = 2,
  Message = 3,
  Union = 4,
  Service = 5,
  Const = 6,
  Decorator = 7,
};

enum class Visibility : std::uint8_t { Exported = 0, Local = 1 };

std::string_view to_string(DefinitionKind kind) noexcept;

/// A literal as written in a schema: constant values and decorator arguments.
/// Integers are int64 when the target is signed (or the literal is negative),
/// uint64 otherwise.
struct Literal {
  using Storage = std::variant<bool, std::int64_t, std::uint64_t, double, std::string, Bytes,
                               Timestamp, Duration, Uuid>;
  Storage value;

  /// Doubles compare by bit pattern so that `nan` survives reparsing.
  friend bool operator==(const Literal& a, const Literal& b) noexcept;
};

namespace schema {

struct TypeExpr {
  enum class Kind : std::uint8_t { Primitive, String, Named, Array, FixedArray, Map };

  Kind kind = Kind::Primitive;
  PrimitiveKind primitive = PrimitiveKind::Bool;
  /// Named: the reference as written, possibly dotted.
  std::string name;
  /// Named: fully-qualified name of the target, filled in by the resolver.
  std::string resolved;
  DefinitionKind resolved_kind = DefinitionKind::Unknown;
  /// Array/FixedArray: one element type. Map: key then value.
  std::vector<TypeExpr> args;
  std::uint32_t fixed_length = 0;
  Span span;

  static TypeExpr make_primitive(PrimitiveKind k) {
    TypeExpr t;
    t.kind = Kind::Primitive;
    t.primitive = k;
    return t;
  }
  static TypeExpr make_string() {
    TypeExpr t;
    t.kind = Kind::String;
    return t;
  }
  static TypeExpr make_named(std::string name) {
    TypeExpr t;
    t.kind = Kind::Named;
    t.name = std::move(name);
    return t;
  }
  static TypeExpr make_array(TypeExpr element) {
    TypeExpr t;
    t.kind = Kind::Array;
    t.args.push_back(std::move(element));
    return t;
  }
  static TypeExpr make_fixed_array(TypeExpr element, std::uint32_t length) {
    TypeExpr t;
    t.kind = Kind::FixedArray;
    t.fixed_length = length;
    t.args.push_back(std::move(element));
    return t;
  }
  static TypeExpr make_map(TypeExpr key, TypeExpr value) {
    TypeExpr t;
    t.kind = Kind::Map;
    t.args.push_back(std::move(key));
    t.args.push_back(std::move(value));
    return t;
  }

  friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
};

struct DecoratorArg {
  /// Empty for positional arguments.
  std::string name;
  Literal value;
  Span span;
  friend bool operator==(const DecoratorArg&, const DecoratorArg&) = default;
};

struct DecoratorUse {
  std::string name;
  std::vector<DecoratorArg> args;
  Span span;
  friend bool operator==(const DecoratorUse&, const DecoratorUse&) = default;
};

struct Field {
  std::string name;
  /// Messages only.
  std::optional<std::uint32_t> tag;
  TypeExpr type;
  std::string doc;
  std::vector<DecoratorUse> decorators;
  Span span;
  friend bool operator==(const Field&, const Field&) = default;
};

struct EnumMember {
  std::string name;
  /// Two's-complement bits; interpretation follows the enum base type.
  std::uint64_t value = 0;
  std::string doc;
  std::vector<DecoratorUse> decorators;
  Span span;
  friend bool operator==(const EnumMember&, const EnumMember&) = default;
};

struct EnumBody {
  PrimitiveKind base = PrimitiveKind::UInt32;
  std::vector<EnumMember> members;
  friend bool operator==(const EnumBody&, const EnumBody&) = default;
};

struct StructBody {
  bool is_mutable = false;
  std::vector<Field> fields;
  friend bool operator==(const StructBody&, const StructBody&) = default;
};

struct MessageBody {
  std::vector<Field> fields;
  friend bool operator==(const MessageBody&, const MessageBody&) = default;
};

struct UnionBranch {
  std::string name;
  std::uint32_t discriminator = 0;
  /// Always Named. Inline branches point at the nested definition of the same name.
  TypeExpr type;
  bool is_inline = false;
  std::string doc;
  std::vector<DecoratorUse> decorators;
  Span span;
  friend bool operator==(const UnionBranch&, const UnionBranch&) = default;
};

struct UnionBody {
  std::vector<UnionBranch> branches;
  friend bool operator==(const UnionBody&, const UnionBody&) = default;
};

struct Method {
  std::string name;
  TypeExpr request;
  bool request_stream = false;
  TypeExpr response;
  bool response_stream = false;
  std::string doc;
  std::vector<DecoratorUse> decorators;
  /// Service that declared the method; differs from the owner after `with` flattening.
  std::string origin;
  Span span;
  friend bool operator==(const Method&, const Method&) = default;
};

struct ServiceInclude {
  std::string name;
  std::string resolved;
  Span span;
  friend bool operator==(const ServiceInclude&, const ServiceInclude&) = default;
};

struct ServiceBody {
  std::vector<ServiceInclude> includes;
  std::vector<Method> methods;
  friend bool operator==(const ServiceBody&, const ServiceBody&) = default;
};

struct ConstBody {
  TypeExpr type;
  Literal value;
  friend bool operator==(const ConstBody&, const ConstBody&) = default;
};

enum class DecoratorTarget : std::uint16_t {
  Enum = 1 << 0,
  Struct = 1 << 1,
  Message = 1 << 2,
  Union = 1 << 3,
  Field = 1 << 4,
  Service = 1 << 5,
  Method = 1 << 6,
  Branch = 1 << 7,
  All = 0xff,
};

struct DecoratorParam {
  std::string name;
  bool required = false;
  TypeExpr type;
  Span span;
  friend bool operator==(const DecoratorParam&, const DecoratorParam&) = default;
};

/// `#decorator(name) { ... }`. Script blocks are kept verbatim and never run.
struct DecoratorBody {
  std::uint16_t targets = 0;
  std::vector<DecoratorParam> params;
  std::optional<std::string> validate_block;
  std::optional<std::string> export_block;
  friend bool operator==(const DecoratorBody&, const DecoratorBody&) = default;
};

struct Definition {
  DefinitionKind kind = DefinitionKind::Unknown;
  std::string name;
  std::string fqn;
  Visibility visibility = Visibility::Exported;
  std::string doc;
  std::vector<DecoratorUse> decorators;
  std::variant<std::monostate, EnumBody, StructBody, MessageBody, UnionBody, ServiceBody,
               ConstBody, DecoratorBody>
      body;
  std::vector<Definition> nested;
  /// Set on the synthesized definition behind an inline union branch.
  bool inline_branch = false;
  Span span;

  template <typename T>
  T& as() {
    return std::get<T>(body);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(body);
  }

  friend bool operator==(const Definition&, const Definition&) = default;
};

struct Import {
  std::string path;
  Span span;
  friend bool operator==(const Import&, const Import&) = default;
};

struct SchemaAst {
  std::string file;
  std::optional<std::string> edition;
  std::optional<std::string> package;
  std::vector<Import> imports;
  std::vector<Definition> definitions;

  friend bool operator==(const SchemaAst& a, const SchemaAst& b) {
    return a.edition == b.edition && a.package == b.package && a.imports == b.imports &&
           a.definitions == b.definitions;
  }
};

struct Diagnostic {
  enum class Severity : std::uint8_t { Error = 0, Warning = 1, Info = 2 };
  Severity severity = Severity::Error;
  std::string message;
  Span span;
};

}  // namespace schema
}  // namespace bebop
