#pragma once

// Compiled schema form. Definitions within each file are sorted so that
// dependencies come first.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bebop/schema/ast.hpp"
#include "bebop/wire.hpp"

namespace bebop {

namespace schema {
struct ResolvedSchema;
}

/// Owning pointer with value semantics, for recursive descriptor types.
template <typename T>
class Box {
 public:
  Box() = default;
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr;
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  explicit operator bool() const noexcept { return ptr_ != nullptr; }
  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }
  T* get() noexcept { return ptr_.get(); }
  const T* get() const noexcept { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) {
    if (!a.ptr_ || !b.ptr_) return !a.ptr_ && !b.ptr_;
    return *a.ptr_ == *b.ptr_;
  }

 private:
  std::unique_ptr<T> ptr_;
};

/// One kind per wire type. Primitive kinds are PrimitiveKind + 1.
enum class TypeKind : std::uint8_t {
  Unknown = 0,
  Bool,
  Byte,
  Int8,
  Int16,
  UInt16,
  Int32,
  UInt32,
  Int64,
  UInt64,
  Int128,
  UInt128,
  Float16,
  BFloat16,
  Float32,
  Float64,
  Uuid,
  Timestamp,
  Duration,
  String,
  Array,
  FixedArray,
  Map,
  Defined,
};

constexpr TypeKind type_kind_of(PrimitiveKind k) noexcept {
  return static_cast<TypeKind>(static_cast<std::uint8_t>(k) + 1);
}
constexpr bool is_primitive(TypeKind k) noexcept {
  return k >= TypeKind::Bool && k <= TypeKind::Duration;
}
constexpr PrimitiveKind primitive_of(TypeKind k) noexcept {
  return static_cast<PrimitiveKind>(static_cast<std::uint8_t>(k) - 1);
}

struct TypeDescriptor {
  TypeKind kind = TypeKind::Unknown;
  /// Array and FixedArray.
  Box<TypeDescriptor> element;
  /// Map.
  Box<TypeDescriptor> key;
  Box<TypeDescriptor> value;
  std::uint32_t fixed_length = 0;
  /// Defined.
  std::string defined_fqn;

  static TypeDescriptor primitive(PrimitiveKind k) {
    TypeDescriptor t;
    t.kind = type_kind_of(k);
    return t;
  }
  static TypeDescriptor string() {
    TypeDescriptor t;
    t.kind = TypeKind::String;
    return t;
  }
  static TypeDescriptor array(TypeDescriptor element) {
    TypeDescriptor t;
    t.kind = TypeKind::Array;
    t.element = std::move(element);
    return t;
  }
  static TypeDescriptor fixed_array(TypeDescriptor element, std::uint32_t length) {
    TypeDescriptor t;
    t.kind = TypeKind::FixedArray;
    t.element = std::move(element);
    t.fixed_length = length;
    return t;
  }
  static TypeDescriptor map(TypeDescriptor key, TypeDescriptor value) {
    TypeDescriptor t;
    t.kind = TypeKind::Map;
    t.key = std::move(key);
    t.value = std::move(value);
    return t;
  }
  static TypeDescriptor defined(std::string fqn) {
    TypeDescriptor t;
    t.kind = TypeKind::Defined;
    t.defined_fqn = std::move(fqn);
    return t;
  }

  friend bool operator==(const TypeDescriptor&, const TypeDescriptor&) = default;
};

std::string to_string(const TypeDescriptor& type);

struct DecoratorArgument {
  std::string name;
  Literal value;
  friend bool operator==(const DecoratorArgument&, const DecoratorArgument&) = default;
};

struct DecoratorUsage {
  std::string name;
  std::vector<DecoratorArgument> arguments;
  friend bool operator==(const DecoratorUsage&, const DecoratorUsage&) = default;
};

struct FieldDescriptor {
  std::string name;
  TypeDescriptor type;
  /// Messages only; 0 for struct fields.
  std::uint32_t tag = 0;
  std::string documentation;
  std::vector<DecoratorUsage> decorators;
  friend bool operator==(const FieldDescriptor&, const FieldDescriptor&) = default;
};

struct EnumMemberDescriptor {
  std::string name;
  /// Two's-complement bits of the member value.
  std::uint64_t value = 0;
  std::string documentation;
  std::vector<DecoratorUsage> decorators;
  friend bool operator==(const EnumMemberDescriptor&, const EnumMemberDescriptor&) = default;
};

struct EnumDef {
  PrimitiveKind base = PrimitiveKind::UInt32;
  std::vector<EnumMemberDescriptor> members;
  friend bool operator==(const EnumDef&, const EnumDef&) = default;
};

struct StructDef {
  std::vector<FieldDescriptor> fields;
  bool is_mutable = false;
  friend bool operator==(const StructDef&, const StructDef&) = default;
};

struct MessageDef {
  std::vector<FieldDescriptor> fields;
  friend bool operator==(const MessageDef&, const MessageDef&) = default;
};

struct UnionBranchDescriptor {
  std::uint8_t discriminator = 0;
  std::string name;
  std::string type_fqn;
  std::string documentation;
  std::vector<DecoratorUsage> decorators;
  bool is_inline = false;
  friend bool operator==(const UnionBranchDescriptor&, const UnionBranchDescriptor&) = default;
};

struct UnionDef {
  std::vector<UnionBranchDescriptor> branches;
  friend bool operator==(const UnionDef&, const UnionDef&) = default;
};

struct MethodDescriptor {
  std::string name;
  std::string request_type;
  std::string response_type;
  bool request_stream = false;
  bool response_stream = false;
  std::uint32_t routing_id = 0;
  std::string documentation;
  std::vector<DecoratorUsage> decorators;
  friend bool operator==(const MethodDescriptor&, const MethodDescriptor&) = default;
};

struct ServiceDef {
  std::vector<MethodDescriptor> methods;
  friend bool operator==(const ServiceDef&, const ServiceDef&) = default;
};

struct ConstDef {
  TypeDescriptor type;
  Literal value;
  friend bool operator==(const ConstDef&, const ConstDef&) = default;
};

struct DefinitionDescriptor {
  DefinitionKind kind = DefinitionKind::Unknown;
  std::string name;
  std::string fqn;
  std::string documentation;
  Visibility visibility = Visibility::Exported;
  std::vector<DecoratorUsage> decorators;
  std::vector<DefinitionDescriptor> nested;
  std::optional<EnumDef> enum_def;
  std::optional<StructDef> struct_def;
  std::optional<MessageDef> message_def;
  std::optional<UnionDef> union_def;
  std::optional<ServiceDef> service_def;
  std::optional<ConstDef> const_def;
  friend bool operator==(const DefinitionDescriptor&, const DefinitionDescriptor&) = default;
};

struct SchemaDescriptor {
  std::string name;
  std::string package;
  std::vector<DefinitionDescriptor> definitions;
  friend bool operator==(const SchemaDescriptor&, const SchemaDescriptor&) = default;
};

struct DescriptorSet {
  std::vector<SchemaDescriptor> schemas;
  friend bool operator==(const DescriptorSet&, const DescriptorSet&) = default;
};

/// Fast fqn lookup over a descriptor set. Keeps a shared reference to the set,
/// so lookups stay valid for the registry's lifetime.
class TypeRegistry {
 public:
  TypeRegistry() = default;
  explicit TypeRegistry(DescriptorSet set);
  explicit TypeRegistry(std::shared_ptr<const DescriptorSet> set);

  const DefinitionDescriptor* find(std::string_view fqn) const;
  /// Throws Error(UnresolvedType) when absent.
  const DefinitionDescriptor& get(std::string_view fqn) const;
  const DescriptorSet& set() const { return *set_; }

  /// Merges definitions from another set; later duplicates are ignored.
  void add(std::shared_ptr<const DescriptorSet> set);

 private:
  void index(const DescriptorSet& set);
  void index(const DefinitionDescriptor& def);

  std::shared_ptr<const DescriptorSet> set_ = std::make_shared<DescriptorSet>();
  std::vector<std::shared_ptr<const DescriptorSet>> extra_;
  std::map<std::string, const DefinitionDescriptor*, std::less<>> by_fqn_;
};

/// Lowers a resolved schema. Definitions in each file are topologically
/// sorted; recursive groups keep source order, and groups are placed by their
/// earliest member. Throws Error(ReservedCollision) when routing IDs clash.
DescriptorSet build_descriptor_set(const schema::ResolvedSchema& resolved);

Bytes encode_descriptor_set(const DescriptorSet& set);
DescriptorSet decode_descriptor_set(ByteView bytes);

/// Finds `fqn` anywhere in the set, including nested definitions.
const DefinitionDescriptor* find_definition(const DescriptorSet& set, std::string_view fqn);

}  // namespace bebop
