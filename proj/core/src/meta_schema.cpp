#include "bebop/meta_schema.hpp"

#include <string>

namespace bebop::meta {

namespace {

constexpr std::string_view kDescriptorSource = R"bop(edition = "2026"
package bebop

enum DefinitionKind : byte {
  UNKNOWN = 0;
  ENUM = 1;
  STRUCT = 2;
  MESSAGE = 3;
  UNION = 4;
  SERVICE = 5;
  CONST = 6;
}

enum Visibility : byte {
  EXPORT = 0;
  LOCAL = 1;
}

enum TypeKind : byte {
  UNKNOWN = 0;
  BOOL = 1;
  BYTE = 2;
  INT8 = 3;
  INT16 = 4;
  UINT16 = 5;
  INT32 = 6;
  UINT32 = 7;
  INT64 = 8;
  UINT64 = 9;
  INT128 = 10;
  UINT128 = 11;
  FLOAT16 = 12;
  BFLOAT16 = 13;
  FLOAT32 = 14;
  FLOAT64 = 15;
  UUID = 16;
  TIMESTAMP = 17;
  DURATION = 18;
  STRING = 19;
  ARRAY = 20;
  FIXED_ARRAY = 21;
  MAP = 22;
  DEFINED = 23;
}

message TypeDescriptor {
  kind(1): TypeKind;
  element(2): TypeDescriptor;
  key(3): TypeDescriptor;
  value(4): TypeDescriptor;
  fixed_length(5): uint32;
  defined_fqn(6): string;
}

union LiteralValue {
  Bool(1): { value: bool; };
  Int(2): { value: int64; };
  UInt(3): { value: uint64; };
  Float(4): { value: float64; };
  String(5): { value: string; };
  Bytes(6): { value: byte[]; };
  Timestamp(7): { value: timestamp; };
  Duration(8): { value: duration; };
  Uuid(9): { value: uuid; };
}

message DecoratorArgument {
  name(1): string;
  value(2): LiteralValue;
}

message DecoratorUsage {
  name(1): string;
  arguments(2): DecoratorArgument[];
}

message FieldDescriptor {
  name(1): string;
  type(2): TypeDescriptor;
  tag(3): byte;
  documentation(4): string;
  decorators(5): DecoratorUsage[];
}

message EnumMemberDescriptor {
  name(1): string;
  value(2): uint64;
  documentation(3): string;
  decorators(4): DecoratorUsage[];
}

message EnumDef {
  base_type(1): TypeKind;
  members(2): EnumMemberDescriptor[];
}

message StructDef {
  fields(1): FieldDescriptor[];
  mutable(2): bool;
}

message MessageDef {
  fields(1): FieldDescriptor[];
}

message UnionBranchDescriptor {
  discriminator(1): byte;
  name(2): string;
  type_fqn(3): string;
  documentation(4): string;
  decorators(5): DecoratorUsage[];
  inline(6): bool;
}

message UnionDef {
  branches(1): UnionBranchDescriptor[];
}

message MethodDescriptor {
  name(1): string;
  request_type(2): string;
  response_type(3): string;
  request_stream(4): bool;
  response_stream(5): bool;
  routing_id(6): uint32;
  documentation(7): string;
  decorators(8): DecoratorUsage[];
}

message ServiceDef {
  methods(1): MethodDescriptor[];
}

message ConstDef {
  type(1): TypeDescriptor;
  value(2): LiteralValue;
}

message DefinitionDescriptor {
  kind(1): DefinitionKind;
  name(2): string;
  fqn(3): string;
  documentation(4): string;
  visibility(5): Visibility;
  decorators(6): DecoratorUsage[];
  nested(7): DefinitionDescriptor[];
  enum_def(8): EnumDef;
  struct_def(9): StructDef;
  message_def(10): MessageDef;
  union_def(11): UnionDef;
  service_def(12): ServiceDef;
  const_def(13): ConstDef;
}

message SchemaDescriptor {
  name(1): string;
  package(2): string;
  definitions(3): DefinitionDescriptor[];
}

message DescriptorSet {
  schemas(1): SchemaDescriptor[];
}
)bop";

constexpr std::string_view kPluginSource = R"bop(edition = "2026"
package bebop

import "bebop/descriptor.bop"

struct Version {
  major: uint32;
  minor: uint32;
  patch: uint32;
}

enum Severity : byte {
  ERROR = 0;
  WARNING = 1;
  INFO = 2;
}

message SourceSpan {
  file(1): string;
  line(2): uint32;
  column(3): uint32;
  length(4): uint32;
}

message Diagnostic {
  severity(1): Severity;
  message(2): string;
  span(3): SourceSpan;
}

message GeneratedFile {
  name(1): string;
  content(2): string;
}

message CodeGeneratorRequest {
  files_to_generate(1): string[];
  parameter(2): string;
  compiler_version(3): Version;
  schemas(4): SchemaDescriptor[];
}

message CodeGeneratorResponse {
  error(1): string;
  files(2): GeneratedFile[];
  diagnostics(3): Diagnostic[];
}
)bop";

constexpr std::string_view kRpcSource = R"bop(edition = "2026"
package bebop

message CallHeader {
  method_id(1): uint32;
  deadline(2): timestamp;
  metadata(3): map[string, byte[]];
  cursor(4): uint64;
}

message ErrorPayload {
  code(1): byte;
  message(2): string;
  details(3): byte[];
}

message BatchCall {
  call_id(1): int32;
  method_id(2): uint32;
  payload(3): byte[];
  input_from(4): int32;
}

message BatchRequest {
  calls(1): BatchCall[];
  deadline(2): timestamp;
  metadata(3): map[string, byte[]];
}

message BatchResult {
  call_id(1): int32;
  status(2): byte;
  payload(3): byte[];
  stream_payloads(4): byte[][];
  error_message(5): string;
}

message BatchResponse {
  results(1): BatchResult[];
}

message UnaryCall {
  method_id(1): uint32;
  payload(2): byte[];
  metadata(3): map[string, byte[]];
}

message FutureDispatchRequest {
  call(1): UnaryCall;
  batch(2): BatchRequest;
  deadline(3): timestamp;
  idempotency_key(4): uuid;
  discard_result(5): bool;
}

message FutureHandle {
  id(1): uuid;
}

message FutureResolveRequest {
  ids(1): uuid[];
}

message FutureResult {
  id(1): uuid;
  status(2): byte;
  payload(3): byte[];
  metadata(4): map[string, byte[]];
  error_message(5): string;
}

message FutureCancelRequest {
  id(1): uuid;
}

message Empty {
}
)bop";

}  // namespace

const std::vector<schema::SourceFile>& sources() {
  static const std::vector<schema::SourceFile> files{
      {std::string(kDescriptorPath), std::string(kDescriptorSource)},
      {std::string(kPluginPath), std::string(kPluginSource)},
      {std::string(kRpcPath), std::string(kRpcSource)},
  };
  return files;
}

const TypeRegistry& registry() {
  static const TypeRegistry reg = [] {
    schema::ResolveOptions options;
    options.env = [](std::string_view) { return std::optional<std::string>(); };
    auto resolved = schema::resolve(sources(), schema::memory_loader(sources()), options);
    return TypeRegistry(build_descriptor_set(resolved));
  }();
  return reg;
}

TypeDescriptor type(std::string_view name) { return TypeDescriptor::defined("bebop." + std::string(name)); }

}  // namespace bebop::meta
