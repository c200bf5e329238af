#include <gtest/gtest.h>

#include <map>
#include <random>

#include "bebop/compiler.hpp"
#include "bebop/descriptor.hpp"
#include "bebop/meta_schema.hpp"

using namespace bebop;

namespace {

std::vector<std::string> names(const SchemaDescriptor& s) {
  std::vector<std::string> out;
  for (const auto& d : s.definitions) out.push_back(d.name);
  return out;
}

}  // namespace

TEST(Descriptor, DependencyBeforeDependent) {
  const auto c = compile_source("struct B { a: A; }\nstruct A { x: int32; }");
  EXPECT_EQ(names(c.descriptors.schemas.at(0)), (std::vector<std::string>{"A", "B"}));
}

TEST(Descriptor, CyclesKeepSourceOrder) {
  const auto c = compile_source("message Z { }\nmessage Odd { e(1): Even; }\nmessage Even { o(1): Odd; z(2): Z; }\nmessage Tree { l(1): Tree; }");
  EXPECT_EQ(names(c.descriptors.schemas.at(0)), (std::vector<std::string>{"Z", "Odd", "Even", "Tree"}));
  const Bytes once = encode_descriptor_set(c.descriptors);
  const Bytes twice = encode_descriptor_set(compile_source("message Z { }\nmessage Odd { e(1): Even; }\nmessage Even { o(1): Odd; z(2): Z; }\nmessage Tree { l(1): Tree; }").descriptors);
  EXPECT_EQ(once, twice);
}

TEST(Descriptor, NestedReferencesLiftToTopLevel) {
  const auto c = compile_source("struct Outer { struct In { t: Target; } i: In; }\nstruct Target {}\nservice S with T {}\nservice T { }");
  EXPECT_EQ(names(c.descriptors.schemas.at(0)), (std::vector<std::string>{"Target", "Outer", "T", "S"}));
}

TEST(Descriptor, PointExample) {
  const auto c = compile_source("edition = \"2026\"\npackage my.app\n\nstruct Point {\n    x: float32;\n    y: float32;\n}\n");
  ASSERT_EQ(c.descriptors.schemas.size(), 1u);
  const auto& s = c.descriptors.schemas[0];
  EXPECT_EQ(s.package, "my.app");
  ASSERT_EQ(s.definitions.size(), 1u);
  EXPECT_EQ(s.definitions[0].fqn, "my.app.Point");
  EXPECT_EQ(s.definitions[0].kind, DefinitionKind::Struct);
  ASSERT_TRUE(s.definitions[0].struct_def);
  EXPECT_EQ(s.definitions[0].struct_def->fields[1].type, TypeDescriptor::primitive(PrimitiveKind::Float32));
}

TEST(Descriptor, EmptySetEncoding) {
  EXPECT_EQ(encode_descriptor_set({}), (Bytes{0x01, 0x00, 0x00, 0x00, 0x00}));
  EXPECT_EQ(decode_descriptor_set(Bytes{0x01, 0x00, 0x00, 0x00, 0x00}), DescriptorSet{});
}

TEST(Descriptor, RoundtripEverything) {
  const auto c = compile_source(R"(
package demo
/// Documentation comment
enum Status : uint8 { UNKNOWN = 0; ACTIVE = 1; }
enum Neg : int16 { Z = 0; N = -5; }
mut struct P { x: float32; y: byte[4]; }
#decorator(range) { targets = FIELD | METHOD
  param min!: int32
  param max?: float64
  param note?: string }
message M {
  @deprecated("gone") @range(1, max: 2.5, note: "n")
  a(1): map[string, P[]];
  b(2): Status;
  struct Inner { z: int64; }
  c(3): Inner;
  d(4): timestamp;
}
union U { A(1): { v: string; }; B(2): message { w(1): bool; }; C(3): P; }
service S { @range(min: 3) Go(M): stream M; Up(stream P): U; }
const string HOST = "localhost";
const float64 PI = 3.25;
const byte[] MAGIC = b"\x00\xff";
const timestamp T0 = "2024-01-15T10:30:00Z";
const duration D = "1h";
const uuid ID = "550e8400-e29b-41d4-a716-446655440000";
const bool YES = true;
const int64 NEG = -9;
const uint64 BIG = 18446744073709551615;
)");
  const Bytes bytes = encode_descriptor_set(c.descriptors);
  const DescriptorSet back = decode_descriptor_set(bytes);
  EXPECT_EQ(back, c.descriptors);
  EXPECT_EQ(encode_descriptor_set(back), bytes);
  const auto* status = find_definition(back, "demo.Status");
  ASSERT_NE(status, nullptr);
  EXPECT_EQ(status->documentation, "Documentation comment");
  EXPECT_EQ(find_definition(back, "demo.U.A")->visibility, Visibility::Local);
  EXPECT_EQ(find_definition(back, "range"), nullptr);
}

TEST(Descriptor, MetaSchemaDescribesItself) {
  const auto& reg = meta::registry();
  const auto* def = reg.find("bebop.DefinitionDescriptor");
  ASSERT_NE(def, nullptr);
  ASSERT_TRUE(def->message_def);
  const auto& fields = def->message_def->fields;
  ASSERT_EQ(fields.size(), 13u);
  const std::vector<std::string> expected{"kind", "name", "fqn", "documentation", "visibility",
                                          "decorators", "nested", "enum_def", "struct_def", "message_def",
                                          "union_def", "service_def", "const_def"};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    EXPECT_EQ(fields[i].name, expected[i]);
    EXPECT_EQ(fields[i].tag, i + 1);
  }
  const auto& req = reg.get("bebop.CodeGeneratorRequest").message_def->fields;
  EXPECT_EQ(req[0].name, "files_to_generate");
  EXPECT_EQ(req[3].type, TypeDescriptor::array(TypeDescriptor::defined("bebop.SchemaDescriptor")));

  // The meta-schema's own descriptors survive a trip through their encoding.
  const Bytes b = encode_descriptor_set(reg.set());
  EXPECT_EQ(decode_descriptor_set(b), reg.set());
}

TEST(Descriptor, TypeKindNumbering) {
  const auto& e = meta::registry().get("bebop.TypeKind").enum_def->members;
  std::map<std::string, std::uint64_t> by_name;
  for (const auto& m : e) by_name[m.name] = m.value;
  EXPECT_EQ(by_name["BOOL"], static_cast<std::uint64_t>(TypeKind::Bool));
  EXPECT_EQ(by_name["DURATION"], static_cast<std::uint64_t>(TypeKind::Duration));
  EXPECT_EQ(by_name["STRING"], static_cast<std::uint64_t>(TypeKind::String));
  EXPECT_EQ(by_name["DEFINED"], static_cast<std::uint64_t>(TypeKind::Defined));
  for (std::size_t k = 0; k < kPrimitiveKindCount; ++k) {
    EXPECT_EQ(primitive_of(type_kind_of(static_cast<PrimitiveKind>(k))), static_cast<PrimitiveKind>(k));
  }
}

TEST(Descriptor, TruncatedInputFails) {
  const auto c = compile_source("struct A { x: int32; }\nmessage B { a(1): A; }");
  const Bytes bytes = encode_descriptor_set(c.descriptors);
  for (std::size_t n = 0; n + 1 < bytes.size(); n += 3) {
    EXPECT_THROW(decode_descriptor_set(ByteView(bytes).first(n)), Error) << n;
  }
}

TEST(Descriptor, TopologicalPropertyOnRandomSchemas) {
  std::mt19937 rng(17);
  for (int iter = 0; iter < 200; ++iter) {
    const int n = 2 + static_cast<int>(rng() % 8);
    std::string src;
    std::vector<std::vector<int>> uses(n);
    for (int i = 0; i < n; ++i) {
      src += "message T" + std::to_string(i) + " {";
      int tag = 1;
      for (int j = 0; j < n; ++j) {
        if (j != i && rng() % 3 == 0) {
          src += " f" + std::to_string(j) + "(" + std::to_string(tag++) + "): T" + std::to_string(j) + ";";
          uses[i].push_back(j);
        }
      }
      src += " }\n";
    }
    const auto c = compile_source(src);
    std::map<std::string, std::size_t> pos;
    const auto order = names(c.descriptors.schemas[0]);
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
    // reach[i][j]: j reachable from i.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) {
      for (int j : uses[i]) reach[i][j] = true;
    }
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j : uses[i]) {
        if (reach[j][i]) continue;
        EXPECT_LT(pos["T" + std::to_string(j)], pos["T" + std::to_string(i)]) << src;
      }
    }
  }
}
