#include <gtest/gtest.h>

#include "bebop/compiler.hpp"
#include "bebop/evolution.hpp"

using namespace bebop;

namespace {

std::vector<Change> diff(std::string_view before, std::string_view after) {
  return check_evolution(compile_source(before).descriptors, compile_source(after).descriptors);
}

bool has(const std::vector<Change>& changes, std::string_view kind, Verdict v) {
  for (const auto& c : changes) {
    if (c.change == kind && c.verdict == v) return true;
  }
  return false;
}

struct Row {
  const char* before;
  const char* after;
  const char* change;
  Verdict verdict;
};

}  // namespace

TEST(Evolution, TableRows) {
  const Row rows[] = {
      {"message M { a(1): int32; }", "message M { a(1): int32; b(5): string; }", "Add field", Verdict::Safe},
      {"message M { a(1): int32; }", "message M { @deprecated a(1): int32; }", "Deprecate field", Verdict::Safe},
      {"message M { a(1): int32; }", "message M { renamed(1): int32; }", "Rename field", Verdict::Safe},
      {"message M { a(1): int32; }", "message M { a(1): string; }", "Change field type", Verdict::Breaking},
      {"message M { a(1): int32; }", "message M { a(2): int32; }", "Change tag number", Verdict::Breaking},
      {"struct S { a: int32; }", "struct S { a: int32; b: int32; }", "Add field", Verdict::Breaking},
      {"struct S { a: int32; b: int32; }", "struct S { a: int32; }", "Remove field", Verdict::Breaking},
      {"struct S { a: int32; b: float32; }", "struct S { b: float32; a: int32; }", "Reorder fields", Verdict::Breaking},
      {"struct S { a: int32; }", "struct S { a: int64; }", "Change field type", Verdict::Breaking},
      {"struct P {} union U { A(1): P; }", "struct P {} union U { A(1): P; B(2): { x: int32; }; }", "Add branch", Verdict::Safe},
      {"struct P {} union U { A(1): P; B(2): P; }", "struct P {} union U { A(1): P; }", "Remove branch", Verdict::Breaking},
      {"struct P {} struct Q {} union U { A(1): P; }", "struct P {} struct Q {} union U { A(1): Q; }", "Change branch type", Verdict::Breaking},
      {"enum E { A = 0; }", "enum E { A = 0; B = 1; }", "Add value", Verdict::Safe},
      {"enum E { A = 0; B = 1; }", "enum E { A = 0; }", "Remove value", Verdict::Breaking},
      {"enum E : uint8 { A = 0; }", "enum E : uint32 { A = 0; }", "Change base type", Verdict::Breaking},
  };
  for (const auto& row : rows) {
    const auto changes = diff(row.before, row.after);
    EXPECT_TRUE(has(changes, row.change, row.verdict)) << row.before << " -> " << row.after;
    EXPECT_EQ(has_breaking(changes), row.verdict == Verdict::Breaking) << row.before << " -> " << row.after;
  }
}

TEST(Evolution, IdenticalSchemasHaveNoChanges) {
  const char* src = "enum E { A = 0; } struct S { a: int32; } message M { a(1): S; } union U { A(1): M; } struct R {} service Svc { Go(R): R; }";
  EXPECT_TRUE(diff(src, src).empty());
}

TEST(Evolution, ReasonsMatchTable) {
  const auto changes = diff("message M { a(1): int32; }", "message M { a(1): string; }");
  ASSERT_EQ(changes.size(), 1u);
  EXPECT_EQ(changes[0].reason, "Never reuse tag with different type");
  EXPECT_EQ(format_change(changes[0]), "breaking: M.a: Change field type (Never reuse tag with different type)");
}

TEST(Evolution, DefinitionLevelChanges) {
  EXPECT_TRUE(has(diff("struct A {}", "message A {}"), "Change definition kind", Verdict::Breaking));
  EXPECT_TRUE(has(diff("struct A {} struct B {}", "struct A {}"), "Remove definition", Verdict::Breaking));
  EXPECT_FALSE(has_breaking(diff("struct A {}", "struct A {} struct B {}")));
  EXPECT_TRUE(has(diff("enum E { A = 0; }", "enum E { RENAMED = 0; }"), "Rename value", Verdict::Safe));
  EXPECT_TRUE(has(diff("message M { a(1): int32; }", "message M { }"), "Remove field", Verdict::Breaking));
  EXPECT_TRUE(has(diff("struct R {} service S { A(R): R; }", "struct R {} service S { A(R): stream R; }"),
                  "Change method streaming", Verdict::Breaking));
  EXPECT_FALSE(has_breaking(diff("struct R {} service S { A(R): R; }", "struct R {} service S { A(R): R; B(R): R; }")));
}
