#include "bebop/bench/golden.hpp"

#include "bebop/compiler.hpp"

namespace bebop::bench {

const char* const kGoldenSchema = R"(
struct Point { x: float32; y: float32; }
message Request { id(1): int32; name(2): string; }
union Shape { Circle(1): { radius: float32; }; }
struct Coord { x: float32; y: float32; }
message Location { name(1): string; pos(2): Coord; alt(3): float32; }
struct Embedding { id: uuid; values: bfloat16[]; }
)";

namespace {

Value prim(Primitive p) { return Value(std::move(p)); }
Value f32(float f) { return prim(f); }
Value i32(std::int32_t v) { return prim(v); }

TypeDescriptor defined(const char* fqn) { return TypeDescriptor::defined(fqn); }
TypeDescriptor primitive(PrimitiveKind k) { return TypeDescriptor::primitive(k); }

}  // namespace

GoldenSuite golden_suite() {
  GoldenSuite s{TypeRegistry(compile_source(kGoldenSchema, "golden.bop").descriptors), {}};
  auto& v = s.vectors;
  const Uuid id = Uuid::parse("550e8400-e29b-41d4-a716-446655440000");

  v.push_back({"string", TypeDescriptor::string(), Value("hello"), "05 00 00 00 68 65 6c 6c 6f 00"});
  v.push_back({"int32[]", TypeDescriptor::array(primitive(PrimitiveKind::Int32)), make_array({i32(1), i32(2), i32(3)}),
               "03 00 00 00 01 00 00 00 02 00 00 00 03 00 00 00"});
  v.push_back({"byte[4]", TypeDescriptor::fixed_array(primitive(PrimitiveKind::Byte), 4), Value(Bytes{0xde, 0xad, 0xbe, 0xef}),
               "de ad be ef"});

  MapValue m;
  m.entries.push_back({prim(std::uint8_t{1}), i32(100)});
  m.entries.push_back({prim(std::uint8_t{2}), i32(200)});
  v.push_back({"map[uint8, int32]", TypeDescriptor::map(primitive(PrimitiveKind::Byte), primitive(PrimitiveKind::Int32)),
               Value(std::move(m)), "02 00 00 00 01 64 00 00 00 02 c8 00 00 00"});

  v.push_back({"Point", defined("Point"), make_struct({f32(1.0f), f32(2.0f)}), "00 00 80 3f 00 00 00 40"});
  v.push_back({"Request", defined("Request"), make_message({{1, i32(42)}, {2, Value("test")}}),
               "10 00 00 00 01 2a 00 00 00 02 04 00 00 00 74 65 73 74 00 00"});
  v.push_back({"Shape", defined("Shape"), make_union(1, make_struct({f32(5.0f)})), "05 00 00 00 01 00 00 a0 40"});
  v.push_back({"Location", defined("Location"),
               make_message({{1, Value("HQ")}, {2, make_struct({f32(1.0f), f32(2.0f)})}, {3, f32(100.0f)}}),
               "17 00 00 00 01 02 00 00 00 48 51 00 02 00 00 80 3f 00 00 00 40 03 00 00 c8 42 00"});
  v.push_back({"timestamp", primitive(PrimitiveKind::Timestamp), prim(Timestamp{1000, 1'000'000'000, 32'400'000}),
               "e8 03 00 00 00 00 00 00 00 ca 9a 3b 80 62 ee 01"});
  v.push_back({"duration", primitive(PrimitiveKind::Duration), prim(Duration{60, 0}), "3c 00 00 00 00 00 00 00 00 00 00 00"});
  v.push_back({"uuid", primitive(PrimitiveKind::Uuid), prim(id), "55 0e 84 00 e2 9b 41 d4 a7 16 44 66 55 44 00 00"});

  std::vector<Value> values;
  for (float f : {1.0f, 2.0f, 3.0f, 4.0f}) values.push_back(prim(BFloat16::from_float(f)));
  v.push_back({"Embedding", defined("Embedding"), make_struct({prim(id), make_array(std::move(values))}),
               "55 0e 84 00 e2 9b 41 d4 a7 16 44 66 55 44 00 00 04 00 00 00 80 3f 00 40 40 40 80 40"});
  return s;
}

std::vector<GoldenResult> check_golden(const GoldenSuite& suite) {
  std::vector<GoldenResult> out;
  for (const auto& g : suite.vectors) {
    GoldenResult r;
    r.name = g.name;
    r.expected_hex = g.hex;
    try {
      r.actual_hex = to_hex(encode_value(g.type, g.value, suite.registry));
      r.encode_ok = r.actual_hex == g.hex;
      const Bytes expected = from_hex(g.hex);
      ByteReader in(expected);
      const Value back = decode_value(in, g.type, suite.registry);
      r.decode_ok = back == g.value && in.remaining() == 0;
    } catch (const Error& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace bebop::bench
