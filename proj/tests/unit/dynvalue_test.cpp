#include <gtest/gtest.h>

#include "bebop/compiler.hpp"
#include "bebop/dynvalue.hpp"

using namespace bebop;

namespace {

struct Fixture {
  explicit Fixture(std::string_view src) : reg(compile_source(src).descriptors) {}
  TypeRegistry reg;

  Bytes enc(const TypeDescriptor& t, const Value& v) const { return encode_value(t, v, reg); }
  Bytes enc(std::string_view fqn, const Value& v) const { return enc(TypeDescriptor::defined(std::string(fqn)), v); }
  Value dec(std::string_view fqn, const Bytes& b, DecodeLimits limits = {}) const {
    return decode_value(b, TypeDescriptor::defined(std::string(fqn)), reg, limits);
  }
  ErrorCode dec_error(std::string_view fqn, const Bytes& b, DecodeLimits limits = {}) const {
    try {
      dec(fqn, b, limits);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "decoded without error";
    return ErrorCode::InvalidArgument;
  }
  ErrorCode enc_error(std::string_view fqn, const Value& v) const {
    try {
      enc(fqn, v);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "encoded without error";
    return ErrorCode::InvalidArgument;
  }
};

const char* kExamples = R"(
struct Point { x: float32; y: float32; }
message Request { id(1): int32; name(2): string; }
union Shape { Circle(1): { radius: float32; }; }
struct Coord { x: float32; y: float32; }
message Location { name(1): string; pos(2): Coord; alt(3): float32; }
struct Embedding { id: uuid; values: bfloat16[]; }
struct Embedding1536 { id: uuid; values: bfloat16[1536]; }
enum Color : uint16 { RED = 0; BLUE = 7; }
struct Empty {}
message Tree { value(1): int32; children(2): Tree[]; }
union Either { Left(0): Point; Right(1): Request; }
)";

Value f32(float f) { return Value(Primitive(f)); }

}  // namespace

TEST(DynValue, GoldenPoint) {
  Fixture fx(kExamples);
  const Value p = make_struct({f32(1.0f), f32(2.0f)});
  EXPECT_EQ(to_hex(fx.enc("Point", p)), "00 00 80 3f 00 00 00 40");
  EXPECT_EQ(fx.dec("Point", from_hex("00 00 80 3f 00 00 00 40")), p);
}

TEST(DynValue, GoldenRequest) {
  Fixture fx(kExamples);
  const Value r = make_message({{1, Value(Primitive(std::int32_t{42}))}, {2, Value("test")}});
  const Bytes b = fx.enc("Request", r);
  EXPECT_EQ(to_hex(b), "10 00 00 00 01 2a 00 00 00 02 04 00 00 00 74 65 73 74 00 00");
  EXPECT_EQ(b.size(), 20u);
  EXPECT_EQ(fx.dec("Request", b), r);
}

TEST(DynValue, GoldenShape) {
  Fixture fx(kExamples);
  const Value s = make_union(1, make_struct({f32(5.0f)}));
  EXPECT_EQ(to_hex(fx.enc("Shape", s)), "05 00 00 00 01 00 00 a0 40");
  EXPECT_EQ(fx.dec("Shape", from_hex("05 00 00 00 01 00 00 a0 40")), s);
}

TEST(DynValue, GoldenLocation) {
  Fixture fx(kExamples);
  const Value loc = make_message({{1, Value("HQ")}, {2, make_struct({f32(1.0f), f32(2.0f)})}, {3, f32(100.0f)}});
  const Bytes b = fx.enc("Location", loc);
  EXPECT_EQ(to_hex(b), "17 00 00 00 01 02 00 00 00 48 51 00 02 00 00 80 3f 00 00 00 40 03 00 00 c8 42 00");
  EXPECT_EQ(b.size(), 27u);
  EXPECT_EQ(fx.dec("Location", b), loc);
}

TEST(DynValue, GoldenCollections) {
  Fixture fx(kExamples);
  const auto i32 = TypeDescriptor::primitive(PrimitiveKind::Int32);
  const auto arr = TypeDescriptor::array(i32);
  const Value nums = make_array({Value(Primitive(std::int32_t{1})), Value(Primitive(std::int32_t{2})), Value(Primitive(std::int32_t{3}))});
  EXPECT_EQ(to_hex(fx.enc(arr, nums)), "03 00 00 00 01 00 00 00 02 00 00 00 03 00 00 00");
  EXPECT_EQ(decode_value(from_hex("03 00 00 00 01 00 00 00 02 00 00 00 03 00 00 00"), arr, fx.reg), nums);

  const auto b4 = TypeDescriptor::fixed_array(TypeDescriptor::primitive(PrimitiveKind::Byte), 4);
  EXPECT_EQ(to_hex(fx.enc(b4, Value(Bytes{0xde, 0xad, 0xbe, 0xef}))), "de ad be ef");
  EXPECT_EQ(decode_value(from_hex("de ad be ef"), b4, fx.reg), Value(Bytes{0xde, 0xad, 0xbe, 0xef}));

  const auto m = TypeDescriptor::map(TypeDescriptor::primitive(PrimitiveKind::Byte), i32);
  MapValue mv;
  mv.entries.push_back({Value(Primitive(std::uint8_t{1})), Value(Primitive(std::int32_t{100}))});
  mv.entries.push_back({Value(Primitive(std::uint8_t{2})), Value(Primitive(std::int32_t{200}))});
  EXPECT_EQ(to_hex(fx.enc(m, Value(mv))), "02 00 00 00 01 64 00 00 00 02 c8 00 00 00");
  EXPECT_EQ(decode_value(from_hex("02 00 00 00 01 64 00 00 00 02 c8 00 00 00"), m, fx.reg), Value(mv));
}

TEST(DynValue, GoldenEmbedding) {
  Fixture fx(kExamples);
  std::vector<Value> vals;
  for (float f : {1.0f, 2.0f, 3.0f, 4.0f}) vals.push_back(Value(Primitive(BFloat16::from_float(f))));
  const Value e = make_struct({Value(Primitive(Uuid::parse("550e8400-e29b-41d4-a716-446655440000"))), make_array(vals)});
  const Bytes b = fx.enc("Embedding", e);
  EXPECT_EQ(to_hex(b), "55 0e 84 00 e2 9b 41 d4 a7 16 44 66 55 44 00 00 04 00 00 00 80 3f 00 40 40 40 80 40");
  EXPECT_EQ(b.size(), 28u);
  EXPECT_EQ(fx.dec("Embedding", b), e);
}

TEST(DynValue, FixedEmbeddingSize) {
  Fixture fx(kExamples);
  const Value v = default_value(TypeDescriptor::defined("Embedding1536"), fx.reg);
  EXPECT_EQ(fx.enc("Embedding1536", v).size(), 16u + 1536u * 2u);
}

TEST(DynValue, EnumsAndEmpty) {
  Fixture fx(kExamples);
  EXPECT_EQ(to_hex(fx.enc("Color", Value(EnumValue{Primitive(std::uint16_t{7})}))), "07 00");
  EXPECT_TRUE(fx.enc("Empty", make_struct({})).empty());
  EXPECT_EQ(fx.enc_error("Color", Value(EnumValue{Primitive(std::int32_t{7})})), ErrorCode::TypeMismatch);
}

TEST(DynValue, AbsentFieldsAreNotEncoded) {
  Fixture fx(kExamples);
  const Bytes b = fx.enc("Request", make_message({}));
  EXPECT_EQ(to_hex(b), "01 00 00 00 00");
  EXPECT_EQ(fx.dec("Request", b), make_message({}));
  // Absent differs from a field holding its zero value.
  EXPECT_NE(fx.dec("Request", fx.enc("Request", make_message({{1, Value(Primitive(std::int32_t{0}))}}))), make_message({}));
}

TEST(DynValue, UnknownTagsAreSkipped) {
  Fixture fx(kExamples);
  // Request with an extra tag 9 carrying arbitrary bytes; the reader stops at
  // the unknown tag and jumps to the end of the message.
  const Bytes b = from_hex("0b 00 00 00 01 2a 00 00 00 09 aa bb cc dd 00 ff");
  const Value v = fx.dec("Request", b);
  EXPECT_EQ(v, make_message({{1, Value(Primitive(std::int32_t{42}))}}));
}

TEST(DynValue, DecodeErrors) {
  Fixture fx(kExamples);
  EXPECT_EQ(fx.dec_error("Point", from_hex("00 00 80 3f 00 00")), ErrorCode::Truncated);
  EXPECT_EQ(fx.dec_error("Request", from_hex("05 00 00 00 01 2a 00 00 00")), ErrorCode::MissingEndMarker);
  EXPECT_EQ(fx.dec_error("Request", from_hex("20 00 00 00 00")), ErrorCode::Truncated);
  EXPECT_EQ(fx.dec_error("Shape", from_hex("05 00 00 00 07 00 00 a0 40")), ErrorCode::DiscriminatorUnknown);
  EXPECT_EQ(fx.dec_error("Request", from_hex("0a 00 00 00 02 01 00 00 00 ff 00 00 00 00")), ErrorCode::InvalidUtf8);

  const auto m = TypeDescriptor::map(TypeDescriptor::primitive(PrimitiveKind::Byte), TypeDescriptor::primitive(PrimitiveKind::Byte));
  EXPECT_THROW(decode_value(from_hex("02 00 00 00 01 05 01 06"), m, fx.reg), Error);
  try {
    decode_value(from_hex("02 00 00 00 01 05 01 06"), m, fx.reg);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateMapKey);
  }
  // A count that cannot fit in the remaining bytes fails before allocating.
  const auto arr = TypeDescriptor::array(TypeDescriptor::primitive(PrimitiveKind::Int64));
  try {
    decode_value(from_hex("ff ff ff 7f 00"), arr, fx.reg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Truncated);
  }
}

TEST(DynValue, Limits) {
  Fixture fx(kExamples);
  Value leaf = make_message({{1, Value(Primitive(std::int32_t{1}))}});
  Value tree = leaf;
  for (int i = 0; i < 20; ++i) tree = make_message({{2, make_array({tree})}});
  const Bytes b = fx.enc("Tree", tree);
  EXPECT_EQ(fx.dec("Tree", b), tree);
  DecodeLimits shallow;
  shallow.max_depth = 10;
  EXPECT_EQ(fx.dec_error("Tree", b, shallow), ErrorCode::DepthExceeded);
  DecodeLimits few;
  few.max_elements = 5;
  EXPECT_EQ(fx.dec_error("Tree", b, few), ErrorCode::ElementLimitExceeded);
}

TEST(DynValue, EncodeErrors) {
  Fixture fx(kExamples);
  EXPECT_EQ(fx.enc_error("Point", make_struct({f32(1.0f)})), ErrorCode::TypeMismatch);
  EXPECT_EQ(fx.enc_error("Point", make_struct({f32(1.0f), Value("x")})), ErrorCode::TypeMismatch);
  EXPECT_EQ(fx.enc_error("Request", make_message({{7, Value("x")}})), ErrorCode::TagOutOfRange);
  EXPECT_EQ(fx.enc_error("Shape", make_union(3, make_struct({f32(1.0f)}))), ErrorCode::DiscriminatorUnknown);
  EXPECT_EQ(fx.enc_error("Request", make_message({{2, Value(std::string("\xff"))}})), ErrorCode::InvalidUtf8);
  const auto b4 = TypeDescriptor::fixed_array(TypeDescriptor::primitive(PrimitiveKind::Byte), 4);
  EXPECT_THROW(fx.enc(b4, Value(Bytes{1, 2, 3})), Error);
}

TEST(DynValue, SkipValue) {
  Fixture fx(kExamples);
  const Value loc = make_message({{1, Value("HQ")}, {3, f32(100.0f)}});
  Bytes b = fx.enc("Location", loc);
  const std::size_t first = b.size();
  const Bytes p = fx.enc("Point", make_struct({f32(1.0f), f32(2.0f)}));
  b.insert(b.end(), p.begin(), p.end());
  ByteReader r(b);
  skip_value(r, TypeDescriptor::defined("Location"), fx.reg);
  EXPECT_EQ(r.position(), first);
  skip_value(r, TypeDescriptor::defined("Point"), fx.reg);
  EXPECT_TRUE(r.at_end());
}

TEST(DynValue, UnionOfNamedTypes) {
  Fixture fx(kExamples);
  const Value left = make_union(0, make_struct({f32(1.0f), f32(2.0f)}));
  const Bytes b = fx.enc("Either", left);
  EXPECT_EQ(to_hex(b), "09 00 00 00 00 00 00 80 3f 00 00 00 40");
  EXPECT_EQ(fx.dec("Either", b), left);
  EXPECT_TRUE(conforms(TypeDescriptor::defined("Either"), left, fx.reg));
  std::string why;
  EXPECT_FALSE(conforms(TypeDescriptor::defined("Either"), make_union(1, left), fx.reg, &why));
  EXPECT_FALSE(why.empty());
}
