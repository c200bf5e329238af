#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bebop/wire.hpp"

using namespace bebop;

namespace {

Bytes encoded(const Primitive& p) {
  ByteWriter w;
  w.write_fixed(p);
  return w.take();
}

}  // namespace

TEST(Wire, Float32Point) {
  EXPECT_EQ(to_hex(encoded(Primitive(1.0f))), "00 00 80 3f");
  EXPECT_EQ(to_hex(encoded(Primitive(2.0f))), "00 00 00 40");
}

TEST(Wire, UInt128LowFirst) {
  EXPECT_EQ(encoded(Primitive(UInt128{1, 0})), from_hex("01 00 00 00 00 00 00 00 00 00 00 00 00 00 00 00"));
  EXPECT_EQ(encoded(Primitive(Int128{0, -1})), from_hex("00 00 00 00 00 00 00 00 ff ff ff ff ff ff ff ff"));
}

TEST(Wire, TimestampLayout) {
  // The byte pattern fixes nanos at 0x3b9aca00.
  const Bytes bytes = from_hex("e8 03 00 00 00 00 00 00 00 ca 9a 3b 80 62 ee 01");
  ByteReader r(bytes);
  const Timestamp ts = r.read_timestamp();
  EXPECT_EQ(ts.seconds, 1000);
  EXPECT_EQ(ts.nanos, 1000000000);
  EXPECT_EQ(ts.offset_ms, 32400000);
  EXPECT_EQ(encoded(Primitive(ts)), bytes);
}

TEST(Wire, DurationLayout) {
  EXPECT_EQ(to_hex(encoded(Primitive(Duration{60, 0}))), "3c 00 00 00 00 00 00 00 00 00 00 00");
  const Duration neg = Duration::from_nanos(-1'500'000'000);
  EXPECT_EQ(neg.seconds, -1);
  EXPECT_EQ(neg.nanos, -500'000'000);
}

TEST(Wire, UuidMatchesCanonicalText) {
  const Uuid id = Uuid::parse("550e8400-e29b-41d4-a716-446655440000");
  EXPECT_EQ(to_hex(encoded(Primitive(id))), "55 0e 84 00 e2 9b 41 d4 a7 16 44 66 55 44 00 00");
  EXPECT_EQ(id.to_string(), "550e8400-e29b-41d4-a716-446655440000");
  EXPECT_EQ(Uuid::parse("550E8400-E29B-41D4-A716-446655440000"), id);
  Uuid out;
  EXPECT_FALSE(Uuid::try_parse("550e8400e29b41d4a716446655440000", out));
  EXPECT_FALSE(Uuid::try_parse("550e8400-e29b-41d4-a716-44665544000g", out));
}

TEST(Wire, RandomUuidIsVersion4) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const Uuid id = Uuid::random_v4(rng);
    EXPECT_EQ(id.bytes[6] >> 4, 4);
    EXPECT_EQ(id.bytes[8] & 0xc0, 0x80);
  }
}

TEST(Wire, ReadInt32) {
  const Bytes pos = from_hex("2a 00 00 00");
  const Bytes neg = from_hex("ff ff ff ff");
  ByteReader a(pos);
  EXPECT_EQ(a.read_le<std::int32_t>(), 42);
  ByteReader b(neg);
  EXPECT_EQ(b.read_le<std::int32_t>(), -1);
}

TEST(Wire, EmptyInputIsTruncated) {
  ByteReader r(ByteView{});
  try {
    r.read_fixed(PrimitiveKind::Byte);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Truncated);
  }
}

TEST(Wire, BoolEncoding) {
  EXPECT_EQ(encoded(Primitive(true)), Bytes{0x01});
  EXPECT_EQ(encoded(Primitive(false)), Bytes{0x00});
  const Bytes b{0x7f};
  ByteReader r(b);
  EXPECT_TRUE(r.read_bool());
}

TEST(Wire, Strings) {
  ByteWriter w;
  w.write_string("hello");
  EXPECT_EQ(to_hex(w.bytes()), "05 00 00 00 68 65 6c 6c 6f 00");
  w.clear();
  w.write_string("");
  EXPECT_EQ(to_hex(w.bytes()), "00 00 00 00 00");
  w.clear();
  w.write_string("HQ");
  EXPECT_EQ(to_hex(w.bytes()), "02 00 00 00 48 51 00");

  const Bytes hello = from_hex("05 00 00 00 68 65 6c 6c 6f 00");
  ByteReader r(hello);
  const std::string_view view = r.read_string();
  EXPECT_EQ(view, "hello");
  EXPECT_EQ(reinterpret_cast<const std::uint8_t*>(view.data()), hello.data() + 4);
  EXPECT_TRUE(r.at_end());
}

TEST(Wire, StringErrors) {
  auto code_of = [](const char* hex) {
    const Bytes b = from_hex(hex);
    ByteReader r(b);
    try {
      r.read_string();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of("01 00 00 00 68 ff"), ErrorCode::MissingTerminator);
  EXPECT_EQ(code_of("ff ff ff ff"), ErrorCode::Truncated);
  EXPECT_EQ(code_of("01 00 00 00 ff 00"), ErrorCode::InvalidUtf8);
  EXPECT_EQ(code_of("02 00 00"), ErrorCode::Truncated);
}

TEST(Wire, LengthPatch) {
  ByteWriter w;
  auto p = w.reserve_length();
  for (int i = 0; i < 16; ++i) w.write_byte(0);
  w.patch_length(p);
  EXPECT_EQ(to_hex(ByteView(w.bytes()).first(4)), "10 00 00 00");

  ByteWriter empty;
  empty.patch_length(empty.reserve_length());
  EXPECT_EQ(to_hex(empty.bytes()), "00 00 00 00");

  ByteWriter w23;
  auto q = w23.reserve_length();
  for (int i = 0; i < 23; ++i) w23.write_byte(1);
  w23.patch_length(q);
  EXPECT_EQ(to_hex(ByteView(w23.bytes()).first(4)), "17 00 00 00");
}

TEST(Wire, ArrayView) {
  const Bytes data = from_hex("03 00 00 00 01 00 00 00 02 00 00 00 03 00 00 00");
  ByteReader r(data);
  auto view = r.read_array_view<std::int32_t>();
  ASSERT_EQ(view.size(), 3u);
  EXPECT_EQ(view[0], 1);
  EXPECT_EQ(view[2], 3);
  EXPECT_EQ(view.raw().data(), data.data() + 4);
  EXPECT_EQ(view.to_vector(), (std::vector<std::int32_t>{1, 2, 3}));

  const Bytes bf = from_hex("04 00 00 00 80 3f 00 40 40 40 80 40");
  ByteReader rb(bf);
  auto floats = rb.read_array_view<BFloat16>();
  EXPECT_EQ(floats[0].to_float(), 1.0f);
  EXPECT_EQ(floats[3].to_float(), 4.0f);
}

TEST(Wire, PrimitiveSizesAndRoundtrip) {
  std::mt19937_64 rng(1);
  auto bits = [&] { return rng(); };
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Primitive> values{
        Primitive(bool(bits() & 1)),
        Primitive(std::uint8_t(bits())),
        Primitive(std::int8_t(bits())),
        Primitive(std::int16_t(bits())),
        Primitive(std::uint16_t(bits())),
        Primitive(std::int32_t(bits())),
        Primitive(std::uint32_t(bits())),
        Primitive(std::int64_t(bits())),
        Primitive(std::uint64_t(bits())),
        Primitive(Int128{bits(), std::int64_t(bits())}),
        Primitive(UInt128{bits(), bits()}),
        Primitive(Half{std::uint16_t(bits())}),
        Primitive(BFloat16{std::uint16_t(bits())}),
        Primitive(std::bit_cast<float>(std::uint32_t(bits()))),
        Primitive(std::bit_cast<double>(bits())),
        Primitive(Uuid::random_v4(rng)),
        Primitive(Timestamp{std::int64_t(bits()), std::int32_t(bits()), std::int32_t(bits())}),
        Primitive(Duration{std::int64_t(bits()), std::int32_t(bits())}),
    };
    ASSERT_EQ(values.size(), kPrimitiveKindCount);
    for (std::size_t k = 0; k < values.size(); ++k) {
      const auto kind = static_cast<PrimitiveKind>(k);
      ASSERT_EQ(kind_of(values[k]), kind);
      const Bytes b = encoded(values[k]);
      ASSERT_EQ(b.size(), fixed_size(kind)) << primitive_name(kind);
      ByteReader r(b);
      const Primitive back = r.read_fixed(kind);
      EXPECT_TRUE(bit_equal(back, values[k])) << primitive_name(kind);
    }
  }
}

TEST(Wire, BFloat16AllPatterns) {
  for (std::uint32_t p = 0; p < 65536; ++p) {
    const BFloat16 b{static_cast<std::uint16_t>(p)};
    const float f = b.to_float();
    const BFloat16 back = BFloat16::from_float(f);
    if (std::isnan(f)) {
      EXPECT_TRUE(std::isnan(back.to_float()));
      EXPECT_EQ(back.bits & 0x8000, b.bits & 0x8000);
    } else {
      EXPECT_EQ(back.bits, b.bits);
    }
  }
}

TEST(Wire, HalfConversion) {
  EXPECT_EQ(Half::from_float(1.0f).bits, 0x3c00);
  EXPECT_EQ(Half::from_float(-2.0f).bits, 0xc000);
  EXPECT_EQ(Half::from_float(65504.0f).bits, 0x7bff);
  EXPECT_EQ(Half::from_float(1e6f).bits, 0x7c00);
  EXPECT_EQ(Half{0x0001}.to_float(), std::ldexp(1.0f, -24));
  // 1 + 2^-11 is halfway between 1 and the next half; ties go to even.
  EXPECT_EQ(Half::from_float(1.0f + std::ldexp(1.0f, -11)).bits, 0x3c00);
  EXPECT_EQ(Half::from_float(1.0f + 3 * std::ldexp(1.0f, -11)).bits, 0x3c02);
  for (std::uint32_t p = 0; p < 65536; ++p) {
    const Half h{static_cast<std::uint16_t>(p)};
    const float f = h.to_float();
    if (!std::isnan(f)) EXPECT_EQ(Half::from_float(f).bits, h.bits) << p;
  }
}

TEST(Wire, StringSizeProperty) {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    std::string s(rng() % 300, 'a');
    for (auto& c : s) c = static_cast<char>('a' + rng() % 26);
    ByteWriter w;
    w.write_string(s);
    EXPECT_EQ(w.bytes().size(), 4 + s.size() + 1);
  }
}

TEST(Wire, FuzzedReadsStayInBounds) {
  std::mt19937 rng(11);
  for (int i = 0; i < 5000; ++i) {
    Bytes b(rng() % 24);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    ByteReader r(b);
    try {
      switch (rng() % 4) {
        case 0: r.read_string(); break;
        case 1: r.read_byte_array(); break;
        case 2: r.read_array_view<std::uint64_t>(); break;
        default: r.read_fixed(static_cast<PrimitiveKind>(rng() % kPrimitiveKindCount)); break;
      }
    } catch (const Error&) {
    }
    EXPECT_LE(r.position(), b.size());
  }
}

TEST(Wire, Hex) {
  EXPECT_EQ(from_hex("DEADbeef"), (Bytes{0xde, 0xad, 0xbe, 0xef}));
  EXPECT_THROW(from_hex("abc"), Error);
  EXPECT_THROW(from_hex("zz"), Error);
}
