#pragma once

// Reference implementations used only to check the library. Each is written
// from the format definition directly and shares no code with core/.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bebop/descriptor.hpp"
#include "bebop/dynvalue.hpp"

namespace oracle {

inline std::uint32_t rotl32(std::uint32_t x, int r) { return (x << r) | (x >> (32 - r)); }

/// MurmurHash3_x86_32 as published, but with fmix32 replaced by lowbias32.
inline std::uint32_t murmur3_lowbias(std::string_view key, std::uint32_t seed = 0) {
  const auto* data = reinterpret_cast<const unsigned char*>(key.data());
  const int len = static_cast<int>(key.size());
  const int nblocks = len / 4;
  std::uint32_t h1 = seed;
  const std::uint32_t c1 = 0xcc9e2d51;
  const std::uint32_t c2 = 0x1b873593;
  for (int i = 0; i < nblocks; i++) {
    std::uint32_t k1 = std::uint32_t(data[i * 4]) | std::uint32_t(data[i * 4 + 1]) << 8 |
                       std::uint32_t(data[i * 4 + 2]) << 16 | std::uint32_t(data[i * 4 + 3]) << 24;
    k1 *= c1;
    k1 = rotl32(k1, 15);
    k1 *= c2;
    h1 ^= k1;
    h1 = rotl32(h1, 13);
    h1 = h1 * 5 + 0xe6546b64;
  }
  const unsigned char* tail = data + nblocks * 4;
  std::uint32_t k1 = 0;
  switch (len & 3) {
    case 3: k1 ^= std::uint32_t(tail[2]) << 16; [[fallthrough]];
    case 2: k1 ^= std::uint32_t(tail[1]) << 8; [[fallthrough]];
    case 1:
      k1 ^= tail[0];
      k1 *= c1;
      k1 = rotl32(k1, 15);
      k1 *= c2;
      h1 ^= k1;
  }
  h1 ^= static_cast<std::uint32_t>(len);
  // lowbias32
  h1 ^= h1 >> 16;
  h1 *= 0x7feb352dU;
  h1 ^= h1 >> 15;
  h1 *= 0x846ca68bU;
  h1 ^= h1 >> 16;
  return h1;
}

/// Bytes needed by an LEB128 varint for v, by repeated shifting.
inline int varint_len(std::uint64_t v) {
  int n = 1;
  while (v >= 0x80) {
    v >>= 7;
    ++n;
  }
  return n;
}

/// Mean varint length over 0..N, summed value by value. Returned as
/// (numerator, denominator) without reduction.
inline std::pair<std::uint64_t, std::uint64_t> brute_force_expected_varint(std::uint64_t n) {
  std::uint64_t total = 0;
  for (std::uint64_t v = 0; v <= n; ++v) total += static_cast<std::uint64_t>(varint_len(v));
  return {total, n + 1};
}

/// Layer of each call = length of the longest chain of input_from links.
inline std::vector<int> longest_path_layers(const std::vector<int>& input_from) {
  std::vector<int> depth(input_from.size(), 0);
  for (std::size_t i = 0; i < input_from.size(); ++i) {
    int d = 0;
    for (int j = input_from[i]; j >= 0; j = input_from[static_cast<std::size_t>(j)]) ++d;
    depth[i] = d;
  }
  return depth;
}

/// Byte-at-a-time encoder for dynamic values.
class NaiveEncoder {
 public:
  explicit NaiveEncoder(const bebop::TypeRegistry& reg) : reg_(reg) {}

  std::vector<std::uint8_t> encode(const bebop::TypeDescriptor& t, const bebop::Value& v) {
    out_.clear();
    value(t, v);
    return out_;
  }

 private:
  void le(std::uint64_t x, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
  }

  void prim(const bebop::Primitive& p) {
    using namespace bebop;
    switch (p.index()) {
      case 0: out_.push_back(std::get<bool>(p) ? 1 : 0); break;
      case 1: le(std::get<std::uint8_t>(p), 1); break;
      case 2: le(static_cast<std::uint8_t>(std::get<std::int8_t>(p)), 1); break;
      case 3: le(static_cast<std::uint16_t>(std::get<std::int16_t>(p)), 2); break;
      case 4: le(std::get<std::uint16_t>(p), 2); break;
      case 5: le(static_cast<std::uint32_t>(std::get<std::int32_t>(p)), 4); break;
      case 6: le(std::get<std::uint32_t>(p), 4); break;
      case 7: le(static_cast<std::uint64_t>(std::get<std::int64_t>(p)), 8); break;
      case 8: le(std::get<std::uint64_t>(p), 8); break;
      case 9: {
        const auto& x = std::get<Int128>(p);
        le(x.low, 8);
        le(static_cast<std::uint64_t>(x.high), 8);
        break;
      }
      case 10: {
        const auto& x = std::get<UInt128>(p);
        le(x.low, 8);
        le(x.high, 8);
        break;
      }
      case 11: le(std::get<Half>(p).bits, 2); break;
      case 12: le(std::get<BFloat16>(p).bits, 2); break;
      case 13: {
        std::uint32_t bits;
        const float f = std::get<float>(p);
        std::memcpy(&bits, &f, 4);
        le(bits, 4);
        break;
      }
      case 14: {
        std::uint64_t bits;
        const double d = std::get<double>(p);
        std::memcpy(&bits, &d, 8);
        le(bits, 8);
        break;
      }
      case 15:
        for (auto b : std::get<Uuid>(p).bytes) out_.push_back(b);
        break;
      case 16: {
        const auto& ts = std::get<Timestamp>(p);
        le(static_cast<std::uint64_t>(ts.seconds), 8);
        le(static_cast<std::uint32_t>(ts.nanos), 4);
        le(static_cast<std::uint32_t>(ts.offset_ms), 4);
        break;
      }
      case 17: {
        const auto& d = std::get<Duration>(p);
        le(static_cast<std::uint64_t>(d.seconds), 8);
        le(static_cast<std::uint32_t>(d.nanos), 4);
        break;
      }
    }
  }

  std::size_t begin_length() {
    const std::size_t at = out_.size();
    le(0, 4);
    return at;
  }
  void end_length(std::size_t at) {
    const auto n = static_cast<std::uint32_t>(out_.size() - at - 4);
    for (int i = 0; i < 4; ++i) out_[at + i] = static_cast<std::uint8_t>(n >> (8 * i));
  }

  void value(const bebop::TypeDescriptor& t, const bebop::Value& v) {
    using namespace bebop;
    switch (t.kind) {
      case TypeKind::String: {
        const auto& s = v.as<std::string>();
        le(s.size(), 4);
        out_.insert(out_.end(), s.begin(), s.end());
        out_.push_back(0);
        return;
      }
      case TypeKind::Array:
      case TypeKind::FixedArray: {
        const bool fixed = t.kind == TypeKind::FixedArray;
        if (v.is<Bytes>()) {
          const auto& b = v.as<Bytes>();
          if (!fixed) le(b.size(), 4);
          out_.insert(out_.end(), b.begin(), b.end());
          return;
        }
        const auto& items = v.as<ArrayValue>().items;
        if (!fixed) le(items.size(), 4);
        for (const auto& item : items) value(*t.element, item);
        return;
      }
      case TypeKind::Map: {
        const auto& entries = v.as<MapValue>().entries;
        le(entries.size(), 4);
        for (const auto& [k, x] : entries) {
          value(*t.key, k);
          value(*t.value, x);
        }
        return;
      }
      case TypeKind::Defined: {
        const auto& def = reg_.get(t.defined_fqn);
        if (def.enum_def) {
          prim(v.as<EnumValue>().value);
        } else if (def.struct_def) {
          const auto& fields = v.as<StructValue>().fields;
          for (std::size_t i = 0; i < fields.size(); ++i) value(def.struct_def->fields[i].type, fields[i]);
        } else if (def.message_def) {
          const std::size_t at = begin_length();
          for (const auto& [tag, x] : v.as<MessageValue>().fields) {
            out_.push_back(tag);
            for (const auto& f : def.message_def->fields) {
              if (f.tag == tag) value(f.type, x);
            }
          }
          out_.push_back(0);
          end_length(at);
        } else if (def.union_def) {
          const auto& u = v.as<UnionValue>();
          const std::size_t at = begin_length();
          out_.push_back(u.discriminator);
          for (const auto& b : def.union_def->branches) {
            if (b.discriminator == u.discriminator) value(TypeDescriptor::defined(b.type_fqn), *u.value);
          }
          end_length(at);
        }
        return;
      }
      default: prim(v.as<Primitive>()); return;
    }
  }

  const bebop::TypeRegistry& reg_;
  std::vector<std::uint8_t> out_;
};

}  // namespace oracle
