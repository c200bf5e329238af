#pragma once

// Reference encodings checked byte for byte in both directions.

#include <string>
#include <vector>

#include "bebop/dynvalue.hpp"

namespace bebop::bench {

struct GoldenVector {
  std::string name;
  TypeDescriptor type;
  Value value;
  /// Space-separated lowercase hex, as to_hex prints it.
  std::string hex;
};

struct GoldenSuite {
  TypeRegistry registry;
  std::vector<GoldenVector> vectors;
};

/// The schema the defined-type vectors refer to.
extern const char* const kGoldenSchema;

GoldenSuite golden_suite();

struct GoldenResult {
  std::string name;
  std::string expected_hex;
  std::string actual_hex;
  bool encode_ok = false;
  bool decode_ok = false;
  /// Set when encoding or decoding threw.
  std::string error;
  bool ok() const noexcept { return encode_ok && decode_ok; }
};

std::vector<GoldenResult> check_golden(const GoldenSuite& suite);

}  // namespace bebop::bench
