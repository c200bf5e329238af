#pragma once

// JSON debug form of values, used by the CLI's encode and decode commands.
//
// Structs and messages are objects keyed by field name (messages list present
// fields only), unions are {"Branch": value}, enums are member names, maps
// are arrays of [key, value] pairs, byte arrays are hex strings, timestamps
// and durations are objects, 128-bit integers are decimal strings, and
// non-finite floats are "NaN", "Infinity" or "-Infinity".

#include <string>
#include <string_view>

#include "bebop/dynvalue.hpp"

namespace bebop {

/// `indent` < 0 prints on one line.
std::string value_to_json(const Value& v, const TypeDescriptor& type, const TypeRegistry& registry, int indent = 2);

/// Throws Error(TypeMismatch) when the JSON does not fit the type and
/// Error(SyntaxError) when it is not JSON.
Value value_from_json(std::string_view json, const TypeDescriptor& type, const TypeRegistry& registry);

}  // namespace bebop
