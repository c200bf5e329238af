#pragma once

// Benchmark workloads: a schema, a deterministic value, and a typed reader
// that decodes it without materializing a Value.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bebop/dynvalue.hpp"

namespace bebop::bench {

extern const char* const kWorkloadSchema;

/// Compiled once from kWorkloadSchema.
const TypeRegistry& workload_registry();

struct Workload {
  std::string name;
  std::string description;
  TypeDescriptor type;
  Value value;
  /// Reads every field through views; returns a checksum so the work is
  /// observable. Element data of scalar arrays is not copied.
  std::function<std::uint64_t(ByteView)> view_decode;
};

std::vector<std::string> workload_names();

/// Throws Error(InvalidArgument) for an unknown name.
Workload make_workload(std::string_view name);

}  // namespace bebop::bench
