#pragma once

// Wire-compatibility check between two versions of a schema.

#include <string>
#include <vector>

#include "bebop/descriptor.hpp"

namespace bebop {

enum class Verdict : std::uint8_t { Safe, Breaking };

struct Change {
  /// Fully-qualified definition name, plus `.member` where one is involved.
  std::string subject;
  /// Kind of change, e.g. "Add field" or "Change base type".
  std::string change;
  Verdict verdict = Verdict::Safe;
  std::string reason;
};

/// Definitions are matched by fqn; message fields by tag, union branches by
/// discriminator, enum members by value, struct fields by position.
std::vector<Change> check_evolution(const DescriptorSet& before, const DescriptorSet& after);

bool has_breaking(const std::vector<Change>& changes) noexcept;

/// "breaking: a.B.x: Change field type (Never reuse tag with different type)"
std::string format_change(const Change& change);

}  // namespace bebop
