#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include "bebop/wire.hpp"

namespace bebop {

/// MurmurHash3 x86_32 block and tail mixing with the lowbias32 finalizer
/// (xor-shift 16, *0x7feb352d, xor-shift 15, *0x846ca68b, xor-shift 16)
/// applied after folding in the length.
std::uint32_t murmur3_lowbias32(ByteView data, std::uint32_t seed = 0) noexcept;

/// Hash of "/Service/Method".
std::uint32_t method_routing_id(std::string_view service, std::string_view method) noexcept;

/// Hash of a path that is already shaped "/Service/Method".
std::uint32_t routing_id_for_path(std::string_view path) noexcept;

/// Splits "/Service/Method"; nullopt if the path has any other shape.
std::optional<std::pair<std::string_view, std::string_view>> split_method_path(std::string_view path) noexcept;

namespace method_ids {
/// Reserved for future control messages.
inline constexpr std::uint32_t kControl = 0;
inline constexpr std::uint32_t kBatch = 1;
inline constexpr std::uint32_t kDispatch = 2;
inline constexpr std::uint32_t kResolve = 3;
inline constexpr std::uint32_t kCancel = 4;
}  // namespace method_ids

constexpr bool is_reserved_routing_id(std::uint32_t id) noexcept { return id <= method_ids::kCancel; }

}  // namespace bebop
