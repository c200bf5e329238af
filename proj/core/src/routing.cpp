#include "bebop/routing.hpp"

#include <string>

namespace bebop {

std::uint32_t murmur3_lowbias32(ByteView data, std::uint32_t seed) noexcept {
  constexpr std::uint32_t c1 = 0xcc9e2d51;
  constexpr std::uint32_t c2 = 0x1b873593;
  const std::size_t len = data.size();
  const std::size_t blocks = len / 4;
  std::uint32_t h = seed;
  for (std::size_t i = 0; i < blocks; ++i) {
    std::uint32_t k = detail::load_le<std::uint32_t>(data.data() + i * 4);
    k *= c1;
    k = std::rotl(k, 15);
    k *= c2;
    h ^= k;
    h = std::rotl(h, 13);
    h = h * 5 + 0xe6546b64;
  }
  const std::uint8_t* tail = data.data() + blocks * 4;
  std::uint32_t k = 0;
  switch (len & 3) {
    case 3: k ^= static_cast<std::uint32_t>(tail[2]) << 16; [[fallthrough]];
    case 2: k ^= static_cast<std::uint32_t>(tail[1]) << 8; [[fallthrough]];
    case 1:
      k ^= tail[0];
      k *= c1;
      k = std::rotl(k, 15);
      k *= c2;
      h ^= k;
  }
  h ^= static_cast<std::uint32_t>(len);
  h ^= h >> 16;
  h *= 0x7feb352d;
  h ^= h >> 15;
  h *= 0x846ca68b;
  h ^= h >> 16;
  return h;
}

std::uint32_t routing_id_for_path(std::string_view path) noexcept {
  return murmur3_lowbias32({reinterpret_cast<const std::uint8_t*>(path.data()), path.size()});
}

std::uint32_t method_routing_id(std::string_view service, std::string_view method) noexcept {
  std::string path;
  path.reserve(service.size() + method.size() + 2);
  path += '/';
  path += service;
  path += '/';
  path += method;
  return routing_id_for_path(path);
}

std::optional<std::pair<std::string_view, std::string_view>> split_method_path(std::string_view path) noexcept {
  if (path.size() < 4 || path[0] != '/') return std::nullopt;
  const auto slash = path.find('/', 1);
  if (slash == std::string_view::npos || slash == 1 || slash + 1 >= path.size()) return std::nullopt;
  const auto service = path.substr(1, slash - 1);
  const auto method = path.substr(slash + 1);
  if (method.find('/') != std::string_view::npos) return std::nullopt;
  return std::make_pair(service, method);
}

}  // namespace bebop
