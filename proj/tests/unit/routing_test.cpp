#include <gtest/gtest.h>

#include <random>
#include <unordered_map>

#include "bebop/descriptor.hpp"
#include "bebop/routing.hpp"
#include "bebop/schema/resolver.hpp"
#include "oracles/oracles.hpp"

using namespace bebop;

namespace {

ByteView view(std::string_view s) { return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}; }

}  // namespace

TEST(Routing, MatchesTextbookOracle) {
  EXPECT_EQ(method_routing_id("ChatService", "Send"), oracle::murmur3_lowbias("/ChatService/Send"));
  std::mt19937 rng(5);
  for (int i = 0; i < 2000; ++i) {
    std::string s(rng() % 40, 'x');
    for (auto& c : s) c = static_cast<char>(rng());
    const std::uint32_t seed = i % 3 == 0 ? rng() : 0;
    ASSERT_EQ(murmur3_lowbias32(view(s), seed), oracle::murmur3_lowbias(s, seed)) << i;
  }
}

TEST(Routing, Deterministic) {
  EXPECT_EQ(method_routing_id("ChatService", "Send"), method_routing_id("ChatService", "Send"));
  EXPECT_EQ(routing_id_for_path("/ChatService/Send"), method_routing_id("ChatService", "Send"));
  EXPECT_NE(method_routing_id("ChatService", "Send"), method_routing_id("ChatService", "Sent"));
}

TEST(Routing, SplitPath) {
  auto p = split_method_path("/ChatService/Send");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->first, "ChatService");
  EXPECT_EQ(p->second, "Send");
  EXPECT_FALSE(split_method_path("ChatService.Send"));
  EXPECT_FALSE(split_method_path("/ChatService"));
  EXPECT_FALSE(split_method_path("/A/B/C"));
  EXPECT_FALSE(split_method_path("//B"));
}

TEST(Routing, ComposedMethodsHashUnderIncludingService) {
  const auto r = schema::resolve_source("struct R {}\nservice Base { Ping(R): R; }\nservice Chat with Base { Send(R): R; }");
  const auto set = build_descriptor_set(r);
  const auto* chat = find_definition(set, "Chat");
  ASSERT_NE(chat, nullptr);
  EXPECT_EQ(chat->service_def->methods[0].routing_id, method_routing_id("Chat", "Ping"));
  EXPECT_EQ(chat->service_def->methods[1].routing_id, method_routing_id("Chat", "Send"));
  EXPECT_EQ(find_definition(set, "Base")->service_def->methods[0].routing_id, method_routing_id("Base", "Ping"));
}

TEST(Routing, CollisionIsACompileError) {
  // Birthday search over method names of one service.
  std::unordered_map<std::uint32_t, std::string> seen;
  std::string a, b;
  for (int i = 0;; ++i) {
    std::string name = "M" + std::to_string(i);
    const auto id = oracle::murmur3_lowbias("/S/" + name);
    auto [it, inserted] = seen.emplace(id, name);
    if (!inserted) {
      a = it->second;
      b = name;
      break;
    }
  }
  ASSERT_EQ(method_routing_id("S", a), method_routing_id("S", b));
  const std::string src = "struct R {}\nservice S { " + a + "(R): R; " + b + "(R): R; }";
  const auto r = schema::resolve_source(src);
  try {
    build_descriptor_set(r);
    FAIL() << "expected a collision";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ReservedCollision);
    EXPECT_NE(e.detail().find("/S/" + a), std::string::npos);
    EXPECT_NE(e.detail().find("/S/" + b), std::string::npos);
  }
}

TEST(Routing, ReservedIds) {
  EXPECT_TRUE(is_reserved_routing_id(method_ids::kDispatch));
  EXPECT_TRUE(is_reserved_routing_id(method_ids::kResolve));
  EXPECT_TRUE(is_reserved_routing_id(method_ids::kCancel));
  EXPECT_TRUE(is_reserved_routing_id(method_ids::kBatch));
  EXPECT_FALSE(is_reserved_routing_id(5));
}
