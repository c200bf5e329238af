#include "bebop/bench/workloads.hpp"

#include <random>

#include "bebop/compiler.hpp"

namespace bebop::bench {

const char* const kWorkloadSchema = R"(
struct Embedding { id: uuid; values: bfloat16[]; }
struct EmbeddingBatch { items: Embedding[]; }
struct TensorShard { id: uuid; offset: uint64; data: byte[]; }
struct Event { id: uuid; at: timestamp; payload: byte[]; }
struct LineItem { sku: uint32; quantity: uint32; price_cents: uint32; }
struct Order { id: uuid; placed: timestamp; status: uint32; items: LineItem[]; }
message Node { value(1): int32; left(2): Node; right(3): Node; }
)";

const TypeRegistry& workload_registry() {
  static const TypeRegistry registry(compile_source(kWorkloadSchema, "workloads.bop").descriptors);
  return registry;
}

namespace {

using Rng = std::mt19937_64;

Value prim(Primitive p) { return Value(std::move(p)); }

Bytes random_bytes(Rng& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

Value embedding(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  std::vector<Value> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) values.push_back(prim(BFloat16::from_float(dist(rng))));
  return make_struct({prim(Uuid::random_v4(rng)), make_array(std::move(values))});
}

Value event(Rng& rng, std::size_t payload) {
  const Timestamp at{1'700'000'000 + static_cast<std::int64_t>(rng() % 1000), static_cast<std::int32_t>(rng() % 1'000'000'000), 0};
  return make_struct({prim(Uuid::random_v4(rng)), prim(at), Value(random_bytes(rng, payload))});
}

Value order(Rng& rng, std::size_t items) {
  std::vector<Value> lines;
  for (std::size_t i = 0; i < items; ++i) {
    lines.push_back(make_struct({prim(static_cast<std::uint32_t>(rng() % 100000)),
                                 prim(static_cast<std::uint32_t>(1 + rng() % 20)),
                                 prim(static_cast<std::uint32_t>(rng() % 100000))}));
  }
  return make_struct({prim(Uuid::random_v4(rng)), prim(Timestamp{1'700'000'000, 0, 0}), prim(std::uint32_t{2}),
                      make_array(std::move(lines))});
}

Value tree(std::int32_t& next, int depth) {
  std::vector<std::pair<std::uint8_t, Value>> fields{{1, prim(next++)}};
  if (depth > 1) {
    fields.emplace_back(2, tree(next, depth - 1));
    fields.emplace_back(3, tree(next, depth - 1));
  }
  return make_message(std::move(fields));
}

std::uint64_t read_embedding(ByteReader& in) {
  const Uuid id = in.read_uuid();
  const auto values = in.read_array_view<BFloat16>();
  return id.bytes[0] + values.size() + (values.empty() ? 0 : values[values.size() - 1].bits);
}

std::uint64_t read_event(ByteReader& in) {
  const Uuid id = in.read_uuid();
  const Timestamp at = in.read_timestamp();
  const ByteView payload = in.read_byte_array();
  return id.bytes[0] + static_cast<std::uint64_t>(at.seconds) + payload.size();
}

std::uint64_t read_order(ByteReader& in) {
  const Uuid id = in.read_uuid();
  const Timestamp placed = in.read_timestamp();
  std::uint64_t sum = id.bytes[0] + static_cast<std::uint64_t>(placed.seconds) + in.read_le<std::uint32_t>();
  const std::uint32_t count = in.read_le<std::uint32_t>();
  ByteReader items = in.sub_reader(std::size_t{count} * 12);
  for (std::uint32_t i = 0; i < count; ++i) {
    sum += items.read_le<std::uint32_t>();
    sum += std::uint64_t{items.read_le<std::uint32_t>()} * items.read_le<std::uint32_t>();
  }
  return sum;
}

std::uint64_t read_node(ByteReader& in) {
  ByteReader body = in.sub_reader(in.read_le<std::uint32_t>());
  std::uint64_t sum = 0;
  for (;;) {
    const std::uint8_t tag = body.read_byte();
    if (tag == 0) break;
    if (tag == 1) sum += static_cast<std::uint32_t>(body.read_le<std::int32_t>());
    else if (tag == 2 || tag == 3) sum += read_node(body);
    else throw Error(ErrorCode::TagOutOfRange, "unknown Node tag " + std::to_string(tag));
  }
  return sum;
}

template <typename F>
std::function<std::uint64_t(ByteView)> reader(F f) {
  return [f](ByteView bytes) {
    ByteReader in(bytes);
    return f(in);
  };
}

struct Spec {
  const char* name;
  const char* description;
};

constexpr Spec kSpecs[] = {
    {"embedding_small", "Embedding, 4 bfloat16 values"},
    {"embedding_768", "Embedding, 768 bfloat16 values"},
    {"embedding_1536", "Embedding, 1536 bfloat16 values"},
    {"bfloat16_1536", "bare bfloat16[] of 1536 values"},
    {"embedding_batch", "EmbeddingBatch of 32 x 768 values"},
    {"tensor_shard", "TensorShard with a 64 KiB byte payload"},
    {"event_small", "Event with a 6-byte payload"},
    {"event_large", "Event with a 4134-byte payload"},
    {"order_small", "Order with 3 line items"},
    {"order_large", "Order with 100 line items"},
    {"tree_depth10", "binary Node tree of depth 10, 1023 nodes"},
};

}  // namespace

std::vector<std::string> workload_names() {
  std::vector<std::string> out;
  for (const auto& s : kSpecs) out.emplace_back(s.name);
  return out;
}

Workload make_workload(std::string_view name) {
  const Spec* spec = nullptr;
  for (const auto& s : kSpecs) {
    if (name == s.name) spec = &s;
  }
  if (!spec) throw Error(ErrorCode::InvalidArgument, "unknown workload '" + std::string(name) + "'");

  Rng rng(0xb0b0b0b0ULL + std::hash<std::string_view>{}(name) % 1000);
  Workload w;
  w.name = spec->name;
  w.description = spec->description;

  if (name == "embedding_small" || name == "embedding_768" || name == "embedding_1536") {
    const std::size_t n = name == "embedding_small" ? 4 : name == "embedding_768" ? 768 : 1536;
    w.type = TypeDescriptor::defined("Embedding");
    w.value = embedding(rng, n);
    w.view_decode = reader(read_embedding);
  } else if (name == "bfloat16_1536") {
    w.type = TypeDescriptor::array(TypeDescriptor::primitive(PrimitiveKind::BFloat16));
    w.value = embedding(rng, 1536).as<StructValue>().fields[1];
    w.view_decode = reader([](ByteReader& in) -> std::uint64_t {
      const auto values = in.read_array_view<BFloat16>();
      return values.size() + (values.empty() ? 0 : values[0].bits);
    });
  } else if (name == "embedding_batch") {
    std::vector<Value> items;
    for (int i = 0; i < 32; ++i) items.push_back(embedding(rng, 768));
    w.type = TypeDescriptor::defined("EmbeddingBatch");
    w.value = make_struct({make_array(std::move(items))});
    w.view_decode = reader([](ByteReader& in) {
      const std::uint32_t count = in.read_le<std::uint32_t>();
      std::uint64_t sum = 0;
      for (std::uint32_t i = 0; i < count; ++i) sum += read_embedding(in);
      return sum;
    });
  } else if (name == "tensor_shard") {
    w.type = TypeDescriptor::defined("TensorShard");
    w.value = make_struct({prim(Uuid::random_v4(rng)), prim(std::uint64_t{1} << 20), Value(random_bytes(rng, 65536))});
    w.view_decode = reader([](ByteReader& in) {
      const Uuid id = in.read_uuid();
      const std::uint64_t offset = in.read_le<std::uint64_t>();
      return id.bytes[0] + offset + in.read_byte_array().size();
    });
  } else if (name == "event_small" || name == "event_large") {
    w.type = TypeDescriptor::defined("Event");
    w.value = event(rng, name == "event_small" ? 6 : 4134);
    w.view_decode = reader(read_event);
  } else if (name == "order_small" || name == "order_large") {
    w.type = TypeDescriptor::defined("Order");
    w.value = order(rng, name == "order_small" ? 3 : 100);
    w.view_decode = reader(read_order);
  } else {
    std::int32_t next = 1;
    w.type = TypeDescriptor::defined("Node");
    w.value = tree(next, 10);
    w.view_decode = reader(read_node);
  }
  return w;
}

}  // namespace bebop::bench
