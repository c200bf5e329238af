#include <benchmark/benchmark.h>

#include <cstring>
#include <json.hpp>

#include "bebop/bench/varint.hpp"
#include "bebop/bench/workloads.hpp"
#include "bebop/routing.hpp"
#include "bebop/rpc/frame.hpp"
#include "bebop/value_json.hpp"

using namespace bebop;
using namespace bebop::bench;

namespace {

struct Prepared {
  Workload w;
  Bytes wire;
  std::string json;
};

Prepared prepare(const std::string& name) {
  Prepared p{make_workload(name), {}, {}};
  p.wire = encode_value(p.w.type, p.w.value, workload_registry());
  p.json = value_to_json(p.w.value, p.w.type, workload_registry(), -1);
  return p;
}

void BM_Encode(benchmark::State& state, const std::string& name) {
  const Prepared p = prepare(name);
  for (auto _ : state) benchmark::DoNotOptimize(encode_value(p.w.type, p.w.value, workload_registry()));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * p.wire.size()));
}

void BM_Decode(benchmark::State& state, const std::string& name) {
  const Prepared p = prepare(name);
  for (auto _ : state) benchmark::DoNotOptimize(decode_value(p.wire, p.w.type, workload_registry()));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * p.wire.size()));
}

void BM_ViewDecode(benchmark::State& state, const std::string& name) {
  const Prepared p = prepare(name);
  for (auto _ : state) benchmark::DoNotOptimize(p.w.view_decode(p.wire));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * p.wire.size()));
}

void BM_JsonParse(benchmark::State& state, const std::string& name) {
  const Prepared p = prepare(name);
  for (auto _ : state) benchmark::DoNotOptimize(nlohmann::ordered_json::parse(p.json));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * p.json.size()));
}

void BM_Memcpy(benchmark::State& state) {
  const Bytes src(static_cast<std::size_t>(state.range(0)), 0x5a);
  Bytes dst(src.size());
  for (auto _ : state) {
    std::memcpy(dst.data(), src.data(), src.size());
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_Memcpy)->Arg(3076)->Arg(65536);

void BM_RoutingId(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(routing_id_for_path("/ChatService/Send"));
}
BENCHMARK(BM_RoutingId);

void BM_ExpectedVarintSize(benchmark::State& state) {
  std::uint32_t n = 1;
  for (auto _ : state) benchmark::DoNotOptimize(expected_varint_size(n++));
}
BENCHMARK(BM_ExpectedVarintSize);

void BM_FrameRoundtrip(benchmark::State& state) {
  const Bytes payload(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    rpc::FrameHeader h;
    h.length = static_cast<std::uint32_t>(payload.size());
    h.stream_id = 7;
    const Bytes b = rpc::encode_frame(h, payload);
    ByteReader in(b);
    benchmark::DoNotOptimize(rpc::decode_frame(in));
  }
}
BENCHMARK(BM_FrameRoundtrip)->Arg(16)->Arg(4096);

const int kRegistered = [] {
  for (const auto& name : workload_names()) {
    benchmark::RegisterBenchmark(("BM_Encode/" + name).c_str(), BM_Encode, name);
    benchmark::RegisterBenchmark(("BM_Decode/" + name).c_str(), BM_Decode, name);
    benchmark::RegisterBenchmark(("BM_ViewDecode/" + name).c_str(), BM_ViewDecode, name);
    benchmark::RegisterBenchmark(("BM_JsonParse/" + name).c_str(), BM_JsonParse, name);
  }
  return 0;
}();

}  // namespace

BENCHMARK_MAIN();
