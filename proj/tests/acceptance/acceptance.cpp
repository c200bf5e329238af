// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "bebop/bench/golden.hpp"
#include "bebop/bench/runner.hpp"
#include "bebop/bench/varint.hpp"
#include "bebop/bench/workloads.hpp"
#include "bebop/compiler.hpp"
#include "bebop/plugin.hpp"
#include "bebop/rpc/batch.hpp"
#include "bebop/rpc/client.hpp"
#include "bebop/value_json.hpp"
#include "oracles/oracles.hpp"
#include "oracles/random_schema.hpp"
#include "support/demo_service.hpp"

using namespace bebop;
using namespace bebop::rpc;
using demo::as_u32;
using demo::u32;
namespace fs = std::filesystem;
using Steady = std::chrono::steady_clock;

namespace {

// Limits stated by the criteria.
constexpr double kGoldenSeconds = 1.0;
constexpr int kPropertyPairs = 10000;
constexpr double kPropertySeconds = 60.0;
constexpr double kFuturesSeconds = 30.0;
constexpr double kPerfSeconds = 120.0;
constexpr std::size_t kUnaryFramingBytes = 18;
constexpr double kBatchMaxRtts = 1.5;
constexpr double kSequentialMinRtts = 2.5;
constexpr auto kInjectedLatency = std::chrono::microseconds(2500);  // one way; RTT = 5 ms
constexpr double kJsonOverDecodeMin = 10.0;
constexpr double kDecodeOverCopyMax = 10.0;

class Check {
 public:
  void expect(bool cond, const std::string& what) {
    ++checks_;
    if (!cond && failures_.size() < 5) failures_.push_back(what);
    if (!cond) ++failed_;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::string s = notes_;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + std::string("failed: ") + f;
    if (failed_ > failures_.size()) s += "; (" + std::to_string(failed_ - failures_.size()) + " more)";
    return s;
  }
  std::size_t checks() const { return checks_; }

 private:
  std::size_t checks_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

double seconds_since(Steady::time_point t) { return std::chrono::duration<double>(Steady::now() - t).count(); }

template <typename F>
Status status_of(F&& f) {
  try {
    f();
  } catch (const RpcError& e) {
    return e.status();
  }
  return Status::Ok;
}

struct TempDir {
  TempDir() {
    path = fs::temp_directory_path() / ("bebop_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CommandResult {
  int status = -1;
  std::string output;
};

CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  FILE* p = ::popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.output.append(buf, n);
  const int raw = ::pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

// --- 1 --------------------------------------------------------------------

void golden(Check& c) {
  const auto start = Steady::now();
  const auto results = bench::check_golden(bench::golden_suite());
  const double s = seconds_since(start);
  c.expect(results.size() == 12, "expected 12 vectors, have " + std::to_string(results.size()));
  std::size_t ok = 0;
  for (const auto& r : results) {
    c.expect(r.encode_ok, r.name + " encodes to " + r.actual_hex + r.error);
    c.expect(r.decode_ok, r.name + " does not decode back");
    if (r.ok()) ++ok;
  }
  for (const auto& r : results) {
    if (r.name == "Request") c.expect(r.expected_hex.rfind("10 00 00 00", 0) == 0, "Request length prefix is 16");
    if (r.name == "Location") c.expect(from_hex(r.expected_hex).size() == 27, "Location is 27 bytes");
    if (r.name == "Embedding") c.expect(from_hex(r.expected_hex).size() == 28, "embedding is 28 bytes");
  }
  c.expect(s < kGoldenSeconds, "runtime " + std::to_string(s) + " s");
  c.note(std::to_string(ok) + "/" + std::to_string(results.size()) + " byte-exact");
}

// --- 2 --------------------------------------------------------------------

void property(Check& c) {
  const auto start = Steady::now();
  oracle::SchemaGenerator schemas(0x5eed);
  int pairs = 0, mismatches = 0, schema_count = 0;
  while (pairs < kPropertyPairs) {
    const std::string src = schemas.generate();
    ++schema_count;
    const Compilation comp = compile_source(src);
    TypeRegistry reg(comp.descriptors);
    TypeDescriptor root;
    for (const auto& d : comp.descriptors.schemas.at(0).definitions) {
      if (d.name == "Root") root = TypeDescriptor::defined(d.fqn);
    }
    oracle::ValueGenerator values(reg, static_cast<std::uint64_t>(schema_count));
    oracle::NaiveEncoder naive(reg);
    for (int i = 0; i < 5; ++i, ++pairs) {
      const Value v = values.generate(root);
      const Bytes bytes = encode_value(root, v, reg);
      const bool same_bytes = bytes == naive.encode(root, v);
      const bool roundtrip = decode_value(bytes, root, reg) == v;
      if (!same_bytes || !roundtrip) {
        ++mismatches;
        c.expect(false, std::string(same_bytes ? "roundtrip" : "oracle bytes") + " mismatch for schema " + src);
      }
    }
  }
  const double s = seconds_since(start);
  c.expect(s < kPropertySeconds, "runtime " + std::to_string(s) + " s");
  std::ostringstream o;
  o << pairs << " pairs over " << schema_count << " schemas, " << mismatches << " mismatches, " << std::fixed
    << std::setprecision(1) << s << " s";
  c.note(o.str());
}

// --- 3 --------------------------------------------------------------------

struct EvolutionRow {
  const char* kind;
  const char* before;
  const char* after;
  const char* change;
  bool breaking;
};

const EvolutionRow kEvolutionRows[] = {
    {"message", "message M { a(1): int32; }", "message M { a(1): int32; b(5): string; }", "Add field", false},
    {"message", "message M { a(1): int32; }", "message M { @deprecated a(1): int32; }", "Deprecate field", false},
    {"message", "message M { a(1): int32; }", "message M { renamed(1): int32; }", "Rename field", false},
    {"message", "message M { a(1): int32; }", "message M { a(1): string; }", "Change field type", true},
    {"message", "message M { a(1): int32; }", "message M { a(2): int32; }", "Change tag number", true},
    {"struct", "struct S { a: int32; }", "struct S { a: int32; b: int32; }", "Add field", true},
    {"struct", "struct S { a: int32; b: int32; }", "struct S { a: int32; }", "Remove field", true},
    {"struct", "struct S { a: int32; b: float32; }", "struct S { b: float32; a: int32; }", "Reorder fields", true},
    {"struct", "struct S { a: int32; }", "struct S { a: int64; }", "Change field type", true},
    {"union", "struct P {} union U { A(1): P; }", "struct P {} union U { A(1): P; B(2): { x: int32; }; }", "Add branch", false},
    {"union", "struct P {} union U { A(1): P; B(2): P; }", "struct P {} union U { A(1): P; }", "Remove branch", true},
    {"union", "struct P {} struct Q {} union U { A(1): P; }", "struct P {} struct Q {} union U { A(1): Q; }",
     "Change branch type", true},
    {"enum", "enum E { A = 0; }", "enum E { A = 0; B = 1; }", "Add value", false},
    {"enum", "enum E { A = 0; B = 1; }", "enum E { A = 0; }", "Remove value", true},
    {"enum", "enum E : uint8 { A = 0; }", "enum E : uint32 { A = 0; }", "Change base type", true},
};

void evolution(Check& c, const fs::path& tmp) {
  int matched = 0, n = 0;
  for (const auto& row : kEvolutionRows) {
    const fs::path dir = tmp / ("evolution_" + std::to_string(n++));
    write_text(dir / "old.bop", std::string("package evo\n") + row.before + "\n");
    write_text(dir / "new.bop", std::string("package evo\n") + row.after + "\n");
    const auto r = run_command(quote(BEBOPC_PATH) + " check " + quote(dir / "old.bop") + " " + quote(dir / "new.bop"));
    const std::string verdict = row.breaking ? "breaking: " : "safe: ";
    const std::string label = std::string(row.kind) + " / " + row.change;
    const bool exit_ok = r.status == (row.breaking ? 1 : 0);
    const bool listed = r.output.find(verdict) != std::string::npos && r.output.find(row.change) != std::string::npos;
    c.expect(exit_ok, label + ": exit " + std::to_string(r.status) + " output " + r.output);
    c.expect(listed, label + ": change not reported as " + verdict + "in '" + r.output + "'");
    if (exit_ok && listed) ++matched;
  }
  write_text(tmp / "evolution_same.bop", "struct S { a: int32; }\n");
  const auto same = run_command(quote(BEBOPC_PATH) + " check " + quote(tmp / "evolution_same.bop") + " " +
                                quote(tmp / "evolution_same.bop"));
  c.expect(same.status == 0 && same.output.empty(), "identical schemas report nothing");
  c.note(std::to_string(matched) + "/15 rows via bebopc check");
}

// --- 4 --------------------------------------------------------------------

void varint(Check& c) {
  for (std::uint32_t n : {1u, 127u, 128u, 16384u, 1000000u}) {
    const auto [num, den] = oracle::brute_force_expected_varint(n);
    const bench::Rational expect = bench::make_rational(num, den);
    c.expect(bench::expected_varint_size(n) == expect,
             "N=" + std::to_string(n) + ": " + bench::expected_varint_size(n).to_string() + " vs " + expect.to_string());
  }

  // Independent crossover: one pass accumulating sizes value by value.
  const std::uint64_t limit = (1ULL << 28) + (1ULL << 22);
  std::uint64_t total = 0, first = 0;
  bool at_2_28_ok = false;
  for (std::uint64_t v = 0; v <= limit; ++v) {
    total += static_cast<std::uint64_t>(oracle::varint_len(v));
    if (v == (1ULL << 28)) at_2_28_ok = total <= 4 * (v + 1);
    if (total > 4 * (v + 1)) {
      first = v;
      break;
    }
  }
  const std::uint32_t cross = bench::first_n_exceeding(4);
  c.expect(at_2_28_ok, "E(2^28) exceeds 4 bytes");
  c.expect(first > (1ULL << 28), "oracle crossover at or below 2^28");
  c.expect(cross == first, "crossover " + std::to_string(cross) + " vs oracle " + std::to_string(first));
  c.note("E(1000) = " + bench::expected_varint_size(1000).to_string() + ", first N with E > 4: " + std::to_string(cross) +
         " = 2^28 + " + std::to_string(cross - (1u << 28)));
}

// --- 5 --------------------------------------------------------------------

struct Loopback {
  explicit Loopback(Server& server, LoopbackOptions options = {}) {
    auto [c, s] = loopback_pair(std::move(options));
    client_end = c;
    server_end = s;
    serving = std::thread([&server, s = s] { server.serve(s); });
    client = std::make_unique<Client>(client_end);
  }
  ~Loopback() {
    client->close();
    client.reset();
    serving.join();
  }
  std::shared_ptr<LoopbackConnection> client_end, server_end;
  std::thread serving;
  std::unique_ptr<Client> client;
};

void frames(Check& c) {
  int combos = 0;
  for (unsigned bits = 0; bits < 32; ++bits) {
    for (std::size_t size : {0u, 1u, 9u, 4096u}) {
      Bytes payload(size);
      for (std::size_t i = 0; i < size; ++i) payload[i] = static_cast<std::uint8_t>(i * 7 + bits);
      const FrameHeader h{static_cast<std::uint32_t>(size), static_cast<std::uint8_t>(bits), 0x01020304u + bits};
      const std::optional<std::uint64_t> cursor =
          (bits & flags::kCursor) ? std::optional<std::uint64_t>(0xfedcba9876543210ULL - size) : std::nullopt;
      const Bytes bytes = encode_frame(h, payload, cursor);
      ++combos;
      c.expect(bebop::detail::load_le<std::uint32_t>(bytes.data()) == size, "length counts the cursor trailer");
      c.expect(bytes.size() == kFrameHeaderSize + size + (cursor ? kCursorSize : 0), "frame size");
      ByteReader in(bytes);
      if (bits & flags::kCompressed) {
        bool rejected = false;
        try {
          decode_frame(in);
        } catch (const Error& e) {
          rejected = e.code() == ErrorCode::UnsupportedCompressed;
        }
        c.expect(rejected, "COMPRESSED frames are rejected on decode");
        continue;
      }
      const FrameView v = decode_frame(in);
      c.expect(in.remaining() == 0 && v.header == h && v.cursor == cursor &&
                   std::equal(v.payload.begin(), v.payload.end(), payload.begin(), payload.end()),
               "roundtrip flags=" + std::to_string(bits) + " size=" + std::to_string(size));
    }
  }

  const Bytes cursor_frame = encode_frame(FrameHeader{3, flags::kCursor, 1}, Bytes{1, 2, 3}, 9500);
  c.expect(to_hex(cursor_frame) == "03 00 00 00 10 01 00 00 00 01 02 03 1c 25 00 00 00 00 00 00",
           "cursor frame bytes " + to_hex(cursor_frame));

  Server server;
  demo::Counters counters;
  demo::install(server, counters);
  std::size_t framing = 0;
  {
    Loopback link(server);
    const Bytes req{'p', 'i', 'n', 'g'};
    c.expect(link.client->unary(demo::kEcho, req) == req, "echo over loopback");
    framing = link.client_end->stats().framing_bytes_sent + link.server_end->stats().framing_bytes_sent;
    c.expect(link.client_end->stats().frames_sent == 1 && link.server_end->stats().frames_sent == 1,
             "one frame each way");
  }
  c.expect(framing == kUnaryFramingBytes, "unary framing bytes " + std::to_string(framing));
  c.note(std::to_string(combos) + " flag/size/cursor combinations, unary framing " + std::to_string(framing) + " bytes");
}

// --- 6 --------------------------------------------------------------------

void batch(Check& c) {
  int graphs = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    std::vector<int> input(n, -1);
    for (;;) {
      std::vector<BatchCall> calls;
      for (std::size_t i = 0; i < n; ++i) calls.push_back({static_cast<std::int32_t>(i), 10, {}, input[i]});
      const BatchPlan plan = plan_batch(calls);
      const std::vector<int> depth = oracle::longest_path_layers(input);
      bool same = plan.layer_of.size() == n;
      for (std::size_t i = 0; same && i < n; ++i) same = plan.layer_of[i] == static_cast<std::size_t>(depth[i]);
      for (std::size_t l = 0; same && l < plan.layers.size(); ++l) {
        for (std::size_t i : plan.layers[l]) same = same && plan.layer_of[i] == l;
      }
      c.expect(same, "layers differ from longest path for a graph on " + std::to_string(n) + " calls");
      ++graphs;
      std::size_t k = 0;
      while (k < n && ++input[k] >= static_cast<int>(k)) input[k++] = -1;
      if (k == n) break;
    }
  }

  Server server;
  demo::Counters counters;
  demo::install(server, counters);
  const std::uint32_t inc = demo::id(demo::kIncrement);
  const std::uint32_t fail = demo::id(demo::kFail);
  LoopbackOptions lo;
  lo.latency = kInjectedLatency;
  const double rtt = 2.0 * std::chrono::duration<double, std::nano>(kInjectedLatency).count();
  double sequential = 0, batched = 0;
  {
    Loopback link(server, lo);
    Bytes v = u32(0);
    for (int i = 0; i < 3; ++i) v = link.client->unary(inc, v);
    c.expect(as_u32(v) == 3, "sequential chain result");
    sequential = static_cast<double>(link.client_end->virtual_now_ns());
  }
  {
    Loopback link(server, lo);
    const auto res = link.client->batch(BatchRequest{{{1, inc, u32(0), -1}, {2, inc, {}, 0}, {3, inc, {}, 1}}, std::nullopt, {}});
    c.expect(res.results.size() == 3 && as_u32(res.results.at(2).payload) == 3, "batched chain result");
    batched = static_cast<double>(link.client_end->virtual_now_ns());
  }
  c.expect(batched < kBatchMaxRtts * rtt, "batched took " + std::to_string(batched / rtt) + " RTT");
  c.expect(sequential >= kSequentialMinRtts * rtt, "sequential took " + std::to_string(sequential / rtt) + " RTT");

  {
    Loopback link(server);
    const auto res = link.client->batch(BatchRequest{{{1, fail, {}, -1}, {2, inc, {}, 0}, {3, inc, {}, 1}, {4, inc, u32(1), -1}}, std::nullopt, {}});
    c.expect(res.results.size() == 4, "failure batch size");
    if (res.results.size() == 4) {
      c.expect(res.results[0].status == Status::PermissionDenied, "failed call keeps its status");
      c.expect(static_cast<int>(res.results[1].status) == 3 && static_cast<int>(res.results[2].status) == 3,
               "dependents of a failure get status 3");
      c.expect(res.results[3].status == Status::Ok, "independent call succeeds");
    }
    const int before = counters.increment;
    const auto expired = link.client->batch(
        BatchRequest{{{1, inc, u32(0), -1}, {2, inc, {}, 0}}, Timestamp::from_unix_millis(Timestamp::now().to_unix_millis() - 1000), {}});
    bool all4 = expired.results.size() == 2;
    for (const auto& r : expired.results) all4 = all4 && static_cast<int>(r.status) == 4;
    c.expect(all4, "calls past the deadline get status 4");
    c.expect(counters.increment == before, "no handler runs after the deadline");
  }
  std::ostringstream o;
  o << graphs << " DAGs; batched " << batched / rtt << " RTT, sequential " << sequential / rtt << " RTT (RTT "
    << rtt / 1e6 << " ms virtual)";
  c.note(o.str());
}

// --- 7 --------------------------------------------------------------------

FutureDispatchRequest call_of(std::string_view path, Bytes payload) {
  FutureDispatchRequest r;
  r.call = UnaryCall{demo::id(path), std::move(payload), {}};
  return r;
}

std::vector<FutureResult> resolve_all(Client& client, std::vector<Uuid> ids) {
  auto stream = client.resolve_futures(FutureResolveRequest{std::move(ids)});
  std::vector<FutureResult> out;
  while (auto item = stream.next()) out.push_back(decode_future_result(item->payload));
  return out;
}

/// Opens a client as a distinct caller. Each returned object keeps its
/// connection alive until destroyed.
using Connect = std::function<std::shared_ptr<Client>(Server&, const std::string& caller)>;

void futures_over(Check& c, const std::string& transport, const Connect& connect) {
  const std::string t = transport + ": ";
  {
    Server server;
    demo::Counters counters;
    demo::install(server, counters);
    auto alice = connect(server, "alice");
    auto bob = connect(server, "bob");

    auto req = call_of(demo::kSlow, u32(20));
    req.idempotency_key = Uuid::random_v4();
    const auto h1 = alice->dispatch_future(req);
    const auto h2 = alice->dispatch_future(req);
    c.expect(h1.id == h2.id, t + "same key and caller map to one future");
    const auto r1 = resolve_all(*alice, {h1.id});
    c.expect(r1.size() == 1 && r1[0].status == Status::Ok, t + "future resolves");
    c.expect(counters.slow == 1, t + "one execution for a repeated key, got " + std::to_string(counters.slow));

    c.expect(static_cast<int>(status_of([&] { resolve_all(*bob, {h1.id}); })) == 7, t + "cross-caller resolve gives 7");
    c.expect(static_cast<int>(status_of([&] { bob->cancel_future(h1.id); })) == 7, t + "cross-caller cancel gives 7");
    const auto hb = bob->dispatch_future(req);
    c.expect(hb.id != h1.id, t + "other caller with the same key gets its own future");
    resolve_all(*bob, {hb.id});

    auto slow = call_of(demo::kSlow, u32(10000));
    slow.idempotency_key = Uuid::random_v4();
    const auto pending = alice->dispatch_future(slow);
    alice->cancel_future(pending.id);
    const auto cancelled = resolve_all(*alice, {pending.id});
    c.expect(cancelled.size() == 1 && cancelled[0].status == Status::Cancelled, t + "cancelled future reports CANCELLED");
    slow.call->payload = u32(1);
    const auto again = alice->dispatch_future(slow);
    c.expect(again.id != pending.id, t + "cancel releases the idempotency key");
    const auto again_r = resolve_all(*alice, {again.id});
    c.expect(again_r.size() == 1 && again_r[0].status == Status::Ok, t + "new dispatch after cancel runs");

    // Slow enough that the resolve below is subscribed before completion;
    // a discarded result only reaches subscribers that are already waiting.
    auto discard = call_of(demo::kSlow, u32(150));
    discard.discard_result = true;
    const auto d = alice->dispatch_future(discard);
    const auto live = resolve_all(*alice, {d.id});
    c.expect(live.size() == 1 && live[0].status == Status::Ok && live[0].payload == u32(150),
             t + "discarded result is delivered to the live subscriber");
    c.expect(!server.futures().store().load_result(d.id), t + "discarded result is not persisted");
    const auto later = resolve_all(*alice, {d.id});
    c.expect(later.size() == 1 && later[0].status != Status::Ok && later[0].payload.empty(),
             t + "discarded result is not rehydrated");
  }
  {
    ServerOptions options;
    options.future_retention = 2;
    Server server(options);
    demo::Counters counters;
    demo::install(server, counters);
    auto client = connect(server, "carol");
    std::vector<Uuid> ids;
    for (std::uint8_t i = 0; i < 4; ++i) {
      ids.push_back(client->dispatch_future(call_of(demo::kEcho, Bytes{i})).id);
      resolve_all(*client, {ids.back()});
    }
    auto& store = server.futures().store();
    c.expect(!store.load_result(ids[0]) && !store.load_result(ids[1]), t + "oldest results are evicted");
    c.expect(store.load_result(ids[2]) && store.load_result(ids[3]), t + "newest results are kept");
    c.expect(resolve_all(*client, {ids[0]}).at(0).status == Status::NotFound, t + "evicted future resolves NOT_FOUND");
  }
}

std::shared_ptr<Client> loopback_client(Server& server, const std::string& caller) {
  LoopbackOptions o;
  o.client_identity = caller;
  auto [client_end, server_end] = loopback_pair(std::move(o));
  auto serving = std::make_shared<std::thread>([&server, s = server_end] { server.serve(s); });
  return std::shared_ptr<Client>(new Client(client_end), [serving](Client* c) {
    c->close();
    delete c;
    serving->join();
  });
}

void futures(Check& c) {
  const auto start = Steady::now();
  futures_over(c, "loopback", loopback_client);

  // Each TCP connection is its own caller (peer ip:port).
  std::vector<std::unique_ptr<TcpServer>> listeners;
  std::map<Server*, TcpServer*> by_server;
  futures_over(c, "tcp", [&](Server& server, const std::string&) {
    if (!by_server.count(&server)) {
      listeners.push_back(std::make_unique<TcpServer>(server));
      by_server[&server] = listeners.back().get();
    }
    return std::make_shared<Client>(tcp_connect("127.0.0.1", by_server[&server]->port()));
  });
  const double s = seconds_since(start);
  c.expect(s < kFuturesSeconds, "runtime " + std::to_string(s) + " s");
  std::ostringstream o;
  o << c.checks() << " checks over loopback and TCP in " << std::fixed << std::setprecision(2) << s << " s";
  c.note(o.str());
  listeners.clear();
}

// --- 8 --------------------------------------------------------------------

void cursor_resume(Check& c) {
  Server server;
  demo::Counters counters;
  demo::install(server, counters);
  TcpServer tcp(server);
  constexpr std::uint32_t kTotal = 50;
  constexpr int kBeforeCut = 17;
  std::vector<std::uint32_t> first, rest;
  std::uint64_t resume = 0;
  {
    Client client(tcp_connect("127.0.0.1", tcp.port()));
    auto stream = client.server_stream(demo::id(demo::kCount), u32(kTotal));
    for (int i = 0; i < kBeforeCut; ++i) {
      auto item = stream.next();
      c.expect(item && item->cursor.has_value(), "stream item carries a cursor");
      if (item) first.push_back(as_u32(item->payload));
    }
    resume = stream.last_cursor().value_or(0);
    client.connection().close();
  }
  Client client(tcp_connect("127.0.0.1", tcp.port()));
  CallOptions opts;
  opts.cursor = resume;
  auto stream = client.server_stream(demo::id(demo::kCount), u32(kTotal), opts);
  while (auto item = stream.next()) rest.push_back(as_u32(item->payload));

  std::vector<std::uint32_t> suffix;
  for (std::uint32_t i = kBeforeCut; i < kTotal; ++i) suffix.push_back(i);
  c.expect(rest == suffix, "resumed stream is not the exact remaining suffix");
  std::vector<std::uint32_t> all = first;
  all.insert(all.end(), rest.begin(), rest.end());
  c.expect(std::set<std::uint32_t>(all.begin(), all.end()).size() == all.size(), "duplicates after resume");
  c.expect(all.size() == kTotal, "items lost");
  c.note("cut after " + std::to_string(first.size()) + ", resumed at cursor " + std::to_string(resume) + ", received " +
         std::to_string(rest.size()) + " more over TCP");
}

// --- 9 --------------------------------------------------------------------

void collect_refs(const TypeDescriptor& t, std::vector<std::string>& out) {
  if (t.kind == TypeKind::Defined) out.push_back(t.defined_fqn);
  if (t.element) collect_refs(*t.element, out);
  if (t.key) collect_refs(*t.key, out);
  if (t.value) collect_refs(*t.value, out);
}

void collect_refs(const DefinitionDescriptor& d, std::vector<std::string>& defined, std::vector<std::string>& refs) {
  defined.push_back(d.fqn);
  if (d.struct_def) for (const auto& f : d.struct_def->fields) collect_refs(f.type, refs);
  if (d.message_def) for (const auto& f : d.message_def->fields) collect_refs(f.type, refs);
  if (d.union_def) for (const auto& b : d.union_def->branches) refs.push_back(b.type_fqn);
  if (d.service_def) {
    for (const auto& m : d.service_def->methods) {
      refs.push_back(m.request_type);
      refs.push_back(m.response_type);
    }
  }
  for (const auto& n : d.nested) collect_refs(n, defined, refs);
}

void plugin_protocol(Check& c, const fs::path& tmp) {
  const fs::path src = tmp / "plugin_src";
  write_text(src / "base/ids.bop", "package base\nstruct Id { value: uuid; }\n");
  write_text(src / "mid/geo.bop", "package mid\nimport \"../base/ids.bop\"\nstruct Point { id: base.Id; x: float32; }\n");
  write_text(src / "app.bop",
             "package app\nimport \"mid/geo.bop\"\nmessage Route { points(1): mid.Point[]; owner(2): base.Id; }\n"
             "service Router { Plan(Route): Route; }\n");
  const fs::path out = tmp / "plugin_out";
  const fs::path dump = tmp / "plugin_response.bin";
  const std::string cmd = "cd " + quote(src) + " && PATH=" + quote(fs::path(ECHO_PLUGIN_DIR)) + ":\"$PATH\" " +
                          quote(BEBOPC_PATH) + " build app.bop --echo_out=" + quote(out) + " --echo_opt=dump=" + quote(dump);
  const auto r = run_command(cmd);
  c.expect(r.status == 0, "bebopc build exit " + std::to_string(r.status) + ": " + r.output);

  const std::string written = read_text(out / "echo.txt");
  c.expect(!written.empty(), "plugin output file missing");
  const Bytes response_bytes = [&] {
    const std::string raw = read_text(dump);
    return Bytes(raw.begin(), raw.end());
  }();
  plugin::CodeGeneratorResponse response;
  try {
    response = plugin::decode_response(response_bytes);
  } catch (const Error& e) {
    c.expect(false, std::string("plugin response dump undecodable: ") + e.what());
  }
  c.expect(response.files.size() == 1 && response.files[0].content == written,
           "written file differs from the returned content");

  const auto at = written.find("request ");
  plugin::CodeGeneratorRequest req;
  bool decoded = false;
  if (at != std::string::npos) {
    const auto end = written.find('\n', at);
    try {
      req = plugin::decode_request(from_hex(written.substr(at + 8, end - at - 8)));
      decoded = true;
    } catch (const Error& e) {
      c.expect(false, std::string("request undecodable: ") + e.what());
    }
  }
  c.expect(decoded, "plugin did not echo a request");
  if (!decoded) return;
  c.expect(req.files_to_generate == std::vector<std::string>{"app.bop"}, "files_to_generate");
  c.expect(req.parameter == "dump=" + dump.string(), "parameter '" + req.parameter + "'");
  c.expect(req.compiler_version == kCompilerVersion, "compiler version");
  c.expect(req.schemas.size() == 3, "three schemas in the request");

  // Every reference points at a definition from this or an earlier schema.
  std::set<std::string> seen;
  std::string order;
  bool sorted = true;
  for (const auto& s : req.schemas) {
    order += (order.empty() ? "" : " < ") + s.name;
    std::vector<std::string> defined, refs;
    for (const auto& d : s.definitions) collect_refs(d, defined, refs);
    seen.insert(defined.begin(), defined.end());
    for (const auto& ref : refs) {
      if (!seen.count(ref)) {
        sorted = false;
        c.expect(false, s.name + " refers to " + ref + " before it is defined");
      }
    }
  }
  c.expect(sorted, "schemas not topologically sorted");
  c.note("schemas " + order + "; echo.txt " + std::to_string(written.size()) + " bytes written verbatim");
}

// --- 10 -------------------------------------------------------------------

void performance(Check& c) {
  const auto start = Steady::now();
  bench::TimingOptions timing;
  timing.iterations = 20;
  timing.warmup = 3;
  volatile std::uint64_t sink = 0;

  const TypeRegistry& reg = bench::workload_registry();
  const bench::Workload arr = bench::make_workload("bfloat16_1536");
  const Bytes arr_wire = encode_value(arr.type, arr.value, reg);
  const std::string arr_json = value_to_json(arr.value, arr.type, reg, -1);
  c.expect(arr_wire.size() == 4 + 2 * 1536, "array wire size");

  const auto typed = bench::measure(
      [&] {
        ByteReader in(arr_wire);
        const std::vector<BFloat16> values = in.read_array_view<BFloat16>().to_vector();
        sink = sink + values.size() + values.back().bits;
      },
      timing);
  const auto dynamic = bench::measure([&] { sink = sink + decode_value(arr_wire, arr.type, reg).data.index(); }, timing);
  const auto json = bench::measure([&] { sink = sink + nlohmann::json::parse(arr_json).size(); }, timing);
  const double ratio = json.mean_ns / typed.mean_ns;
  c.expect(ratio >= kJsonOverDecodeMin, "JSON parse only " + std::to_string(ratio) + "x slower than decode");

  const bench::Workload shard = bench::make_workload("tensor_shard");
  const Bytes shard_wire = encode_value(shard.type, shard.value, reg);
  const ByteView data = shard_wire;
  Bytes scratch(65536);
  const auto decode64 = bench::measure([&] { sink = sink + decode_value(shard_wire, shard.type, reg).data.index(); }, timing);
  const auto copy64 = bench::measure(
      [&] {
        std::memcpy(scratch.data(), data.data() + 28, scratch.size());
        sink = sink + scratch[sink % scratch.size()];
      },
      timing);
  const double copy_ratio = decode64.mean_ns / copy64.mean_ns;
  c.expect(copy_ratio <= kDecodeOverCopyMax, "64 KiB decode " + std::to_string(copy_ratio) + "x a memcpy");
  const double s = seconds_since(start);
  c.expect(s < kPerfSeconds, "runtime " + std::to_string(s) + " s");

  std::ostringstream o;
  o << std::fixed << std::setprecision(1) << "bf16[1536]: JSON parse " << json.mean_ns / 1000 << " us vs decode "
    << typed.mean_ns << " ns (" << ratio << "x; schema-driven decode " << json.mean_ns / dynamic.mean_ns
    << "x); 64 KiB decode " << decode64.mean_ns << " ns vs memcpy " << copy64.mean_ns << " ns (" << copy_ratio << "x)";
  c.note(o.str());
}

}  // namespace

int main() {
  TempDir tmp;
  struct Criterion {
    const char* name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {"golden vectors", golden},
      {"property roundtrip", property},
      {"evolution matrix", [&](Check& c) { evolution(c, tmp.path); }},
      {"varint expected size", varint},
      {"frame protocol", frames},
      {"batch pipelining", batch},
      {"futures", futures},
      {"cursor resumption", cursor_resume},
      {"plugin protocol", [&](Check& c) { plugin_protocol(c, tmp.path); }},
      {"performance", performance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto start = Steady::now();
    try {
      criteria[i].run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    if (!c.ok()) ++failed;
    std::printf("%s %2zu %-22s %7.2fs  %s\n", c.ok() ? "PASS" : "FAIL", i + 1, criteria[i].name, seconds_since(start),
                c.summary().c_str());
    std::fflush(stdout);
  }
  return failed;
}
