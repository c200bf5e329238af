#include "bebop/bench/runner.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "bebop/bench/golden.hpp"
#include "bebop/bench/varint.hpp"
#include "bebop/bench/workloads.hpp"
#include "bebop/value_json.hpp"

namespace bebop::bench {

namespace {

volatile std::uint64_t g_sink = 0;

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point from) {
  return std::chrono::duration<double, std::nano>(Clock::now() - from).count();
}

}  // namespace

Sample measure(const std::function<void()>& op, const TimingOptions& options) {
  if (options.iterations < 10) throw Error(ErrorCode::InvalidArgument, "at least 10 iterations are required");
  if (options.target.count() <= 0) throw Error(ErrorCode::InvalidArgument, "target time must be positive");

  // Calibrate: double the repetition count until one batch reaches the target.
  std::size_t reps = 1;
  for (;;) {
    const auto start = Clock::now();
    for (std::size_t i = 0; i < reps; ++i) op();
    const double ns = elapsed_ns(start);
    if (ns >= static_cast<double>(options.target.count()) || reps >= (std::size_t{1} << 30)) break;
    const double scale = ns <= 0 ? 16.0 : std::min(16.0, static_cast<double>(options.target.count()) / ns * 1.2);
    reps = std::max(reps + 1, static_cast<std::size_t>(static_cast<double>(reps) * scale));
  }

  std::vector<double> per_op;
  for (std::size_t it = 0; it < options.warmup + options.iterations; ++it) {
    const auto start = Clock::now();
    for (std::size_t i = 0; i < reps; ++i) op();
    const double ns = elapsed_ns(start) / static_cast<double>(reps);
    if (it >= options.warmup) per_op.push_back(ns);
  }

  Sample s;
  s.iterations = per_op.size();
  s.reps = reps;
  double sum = 0;
  for (double x : per_op) sum += x;
  s.mean_ns = sum / static_cast<double>(per_op.size());
  double var = 0;
  for (double x : per_op) var += (x - s.mean_ns) * (x - s.mean_ns);
  var /= static_cast<double>(per_op.size() - 1);
  s.cv = s.mean_ns > 0 ? std::sqrt(var) / s.mean_ns : 0;
  return s;
}

BenchReport run_bench(const BenchConfig& config) {
  std::vector<Workload> workloads;
  for (const auto& name : config.workloads) workloads.push_back(make_workload(name));
  if (config.timing.iterations < 10) throw Error(ErrorCode::InvalidArgument, "at least 10 iterations are required");

  const TypeRegistry& reg = workload_registry();
  BenchReport report;
  for (const auto& w : workloads) {
    WorkloadResult r;
    r.name = w.name;
    r.description = w.description;
    const Bytes wire = encode_value(w.type, w.value, reg);
    const std::string json_text = value_to_json(w.value, w.type, reg, -1);
    const nlohmann::ordered_json dom = nlohmann::ordered_json::parse(json_text);
    r.wire_bytes = wire.size();
    r.json_bytes = json_text.size();
    Bytes scratch(wire.size());

    r.encode = measure([&] { g_sink = g_sink + encode_value(w.type, w.value, reg).size(); }, config.timing);
    r.decode = measure([&] { g_sink = g_sink + decode_value(wire, w.type, reg).data.index(); }, config.timing);
    r.view_decode = measure([&] { g_sink = g_sink + w.view_decode(wire); }, config.timing);
    r.json_serialize = measure([&] { g_sink = g_sink + dom.dump().size(); }, config.timing);
    r.json_parse = measure([&] { g_sink = g_sink + nlohmann::ordered_json::parse(json_text).size(); }, config.timing);
    r.copy = measure(
        [&] {
          std::memcpy(scratch.data(), wire.data(), wire.size());
          g_sink = g_sink + scratch[scratch.size() / 2];
        },
        config.timing);
    report.results.push_back(std::move(r));
  }
  return report;
}

namespace {

std::string ns_cell(const Sample& s) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(s.mean_ns < 100 ? 1 : 0) << s.mean_ns << " (" << std::setprecision(1)
    << s.cv * 100 << "%)";
  return o.str();
}

}  // namespace

std::string format_table(const BenchReport& report) {
  std::ostringstream o;
  const int w = 18;
  o << std::left << std::setw(17) << "workload" << std::right << std::setw(8) << "wire B" << std::setw(9) << "json B"
    << std::setw(w) << "encode ns" << std::setw(w) << "decode ns" << std::setw(w) << "view ns" << std::setw(w)
    << "json ser ns" << std::setw(w) << "json parse ns" << std::setw(w) << "memcpy ns" << "\n";
  for (const auto& r : report.results) {
    o << std::left << std::setw(17) << r.name << std::right << std::setw(8) << r.wire_bytes << std::setw(9)
      << r.json_bytes << std::setw(w) << ns_cell(r.encode) << std::setw(w) << ns_cell(r.decode) << std::setw(w)
      << ns_cell(r.view_decode) << std::setw(w) << ns_cell(r.json_serialize) << std::setw(w) << ns_cell(r.json_parse)
      << std::setw(w) << ns_cell(r.copy) << "\n";
  }
  o << "mean ns per operation, coefficient of variation in parentheses\n";
  return o.str();
}

std::string format_csv(const BenchReport& report) {
  std::ostringstream o;
  o << "workload,wire_bytes,json_bytes,encode_ns,encode_cv,decode_ns,decode_cv,view_decode_ns,view_decode_cv,"
       "json_serialize_ns,json_serialize_cv,json_parse_ns,json_parse_cv,copy_ns,copy_cv,iterations\n";
  o << std::setprecision(6);
  for (const auto& r : report.results) {
    o << r.name << ',' << r.wire_bytes << ',' << r.json_bytes;
    for (const Sample* s : {&r.encode, &r.decode, &r.view_decode, &r.json_serialize, &r.json_parse, &r.copy}) {
      o << ',' << s->mean_ns << ',' << s->cv;
    }
    o << ',' << r.encode.iterations << "\n";
  }
  return o.str();
}

std::string varint_report(bool csv) {
  std::ostringstream o;
  if (csv) o << "n,expected_num,expected_den,expected,fixed\n";
  else o << std::left << std::setw(12) << "N" << std::setw(28) << "E[varint bytes]" << "vs 4 bytes\n";
  for (unsigned k = 0; k <= 32; ++k) {
    const std::uint32_t n = k == 32 ? UINT32_MAX : std::uint32_t{1} << k;
    const Rational e = expected_varint_size(n);
    if (csv) {
      o << n << ',' << e.num << ',' << e.den << ',' << std::setprecision(10) << e.value() << ",4\n";
    } else {
      std::ostringstream v;
      v << std::fixed << std::setprecision(6) << e.value();
      const char* cmp = e > Rational{4, 1} ? "larger" : e == Rational{4, 1} ? "equal" : "smaller";
      o << std::left << std::setw(12) << (k == 32 ? std::string("2^32-1") : "2^" + std::to_string(k)) << std::setw(28)
        << v.str() << cmp << "\n";
    }
  }
  const std::uint32_t cross = first_n_exceeding(4);
  if (!csv) o << "first N with E > 4 bytes: " << cross << " (2^28 + " << (cross - (std::uint32_t{1} << 28)) << ")\n";
  return o.str();
}

std::string golden_report(bool* all_ok) {
  const auto results = check_golden(golden_suite());
  std::ostringstream o;
  std::size_t passed = 0;
  for (const auto& r : results) {
    if (r.ok()) ++passed;
    o << (r.ok() ? "ok   " : "FAIL ") << std::left << std::setw(20) << r.name << r.expected_hex << "\n";
    if (!r.ok()) {
      o << "     got " << r.actual_hex << (r.decode_ok ? "" : " (decode mismatch)");
      if (!r.error.empty()) o << " error: " << r.error;
      o << "\n";
    }
  }
  o << passed << "/" << results.size() << " golden vectors match\n";
  if (all_ok) *all_ok = passed == results.size();
  return o.str();
}

}  // namespace bebop::bench
