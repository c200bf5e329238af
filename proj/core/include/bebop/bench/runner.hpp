#pragma once

// Timing loop and report formatting for the benchmark CLI.

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bebop::bench {

struct Sample {
  double mean_ns = 0;
  /// Standard deviation over mean, across iterations.
  double cv = 0;
  std::size_t iterations = 0;
  std::size_t reps = 0;
};

struct TimingOptions {
  std::size_t iterations = 20;
  std::size_t warmup = 2;
  /// Each iteration repeats the operation until roughly this long.
  std::chrono::nanoseconds target = std::chrono::milliseconds(2);
};

/// Times `op` on the monotonic clock. Warmup iterations are discarded.
/// Throws Error(InvalidArgument) for fewer than 10 iterations.
Sample measure(const std::function<void()>& op, const TimingOptions& options = {});

struct BenchConfig {
  std::vector<std::string> workloads;
  TimingOptions timing;
};

struct WorkloadResult {
  std::string name;
  std::string description;
  std::size_t wire_bytes = 0;
  std::size_t json_bytes = 0;
  Sample encode;
  /// Schema-driven decode into a Value.
  Sample decode;
  /// Typed reader over views of the wire bytes.
  Sample view_decode;
  Sample json_serialize;
  Sample json_parse;
  /// memcpy of wire_bytes into a preallocated buffer.
  Sample copy;
};

struct BenchReport {
  std::vector<WorkloadResult> results;
};

/// Throws Error(InvalidArgument) for unknown workloads or bad timing options.
BenchReport run_bench(const BenchConfig& config);

std::string format_table(const BenchReport& report);

/// Header row:
/// workload,wire_bytes,json_bytes,encode_ns,encode_cv,decode_ns,decode_cv,
/// view_decode_ns,view_decode_cv,json_serialize_ns,json_serialize_cv,
/// json_parse_ns,json_parse_cv,copy_ns,copy_cv,iterations
std::string format_csv(const BenchReport& report);

/// Expected varint size against fixed 4 bytes for N = 2^k, k = 0..32 (last
/// row is 2^32 - 1), plus the crossover point. `csv` selects plot data.
std::string varint_report(bool csv);

/// One line per golden vector, then a summary line.
std::string golden_report(bool* all_ok = nullptr);

}  // namespace bebop::bench
