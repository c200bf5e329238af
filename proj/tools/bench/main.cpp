// bebop-bench: golden-vector check, varint size analysis, and timing of the
// benchmark workloads against a JSON text baseline.

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <set>

#include "bebop/bench/runner.hpp"
#include "bebop/bench/workloads.hpp"
#include "bebop/error.hpp"

using namespace bebop;
using namespace bebop::bench;

int main(int argc, char** argv) {
  CLI::App app{"Bebop benchmarks and analysis"};
  std::vector<std::string> workloads{"all"};
  std::vector<std::string> reports{"golden", "varint", "bench"};
  std::string format = "table";
  BenchConfig config;
  double target_ms = 2.0;

  app.add_option("--workloads", workloads, "Comma-separated workload names, or all")->delimiter(',');
  app.add_option("--iterations", config.timing.iterations, "Timed iterations per measurement (at least 10)");
  app.add_option("--warmup", config.timing.warmup, "Discarded iterations before timing");
  app.add_option("--target-ms", target_ms, "Approximate length of one iteration")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "csv"}));
  app.add_option("--report", reports, "Sections to print: golden, varint, bench")
      ->delimiter(',')
      ->check(CLI::IsMember({"golden", "varint", "bench"}));
  app.add_flag_callback("--list", [] {
    for (const auto& n : workload_names()) std::cout << n << "\n";
    std::exit(0);
  }, "List workload names");
  CLI11_PARSE(app, argc, argv);

  if (workloads.size() == 1 && workloads[0] == "all") workloads = workload_names();
  config.workloads = workloads;
  config.timing.target = std::chrono::nanoseconds(static_cast<long long>(target_ms * 1e6));
  const std::set<std::string> want(reports.begin(), reports.end());
  const bool csv = format == "csv";

  int status = 0;
  if (want.count("golden")) {
    bool ok = false;
    std::cout << golden_report(&ok) << "\n";
    if (!ok) status = 1;
  }
  if (want.count("varint")) std::cout << varint_report(csv) << "\n";
  if (want.count("bench")) {
    try {
      const BenchReport r = run_bench(config);
      std::cout << (csv ? format_csv(r) : format_table(r));
      if (!csv) {
        std::cout << "\nratios (higher favours the binary path):\n";
        for (const auto& w : r.results) {
          std::cout << "  " << std::left << std::setw(17) << w.name << std::fixed << std::setprecision(1)
                    << "json parse / view decode " << std::setw(10) << w.json_parse.mean_ns / w.view_decode.mean_ns
                    << "json parse / decode " << std::setw(8) << w.json_parse.mean_ns / w.decode.mean_ns
                    << "decode / memcpy " << w.decode.mean_ns / w.copy.mean_ns << "\n";
        }
      }
    } catch (const Error& e) {
      std::cerr << "bebop-bench: " << e.what() << "\n";
      return 2;
    }
  }
  return status;
}
