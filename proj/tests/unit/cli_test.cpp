#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bebop/descriptor.hpp"
#include "oracles/oracles.hpp"

using namespace bebop;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int status = -1;
  std::string output;
};

CliRun run(const std::string& args, const std::string& cwd) {
  const std::string cmd = "cd '" + cwd + "' && PATH='" + fs::path(BEBOP_ECHO_PLUGIN).parent_path().string() +
                          "':\"$PATH\" '" BEBOPC_PATH "' " + args + " 2>&1";
  CliRun r;
  FILE* p = ::popen(cmd.c_str(), "r");
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.output.append(buf, n);
  const int raw = ::pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("bebop_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "point.bop") << "struct Point { x: float32; y: float32; }\n";
    std::ofstream(dir / "bad.bop") << "message M {\n  a(1): int32;\n  b(1): int32;\n}\n";
  }
  void TearDown() override { fs::remove_all(dir); }
  CliRun bebopc(const std::string& args) { return run(args, dir.string()); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, DescriptorOutIsDecodableAndDeterministic) {
  ASSERT_EQ(bebopc("build point.bop --descriptor_out=a.bopd").status, 0);
  ASSERT_EQ(bebopc("build point.bop --descriptor_out b.bopd").status, 0);
  const std::string a = slurp(dir / "a.bopd");
  EXPECT_EQ(a, slurp(dir / "b.bopd"));
  const DescriptorSet set = decode_descriptor_set(Bytes(a.begin(), a.end()));
  ASSERT_EQ(set.schemas.size(), 1u);
  EXPECT_EQ(set.schemas[0].definitions.at(0).name, "Point");
}

TEST_F(Cli, SchemaErrorsReportSpans) {
  const CliRun r = bebopc("build bad.bop");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("bad.bop:3:"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("DuplicateTag"), std::string::npos) << r.output;
}

TEST_F(Cli, Hash) {
  const CliRun r = bebopc("hash /ChatService/Send");
  EXPECT_EQ(r.status, 0);
  const std::uint32_t id = oracle::murmur3_lowbias("/ChatService/Send");
  char hex[16];
  std::snprintf(hex, sizeof hex, "0x%08x", id);
  EXPECT_EQ(r.output, std::to_string(id) + " " + hex + "\n");
  EXPECT_EQ(bebopc("hash /ChatService/Send").output, r.output);
  EXPECT_EQ(bebopc("hash ChatService.Send").status, 2);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(bebopc("").status, 2);
  EXPECT_EQ(bebopc("frobnicate").status, 2);
  EXPECT_EQ(bebopc("build").status, 2);
  EXPECT_EQ(bebopc("check point.bop").status, 2);
  EXPECT_EQ(bebopc("hash /A/B --echo_out=x").status, 2);
  EXPECT_EQ(bebopc("build point.bop --echo_opt=x").status, 2);
  EXPECT_EQ(bebopc("--help").status, 0);
}

TEST_F(Cli, EncodeDecode) {
  std::ofstream(dir / "p.json") << R"({"x": 1, "y": 2})";
  const CliRun enc = bebopc("encode point.bop Point -i p.json --hex");
  EXPECT_EQ(enc.status, 0);
  EXPECT_EQ(enc.output, "00 00 80 3f 00 00 00 40\n");
  ASSERT_EQ(bebopc("encode point.bop Point -i p.json -o p.bin").status, 0);
  const CliRun dec = bebopc("decode point.bop Point -i p.bin");
  EXPECT_EQ(dec.status, 0);
  EXPECT_NE(dec.output.find("\"y\": 2.0"), std::string::npos) << dec.output;
  EXPECT_EQ(bebopc("encode point.bop Nope -i p.json").status, 1);
}

TEST_F(Cli, PluginFailures) {
  EXPECT_EQ(bebopc("build point.bop --missing_out=g").status, 1);
  const CliRun reported = bebopc("build point.bop --echo_out=g --echo_opt=error=unsupported");
  EXPECT_EQ(reported.status, 1);
  EXPECT_NE(reported.output.find("PluginReportedError"), std::string::npos) << reported.output;
  const CliRun escape = bebopc("build point.bop --echo_out=g --echo_opt=name=../escaped.txt");
  EXPECT_EQ(escape.status, 1);
  EXPECT_FALSE(fs::exists(dir / "escaped.txt"));
  EXPECT_EQ(bebopc("build point.bop --echo_out=g --echo_opt=sleep=3000 --plugin_timeout=0.2").status, 1);
  EXPECT_EQ(bebopc("build point.bop --echo_out=g --echo_opt=exit=3").status, 1);
}

TEST_F(Cli, PluginOptionsAreJoined) {
  const CliRun r = bebopc("build point.bop --echo_out=one --echo_opt=name=a.txt --echo_opt=warn=w");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir / "one/a.txt"));
  EXPECT_NE(r.output.find("warning: w [echo]"), std::string::npos) << r.output;
}

TEST_F(Cli, CheckReportsChanges) {
  std::ofstream(dir / "e1.bop") << "enum E { A = 0; }\n";
  std::ofstream(dir / "e2.bop") << "enum E { A = 0; B = 1; }\n";
  std::ofstream(dir / "m1.bop") << "message M { a(1): int32; }\n";
  std::ofstream(dir / "m2.bop") << "message M { a(1): string; }\n";
  const CliRun safe = bebopc("check e1.bop e2.bop");
  EXPECT_EQ(safe.status, 0);
  EXPECT_NE(safe.output.find("safe: "), std::string::npos);
  const CliRun breaking = bebopc("check m1.bop m2.bop");
  EXPECT_EQ(breaking.status, 1);
  EXPECT_NE(breaking.output.find("Never reuse tag with different type"), std::string::npos) << breaking.output;
  const CliRun same = bebopc("check point.bop point.bop");
  EXPECT_EQ(same.status, 0);
  EXPECT_EQ(same.output, "");
}
