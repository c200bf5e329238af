#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "bebop/plugin.hpp"

using namespace bebop;
using namespace bebop::plugin;
namespace fs = std::filesystem;

namespace {

const char* kSchema = R"(
struct Point { x: float32; y: float32; }
message Shape { at(1): Point; }
)";

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

struct TempDir {
  TempDir() {
    path = fs::temp_directory_path() / ("bebop_plugin_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
  static inline int counter = 0;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const fs::path kEcho = BEBOP_ECHO_PLUGIN;

}  // namespace

TEST(Plugin, RequestRoundtrip) {
  const auto req = make_request(compile_source(kSchema, "shapes.bop"), "a=b");
  EXPECT_EQ(req.files_to_generate, std::vector<std::string>{"shapes.bop"});
  EXPECT_EQ(req.parameter, "a=b");
  EXPECT_EQ(req.compiler_version.minor, kCompilerVersion.minor);
  ASSERT_EQ(req.schemas.size(), 1u);
  EXPECT_EQ(decode_request(encode(req)), req);
}

TEST(Plugin, ResponseRoundtrip) {
  CodeGeneratorResponse r;
  r.error = "";
  r.files = {{"a/b.txt", std::string("x\0y", 3)}, {"c", ""}};
  PluginDiagnostic d;
  d.severity = schema::Diagnostic::Severity::Warning;
  d.message = "careful";
  d.file = "shapes.bop";
  d.line = 3;
  d.column = 4;
  d.length = 5;
  r.diagnostics = {d};
  EXPECT_EQ(decode_response(encode(r)), r);
  r.error = "boom";
  r.files.clear();
  EXPECT_EQ(decode_response(encode(r)), r);
}

TEST(Plugin, Framing) {
  const Bytes msg{1, 2, 3};
  const Bytes framed = frame(msg);
  EXPECT_EQ(to_hex(framed), "03 00 00 00 01 02 03");
  const ByteView back = unframe(framed);
  EXPECT_EQ(Bytes(back.begin(), back.end()), msg);
  EXPECT_EQ(code_of([] { unframe(from_hex("05 00 00 00 01")); }), ErrorCode::PluginProtocolError);
  EXPECT_EQ(code_of([] { unframe(from_hex("01 00 00 00 01 02")); }), ErrorCode::PluginProtocolError);
  EXPECT_EQ(code_of([] { unframe(from_hex("01 00")); }), ErrorCode::PluginProtocolError);
}

TEST(Plugin, WriteFilesRejectsEscapingNames) {
  TempDir dir;
  for (const char* bad : {"../x", "/etc/x", "a/../../x", ""}) {
    CodeGeneratorResponse r;
    r.files = {{"fine.txt", "ok"}, {bad, "no"}};
    EXPECT_EQ(code_of([&] { write_files(r, dir.path); }), ErrorCode::PluginProtocolError) << bad;
    EXPECT_FALSE(fs::exists(dir.path / "fine.txt")) << bad;
  }
  CodeGeneratorResponse r;
  r.files = {{"sub/dir/out.txt", std::string("\x01\x00\xff", 3)}};
  const auto written = write_files(r, dir.path);
  ASSERT_EQ(written.size(), 1u);
  EXPECT_EQ(slurp(dir.path / "sub/dir/out.txt"), r.files[0].content);
}

TEST(Plugin, RunEcho) {
  const auto req = make_request(compile_source(kSchema, "shapes.bop"), "warn=hi");
  const auto resp = run_plugin(kEcho, req);
  EXPECT_TRUE(resp.error.empty());
  ASSERT_EQ(resp.files.size(), 1u);
  EXPECT_EQ(resp.files[0].name, "echo.txt");
  EXPECT_NE(resp.files[0].content.find("request " + to_hex(encode(req))), std::string::npos);
  EXPECT_NE(resp.files[0].content.find("schema shapes.bop Point Shape"), std::string::npos);
  ASSERT_EQ(resp.diagnostics.size(), 1u);
  EXPECT_EQ(resp.diagnostics[0].message, "hi");
}

TEST(Plugin, RunEchoFailures) {
  auto req = make_request(compile_source(kSchema, "shapes.bop"));
  req.parameter = "error=bad input";
  EXPECT_EQ(run_plugin(kEcho, req).error, "bad input");
  req.parameter = "exit=4";
  EXPECT_EQ(code_of([&] { run_plugin(kEcho, req); }), ErrorCode::PluginProtocolError);
  req.parameter = "garbage=1";
  EXPECT_EQ(code_of([&] { run_plugin(kEcho, req); }), ErrorCode::PluginProtocolError);
  req.parameter = "sleep=5000";
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(code_of([&] { run_plugin(kEcho, req, std::chrono::milliseconds(200)); }), ErrorCode::PluginProtocolError);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(3));
  EXPECT_EQ(code_of([&] { run_plugin("/nonexistent/bebopc-gen-x", req); }), ErrorCode::PluginNotFound);
}

TEST(Plugin, FindOnPath) {
  const std::string old = std::getenv("PATH") ? std::getenv("PATH") : "";
  ::setenv("PATH", (kEcho.parent_path().string() + ":" + old).c_str(), 1);
  const auto found = find_plugin("echo");
  ::setenv("PATH", old.c_str(), 1);
  ASSERT_TRUE(found.has_value());
  EXPECT_EQ(fs::canonical(*found), fs::canonical(kEcho));
  EXPECT_FALSE(find_plugin("definitely-not-installed").has_value());
}
