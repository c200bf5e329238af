// bebopc: build schemas, run generator plugins, check evolution, and
// encode, decode, or hash from the command line.
//
// Exit status: 0 success, 1 diagnostics (schema errors, plugin failures,
// breaking changes), 2 usage.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "bebop/compiler.hpp"
#include "bebop/evolution.hpp"
#include "bebop/plugin.hpp"
#include "bebop/routing.hpp"
#include "bebop/value_json.hpp"

using namespace bebop;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kUsage = 2;

const char* severity_name(schema::Diagnostic::Severity s) {
  switch (s) {
    case schema::Diagnostic::Severity::Error: return "error";
    case schema::Diagnostic::Severity::Warning: return "warning";
    case schema::Diagnostic::Severity::Info: return "info";
  }
  return "error";
}

void report(const Error& e) {
  std::cerr << (e.span() ? format_span(*e.span()) + ": " : std::string()) << "error[" << to_string(e.code())
            << "]: " << e.detail() << "\n";
}

void report_warnings(const Compilation& c) {
  for (const auto& w : c.resolved.warnings) {
    std::cerr << format_span(w.span) << ": " << severity_name(w.severity) << ": " << w.message << "\n";
  }
}

Bytes read_file(const std::string& path) {
  std::ifstream in;
  std::istream* src = &std::cin;
  if (path != "-") {
    in.open(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
    src = &in;
  }
  std::ostringstream s;
  s << src->rdbuf();
  const std::string text = s.str();
  return Bytes(text.begin(), text.end());
}

void write_file(const std::string& path, ByteView bytes) {
  if (path == "-") {
    std::cout.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
}

struct PluginFlags {
  std::string out_dir;
  std::vector<std::string> opts;
};

/// Pulls `--NAME_out=DIR` and `--NAME_opt=VALUE` (or the two-token forms)
/// out of argv, since CLI11 cannot declare options with a variable name.
std::map<std::string, PluginFlags> extract_plugin_flags(std::vector<std::string>& args, std::string& error) {
  std::map<std::string, PluginFlags> out;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) {
      rest.push_back(a);
      continue;
    }
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    const bool is_out = key.size() > 4 && key.compare(key.size() - 4, 4, "_out") == 0 && key != "descriptor_out";
    const bool is_opt = key.size() > 4 && key.compare(key.size() - 4, 4, "_opt") == 0;
    if (!is_out && !is_opt) {
      rest.push_back(a);
      continue;
    }
    std::string value;
    if (eq != std::string::npos) {
      value = a.substr(eq + 1);
    } else if (i + 1 < args.size()) {
      value = args[++i];
    } else {
      error = a + " needs a value";
      return {};
    }
    auto& flags = out[key.substr(0, key.size() - 4)];
    if (is_out) flags.out_dir = value;
    else flags.opts.push_back(value);
  }
  for (const auto& [name, flags] : out) {
    if (flags.out_dir.empty()) {
      error = "--" + name + "_opt given without --" + name + "_out";
      return {};
    }
  }
  args = std::move(rest);
  return out;
}

struct BuildArgs {
  std::vector<std::string> files;
  std::vector<std::string> include_dirs;
  std::string descriptor_out;
  double plugin_timeout_s = 60;
  std::map<std::string, PluginFlags> plugins;
};

int run_build(const BuildArgs& args) {
  Compilation c;
  try {
    c = compile_files(args.files, args.include_dirs);
  } catch (const Error& e) {
    report(e);
    return kDiagnostics;
  }
  report_warnings(c);

  if (!args.descriptor_out.empty()) {
    try {
      write_file(args.descriptor_out, encode_descriptor_set(c.descriptors));
    } catch (const Error& e) {
      report(e);
      return kDiagnostics;
    }
  }

  // Plugins run concurrently; writes into the same directory are serialized.
  std::map<std::string, std::mutex> dir_locks;
  for (const auto& [name, flags] : args.plugins) dir_locks[fs::absolute(flags.out_dir).lexically_normal().string()];
  std::mutex log_lock;
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(args.plugin_timeout_s * 1000));

  auto run_one = [&](const std::string& name, const PluginFlags& flags) -> bool {
    std::ostringstream log;
    bool ok = true;
    try {
      const auto exe = plugin::find_plugin(name);
      if (!exe) throw Error(ErrorCode::PluginNotFound, "bebopc-gen-" + name + " not found on PATH");
      std::string parameter;
      for (const auto& o : flags.opts) parameter += (parameter.empty() ? "" : ",") + o;
      const auto response = plugin::run_plugin(*exe, plugin::make_request(c, parameter), timeout);
      for (const auto& d : response.diagnostics) {
        log << (d.file.empty() ? std::string("<plugin>") : d.file) << ':' << d.line << ':' << d.column << ": "
            << severity_name(d.severity) << ": " << d.message << " [" << name << "]\n";
        if (d.severity == schema::Diagnostic::Severity::Error) ok = false;
      }
      if (!response.error.empty()) throw Error(ErrorCode::PluginReportedError, name + ": " + response.error);
      std::lock_guard lock(dir_locks.at(fs::absolute(flags.out_dir).lexically_normal().string()));
      plugin::write_files(response, flags.out_dir);
    } catch (const Error& e) {
      log << "error[" << to_string(e.code()) << "]: " << e.detail() << "\n";
      ok = false;
    } catch (const std::exception& e) {
      log << "error: " << name << ": " << e.what() << "\n";
      ok = false;
    }
    std::lock_guard lock(log_lock);
    std::cerr << log.str();
    return ok;
  };

  std::vector<std::future<bool>> runs;
  for (const auto& [name, flags] : args.plugins) runs.push_back(std::async(std::launch::async, run_one, name, flags));
  bool ok = true;
  for (auto& r : runs) ok = r.get() && ok;
  return ok ? kOk : kDiagnostics;
}

int run_check(const std::string& before_path, const std::string& after_path, const std::vector<std::string>& includes) {
  Compilation before, after;
  try {
    before = compile_files({before_path}, includes);
    after = compile_files({after_path}, includes);
  } catch (const Error& e) {
    report(e);
    return kDiagnostics;
  }
  const auto changes = check_evolution(before.descriptors, after.descriptors);
  for (const auto& ch : changes) std::cout << format_change(ch) << "\n";
  return has_breaking(changes) ? kDiagnostics : kOk;
}

int run_hash(const std::string& path) {
  if (!split_method_path(path)) {
    std::cerr << "usage: bebopc hash /Service/Method (got '" << path << "')\n";
    return kUsage;
  }
  const std::uint32_t id = routing_id_for_path(path);
  char hex[16];
  std::snprintf(hex, sizeof hex, "0x%08x", id);
  std::cout << id << " " << hex << "\n";
  return kOk;
}

struct CodecArgs {
  std::string schema;
  std::vector<std::string> include_dirs;
  std::string type;
  std::string input = "-";
  std::string output = "-";
  bool hex = false;
};

int run_codec(const CodecArgs& args, bool encode) {
  try {
    const Compilation c = compile_files({args.schema}, args.include_dirs);
    const TypeRegistry reg(c.descriptors);
    reg.get(args.type);
    const TypeDescriptor type = TypeDescriptor::defined(args.type);
    const Bytes in = read_file(args.input);
    if (encode) {
      const Value v = value_from_json(std::string_view(reinterpret_cast<const char*>(in.data()), in.size()), type, reg);
      const Bytes out = encode_value(type, v, reg);
      if (args.hex) {
        const std::string h = to_hex(out) + "\n";
        write_file(args.output, Bytes(h.begin(), h.end()));
      } else {
        write_file(args.output, out);
      }
    } else {
      const Bytes wire = args.hex ? from_hex(std::string(in.begin(), in.end())) : in;
      ByteReader reader(wire);
      const Value v = decode_value(reader, type, reg);
      if (reader.remaining() != 0) {
        std::cerr << "warning: " << reader.remaining() << " trailing bytes ignored\n";
      }
      const std::string json = value_to_json(v, type, reg) + "\n";
      write_file(args.output, Bytes(json.begin(), json.end()));
    }
  } catch (const Error& e) {
    report(e);
    return kDiagnostics;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string flag_error;
  auto plugins = extract_plugin_flags(args, flag_error);
  if (!flag_error.empty()) {
    std::cerr << "bebopc: " << flag_error << "\n";
    return kUsage;
  }

  CLI::App app{"Bebop schema compiler"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Compile schemas and run generator plugins (--NAME_out=DIR, --NAME_opt=VALUE)");
  build_cmd->add_option("files", build.files, "Schema files")->required();
  build_cmd->add_option("-I,--include", build.include_dirs, "Import search directory");
  build_cmd->add_option("--descriptor_out", build.descriptor_out, "Write the binary descriptor set here");
  build_cmd->add_option("--plugin_timeout", build.plugin_timeout_s, "Seconds before a plugin is killed")
      ->check(CLI::PositiveNumber);

  std::string before, after;
  std::vector<std::string> check_includes;
  auto* check_cmd = app.add_subcommand("check", "Report changes between two schema versions");
  check_cmd->add_option("old", before, "Previous schema")->required();
  check_cmd->add_option("new", after, "Current schema")->required();
  check_cmd->add_option("-I,--include", check_includes, "Import search directory");

  std::string method_path;
  auto* hash_cmd = app.add_subcommand("hash", "Print the routing id of /Service/Method");
  hash_cmd->add_option("path", method_path, "/Service/Method")->required();

  CodecArgs codec;
  auto add_codec = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("schema", codec.schema, "Schema file")->required();
    cmd->add_option("type", codec.type, "Fully-qualified type name")->required();
    cmd->add_option("-I,--include", codec.include_dirs, "Import search directory");
    cmd->add_option("-i,--input", codec.input, "Input file, - for stdin");
    cmd->add_option("-o,--output", codec.output, "Output file, - for stdout");
    cmd->add_flag("--hex", codec.hex, "Binary side is space-separated hex text");
    return cmd;
  };
  auto* encode_cmd = add_codec("encode", "JSON to binary");
  auto* decode_cmd = add_codec("decode", "Binary to JSON");

  std::vector<const char*> rest{argv[0]};
  for (const auto& a : args) rest.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(rest.size()), const_cast<char**>(rest.data()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (!plugins.empty() && !build_cmd->parsed()) {
    std::cerr << "bebopc: plugin flags are only valid with build\n";
    return kUsage;
  }
  if (build_cmd->parsed()) {
    build.plugins = std::move(plugins);
    return run_build(build);
  }
  if (check_cmd->parsed()) return run_check(before, after, check_includes);
  if (hash_cmd->parsed()) return run_hash(method_path);
  if (encode_cmd->parsed()) return run_codec(codec, true);
  if (decode_cmd->parsed()) return run_codec(codec, false);
  return kUsage;
}
