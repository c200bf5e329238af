#include "bebop/plugin.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <pthread.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "bebop/dynvalue.hpp"
#include "bebop/meta_schema.hpp"
#include "message_fields.hpp"

namespace bebop::plugin {

namespace {

using fields::In;
using fields::Out;

[[noreturn]] void protocol_error(const std::string& what) { throw Error(ErrorCode::PluginProtocolError, what); }

}  // namespace

Bytes encode(const CodeGeneratorRequest& r) {
  Out o;
  std::vector<Value> files;
  for (const auto& f : r.files_to_generate) files.emplace_back(f);
  o.list(1, std::move(files));
  o.str(2, r.parameter);
  o.value(3, make_struct({Value(Primitive(r.compiler_version.major)), Value(Primitive(r.compiler_version.minor)),
                          Value(Primitive(r.compiler_version.patch))}));
  std::vector<Value> schemas;
  for (const auto& s : r.schemas) schemas.push_back(schema_descriptor_to_value(s));
  o.list(4, std::move(schemas));
  return encode_value(meta::type("CodeGeneratorRequest"), o.done(), meta::registry());
}

CodeGeneratorRequest decode_request(ByteView bytes) {
  const Value v = decode_value(bytes, meta::type("CodeGeneratorRequest"), meta::registry());
  In in(v);
  CodeGeneratorRequest r;
  for (const auto& f : in.list(1)) r.files_to_generate.push_back(f.as<std::string>());
  r.parameter = in.str(2);
  if (const Value* ver = in.get(3)) {
    const auto& f = ver->as<StructValue>().fields;
    r.compiler_version = {std::get<std::uint32_t>(f[0].as<Primitive>()), std::get<std::uint32_t>(f[1].as<Primitive>()),
                          std::get<std::uint32_t>(f[2].as<Primitive>())};
  }
  for (const auto& s : in.list(4)) r.schemas.push_back(schema_descriptor_from_value(s));
  return r;
}

Bytes encode(const CodeGeneratorResponse& r) {
  Out o;
  o.str(1, r.error);
  std::vector<Value> files;
  for (const auto& f : r.files) {
    Out file;
    file.str(1, f.name);
    file.str(2, f.content);
    files.push_back(file.done());
  }
  o.list(2, std::move(files));
  std::vector<Value> diags;
  for (const auto& d : r.diagnostics) {
    Out diag;
    diag.value(1, fields::enum_u8(static_cast<std::uint8_t>(d.severity)));
    diag.str(2, d.message);
    if (!d.file.empty() || d.line || d.column || d.length) {
      Out span;
      span.str(1, d.file);
      span.num(2, d.line);
      span.num(3, d.column);
      span.num(4, d.length);
      diag.value(3, span.done());
    }
    diags.push_back(diag.done());
  }
  o.list(3, std::move(diags));
  return encode_value(meta::type("CodeGeneratorResponse"), o.done(), meta::registry());
}

CodeGeneratorResponse decode_response(ByteView bytes) {
  const Value v = decode_value(bytes, meta::type("CodeGeneratorResponse"), meta::registry());
  In in(v);
  CodeGeneratorResponse r;
  r.error = in.str(1);
  for (const auto& item : in.list(2)) {
    In f(item);
    r.files.push_back({f.str(1), f.str(2)});
  }
  for (const auto& item : in.list(3)) {
    In d(item);
    PluginDiagnostic diag;
    diag.severity = static_cast<schema::Diagnostic::Severity>(d.enumeration(1));
    diag.message = d.str(2);
    if (const Value* span = d.get(3)) {
      In s(*span);
      diag.file = s.str(1);
      diag.line = s.num<std::uint32_t>(2);
      diag.column = s.num<std::uint32_t>(3);
      diag.length = s.num<std::uint32_t>(4);
    }
    r.diagnostics.push_back(std::move(diag));
  }
  return r;
}

Bytes frame(ByteView message) {
  ByteWriter w;
  w.write_le<std::uint32_t>(static_cast<std::uint32_t>(message.size()));
  w.write_raw(message);
  return w.take();
}

ByteView unframe(ByteView framed) {
  if (framed.size() < 4) protocol_error("plugin output is " + std::to_string(framed.size()) + " bytes, too short");
  const auto n = bebop::detail::load_le<std::uint32_t>(framed.data());
  if (framed.size() - 4 != n) {
    protocol_error("plugin output frame declares " + std::to_string(n) + " bytes but carries " +
                   std::to_string(framed.size() - 4));
  }
  return framed.subspan(4);
}

CodeGeneratorRequest make_request(const Compilation& compilation, std::string parameter) {
  CodeGeneratorRequest r;
  r.files_to_generate = compilation.roots;
  r.parameter = std::move(parameter);
  r.compiler_version = kCompilerVersion;
  r.schemas = compilation.descriptors.schemas;
  return r;
}

std::optional<std::filesystem::path> find_plugin(const std::string& name) {
  const std::string exe = "bebopc-gen-" + name;
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::string_view rest(path);
  while (true) {
    const auto colon = rest.find(':');
    const std::string dir(rest.substr(0, colon));
    const std::filesystem::path candidate = std::filesystem::path(dir.empty() ? "." : dir) / exe;
    if (::access(candidate.c_str(), X_OK) == 0 && !std::filesystem::is_directory(candidate)) return candidate;
    if (colon == std::string_view::npos) return std::nullopt;
    rest.remove_prefix(colon + 1);
  }
}

namespace {

// Keeps a plugin that exits without reading its input from killing us with
// SIGPIPE: the signal is blocked for this thread and any pending one dropped.
class SigpipeGuard {
 public:
  SigpipeGuard() {
    sigemptyset(&pipe_);
    sigaddset(&pipe_, SIGPIPE);
    ::pthread_sigmask(SIG_BLOCK, &pipe_, &old_);
  }
  ~SigpipeGuard() {
    const timespec zero{0, 0};
    while (::sigtimedwait(&pipe_, nullptr, &zero) > 0) {
    }
    ::pthread_sigmask(SIG_SETMASK, &old_, nullptr);
  }

 private:
  sigset_t pipe_, old_;
};

struct Fd {
  int fd = -1;
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

}  // namespace

CodeGeneratorResponse run_plugin(const std::filesystem::path& executable, const CodeGeneratorRequest& request,
                                 std::chrono::milliseconds timeout) {
  const Bytes input = frame(encode(request));
  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw Error(ErrorCode::PluginNotFound, std::string("pipe: ") + std::strerror(errno));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorCode::PluginNotFound, std::string("pipe: ") + std::strerror(errno));
  }
  // Reports exec failure from the child through a close-on-exec pipe.
  int exec_pipe[2];
  if (::pipe2(exec_pipe, O_CLOEXEC) != 0) throw Error(ErrorCode::PluginNotFound, "pipe2 failed");

  const pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorCode::PluginNotFound, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], exec_pipe[0]}) ::close(fd);
    ::execl(executable.c_str(), executable.c_str(), static_cast<char*>(nullptr));
    const int err = errno;
    [[maybe_unused]] auto n = ::write(exec_pipe[1], &err, sizeof err);
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(exec_pipe[1]);
  Fd to_child{in_pipe[1]}, from_child{out_pipe[0]}, exec_status{exec_pipe[0]};

  int exec_errno = 0;
  if (::read(exec_status.fd, &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
    ::waitpid(pid, nullptr, 0);
    throw Error(ErrorCode::PluginNotFound, "cannot run " + executable.string() + ": " + std::strerror(exec_errno));
  }

  SigpipeGuard sigpipe;
  ::fcntl(to_child.fd, F_SETFL, ::fcntl(to_child.fd, F_GETFL) | O_NONBLOCK);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::size_t written = 0;
  Bytes output;
  bool timed_out = false;
  if (input.empty()) to_child.reset();
  while (from_child.fd >= 0) {
    pollfd fds[2];
    nfds_t n = 0;
    fds[n++] = {from_child.fd, POLLIN, 0};
    if (to_child.fd >= 0) fds[n++] = {to_child.fd, POLLOUT, 0};
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    const int ready = ::poll(fds, n, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) continue;
    if (n > 1 && fds[1].revents) {
      if (fds[1].revents & POLLOUT) {
        const ssize_t k = ::write(to_child.fd, input.data() + written, input.size() - written);
        if (k > 0) written += static_cast<std::size_t>(k);
        if (written == input.size() || (k < 0 && errno != EAGAIN && errno != EINTR)) to_child.reset();
      } else {
        // The plugin closed its stdin early; it may still answer.
        to_child.reset();
      }
    }
    if (fds[0].revents) {
      std::uint8_t buf[65536];
      const ssize_t k = ::read(from_child.fd, buf, sizeof buf);
      if (k > 0) output.insert(output.end(), buf, buf + k);
      else if (k == 0 || (errno != EINTR && errno != EAGAIN)) from_child.reset();
    }
  }
  to_child.reset();
  if (timed_out) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, nullptr, 0);
    protocol_error(executable.filename().string() + " did not finish within " + std::to_string(timeout.count()) +
                   " ms and was killed");
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    protocol_error(executable.filename().string() + " exited with " +
                   (WIFEXITED(status) ? "status " + std::to_string(WEXITSTATUS(status))
                                      : "signal " + std::to_string(WTERMSIG(status))));
  }
  try {
    return decode_response(unframe(output));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PluginProtocolError) throw;
    protocol_error(executable.filename().string() + " sent an undecodable response: " + e.what());
  }
}

std::vector<std::filesystem::path> write_files(const CodeGeneratorResponse& response,
                                               const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  for (const auto& f : response.files) {
    const fs::path p(f.name);
    bool escapes = f.name.empty() || p.is_absolute() || p.has_root_name();
    for (const auto& part : p) escapes = escapes || part == "..";
    if (escapes) protocol_error("plugin file name must be a relative path without '..': " + f.name);
  }
  std::vector<fs::path> written;
  for (const auto& f : response.files) {
    const fs::path target = out_dir / fs::path(f.name).lexically_normal();
    fs::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    out.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + target.string());
    written.push_back(target);
  }
  return written;
}

}  // namespace bebop::plugin
