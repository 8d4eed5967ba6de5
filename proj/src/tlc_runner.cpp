#include "cobalt/tlc_runner.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/select.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <vector>

#include "cobalt/errors.hpp"

namespace fs = std::filesystem;

namespace cobalt {

const char* to_string(VerdictClass c) {
  switch (c) {
    case VerdictClass::kSafe: return "SAFE";
    case VerdictClass::kViolation: return "VIOLATION";
    case VerdictClass::kCompileError: return "COMPILE_ERROR";
    case VerdictClass::kTimeout: return "TIMEOUT";
  }
  return "?";
}

std::string default_tlc_invocation(const std::string& jar_override) {
  std::string jar = jar_override;
  if (jar.empty()) {
    if (const char* env = std::getenv("COBALT_TLC_JAR")) jar = env;
  }
  if (jar.empty()) return "";
  return "java -XX:+UseParallelGC -cp " + jar +
         " tlc2.TLC -workers 1 -config {cfg} {module}";
}

RunnerConfig::RunnerConfig()
    : tlc_invocation(default_tlc_invocation()),
      workspace_root(fs::temp_directory_path() / "cobalt-runs") {}

std::filesystem::path prepare_workspace(const SpecArtifact& artifact,
                                        const RunnerConfig& config) {
  static std::atomic<uint64_t> counter{0};
  std::error_code ec;
  fs::create_directories(config.workspace_root, ec);
  if (ec) throw IoError("cannot create workspace root: " + ec.message());

  fs::path dir;
  for (;;) {
    uint64_t n = counter.fetch_add(1);
    dir = config.workspace_root /
          ("run-" + std::to_string(::getpid()) + "-" + std::to_string(n) +
           "-it" + std::to_string(artifact.iteration));
    if (fs::create_directory(dir, ec)) break;
    if (ec) throw IoError("cannot create workspace: " + ec.message());
  }

  auto write = [&](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw IoError("cannot write " + p.string());
  };
  write(dir / (artifact.module_name + ".tla"), artifact.module_text);
  write(dir / (artifact.module_name + ".cfg"), artifact.config_text);
  return dir;
}

namespace {

std::string substitute(std::string tmpl, const std::string& key,
                       const std::string& value) {
  std::string needle = "{" + key + "}";
  for (size_t pos = 0; (pos = tmpl.find(needle, pos)) != std::string::npos;) {
    tmpl.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return tmpl;
}

// Whitespace split with single/double quote support.
std::vector<std::string> split_command(const std::string& cmd) {
  std::vector<std::string> argv;
  std::string cur;
  bool in_word = false;
  char quote = 0;
  for (char c : cmd) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        cur += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_word = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_word) {
        argv.push_back(cur);
        cur.clear();
        in_word = false;
      }
    } else {
      cur += c;
      in_word = true;
    }
  }
  if (in_word) argv.push_back(cur);
  return argv;
}

void drain(int fd, std::string& sink) {
  char buf[4096];
  for (;;) {
    ssize_t n = ::read(fd, buf, sizeof buf);
    if (n <= 0) break;
    sink.append(buf, static_cast<size_t>(n));
  }
}

}  // namespace

RawTlcOutput SubprocessTlcExecutor::run(const std::filesystem::path& workspace,
                                        const SpecArtifact& artifact,
                                        const RunnerConfig& config) {
  if (config.tlc_invocation.empty())
    throw SpawnError(
        "no TLC invocation configured (set COBALT_TLC_JAR or --tlc-path)");

  // TLC wants options before the spec file, so the -deadlock flag (which
  // disables its deadlock check) rides in front of the {module} slot.
  std::string module_arg = artifact.module_name + ".tla";
  if (!config.check_deadlock) module_arg = "-deadlock " + module_arg;
  std::string cmd = config.tlc_invocation;
  cmd = substitute(cmd, "module", module_arg);
  cmd = substitute(cmd, "cfg", artifact.module_name + ".cfg");
  cmd = substitute(cmd, "workspace", workspace.string());

  auto argv_strings = split_command(cmd);
  if (argv_strings.empty()) throw SpawnError("empty TLC invocation");
  std::vector<char*> argv;
  argv.reserve(argv_strings.size() + 1);
  for (auto& s : argv_strings) argv.push_back(s.data());
  argv.push_back(nullptr);

  int out_pipe[2], err_pipe[2], exec_pipe[2];
  if (::pipe(out_pipe) || ::pipe(err_pipe) || ::pipe(exec_pipe))
    throw IoError("pipe() failed");
  ::fcntl(exec_pipe[1], F_SETFD, FD_CLOEXEC);

  auto start = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw SpawnError("fork() failed");

  if (pid == 0) {
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[0]);
    ::close(err_pipe[1]);
    ::close(exec_pipe[0]);
    if (::chdir(workspace.c_str()) != 0) _exit(127);
    ::execvp(argv[0], argv.data());
    int err = errno;
    ssize_t ignored = ::write(exec_pipe[1], &err, sizeof err);
    (void)ignored;
    _exit(127);
  }

  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  ::close(exec_pipe[1]);

  RawTlcOutput raw;
  int out_fd = out_pipe[0], err_fd = err_pipe[0];
  bool out_open = true, err_open = true;
  auto deadline = start + std::chrono::duration<double>(config.timeout_s);

  while (out_open || err_open) {
    fd_set fds;
    FD_ZERO(&fds);
    int maxfd = -1;
    if (out_open) { FD_SET(out_fd, &fds); maxfd = std::max(maxfd, out_fd); }
    if (err_open) { FD_SET(err_fd, &fds); maxfd = std::max(maxfd, err_fd); }

    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      ::kill(pid, SIGKILL);
      raw.timed_out = true;
      break;
    }
    auto remain =
        std::chrono::duration<double>(deadline - now).count();
    struct timeval tv;
    tv.tv_sec = static_cast<time_t>(remain);
    tv.tv_usec = static_cast<suseconds_t>((remain - tv.tv_sec) * 1e6);

    int rc = ::select(maxfd + 1, &fds, nullptr, nullptr, &tv);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (rc == 0) continue;  // timeout handled at loop top

    char buf[4096];
    if (out_open && FD_ISSET(out_fd, &fds)) {
      ssize_t n = ::read(out_fd, buf, sizeof buf);
      if (n > 0)
        raw.stdout_text.append(buf, static_cast<size_t>(n));
      else
        out_open = false;
    }
    if (err_open && FD_ISSET(err_fd, &fds)) {
      ssize_t n = ::read(err_fd, buf, sizeof buf);
      if (n > 0)
        raw.stderr_text.append(buf, static_cast<size_t>(n));
      else
        err_open = false;
    }
  }

  if (raw.timed_out) {
    drain(out_fd, raw.stdout_text);
    drain(err_fd, raw.stderr_text);
  }
  ::close(out_fd);
  ::close(err_fd);

  int status = 0;
  ::waitpid(pid, &status, 0);
  raw.duration_s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();

  int exec_errno = 0;
  if (::read(exec_pipe[0], &exec_errno, sizeof exec_errno) ==
      sizeof exec_errno) {
    ::close(exec_pipe[0]);
    throw SpawnError("cannot execute '" + argv_strings[0] +
                     "': " + std::strerror(exec_errno));
  }
  ::close(exec_pipe[0]);

  if (!raw.timed_out) {
    if (WIFEXITED(status))
      raw.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
      raw.exit_code = 128 + WTERMSIG(status);
  }
  return raw;
}

RawTlcOutput run_tlc(const std::filesystem::path& workspace,
                     const SpecArtifact& artifact,
                     const RunnerConfig& config) {
  SubprocessTlcExecutor exec;
  return exec.run(workspace, artifact, config);
}

VerdictClass classify_exit(const RawTlcOutput& raw,
                           const RunnerConfig& config) {
  if (raw.timed_out) return VerdictClass::kTimeout;
  if (raw.exit_code) {
    auto it = config.exit_map.find(*raw.exit_code);
    if (it != config.exit_map.end()) return it->second;
  }
  return VerdictClass::kCompileError;
}

VerdictClass classify_exit(const RawTlcOutput& raw) {
  return classify_exit(raw, RunnerConfig{});
}

}  // namespace cobalt
