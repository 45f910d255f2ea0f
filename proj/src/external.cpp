#include "dnbench/external.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <thread>

#include "dnbench/error.hpp"
#include "dnbench/image_io.hpp"

namespace dnb {

namespace fs = std::filesystem;

void ExternalParams::validate() const {
  if (command.find("{in}") == std::string::npos || command.find("{out}") == std::string::npos) {
    throw Error(Errc::invalid_argument, "external command must contain {in} and {out}");
  }
  if (!(timeout_s > 0.0)) throw Error(Errc::invalid_argument, "external timeout must be > 0");
  if (max_concurrent < 1) throw Error(Errc::invalid_argument, "max_concurrent must be >= 1");
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  out += "'";
  return out;
}

std::string substitute(std::string cmd, const std::string& key, const std::string& value) {
  for (std::size_t pos = cmd.find(key); pos != std::string::npos;
       pos = cmd.find(key, pos + value.size())) {
    cmd.replace(pos, key.size(), value);
  }
  return cmd;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const fs::path& parent) {
    fs::create_directories(parent);
    std::string tmpl = (parent / "dnb-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) {
      throw Error(Errc::io_unwritable, "cannot create scratch directory under " + parent.string());
    }
    path = tmpl;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct ChildStatus {
  bool timed_out = false;
  int exit_code = 0;
  bool signaled = false;
  double elapsed_ms = 0.0;
};

ChildStatus run_shell(const std::string& cmd, const fs::path& dir, double timeout_s) {
  const std::string stdout_path = (dir / "stdout.txt").string();
  const std::string stderr_path = (dir / "stderr.txt").string();
  const auto start = std::chrono::steady_clock::now();

  const pid_t pid = ::fork();
  if (pid < 0) throw Error(Errc::backend_failed, "fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    const int out_fd = ::open(stdout_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    const int err_fd = ::open(stderr_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (out_fd >= 0) ::dup2(out_fd, STDOUT_FILENO);
    if (err_fd >= 0) ::dup2(err_fd, STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }

  ChildStatus st;
  const auto deadline = start + std::chrono::duration<double>(timeout_s);
  int status = 0;
  for (;;) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw Error(Errc::backend_failed, "waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      st.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  st.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!st.timed_out) {
    if (WIFEXITED(status)) {
      st.exit_code = WEXITSTATUS(status);
    } else {
      st.signaled = true;
      st.exit_code = -1;
    }
  }
  return st;
}

}  // namespace

ExternalResult external_denoise(const ExternalParams& params, const Image& x) {
  params.validate();
  ScratchDir scratch(params.workdir);
  const fs::path in_path = scratch.path / "in.dnb";
  const fs::path out_path = scratch.path / "out.dnb";
  save_raw_f32(x, in_path);

  std::string cmd = substitute(params.command, "{in}", shell_quote(in_path.string()));
  cmd = substitute(cmd, "{out}", shell_quote(out_path.string()));

  const ChildStatus st = run_shell(cmd, scratch.path, params.timeout_s);
  if (st.timed_out) {
    throw Error(Errc::external_timeout, "external backend exceeded " +
                                            std::to_string(params.timeout_s) + " s");
  }
  if (st.exit_code != 0) {
    throw Error(Errc::external_exit,
                "external backend exited with status " + std::to_string(st.exit_code) +
                    "; stderr: " + read_file(scratch.path / "stderr.txt"));
  }
  if (!fs::exists(out_path)) {
    throw Error(Errc::external_missing_output, "external backend produced no output file");
  }
  ExternalResult result{load_raw_f32(out_path), st.elapsed_ms};
  if (!same_shape(result.image, x)) {
    throw Error(Errc::shape_mismatch,
                "external output is " + std::to_string(result.image.width()) + "x" +
                    std::to_string(result.image.height()) + "x" +
                    std::to_string(result.image.channels()) + ", expected " +
                    std::to_string(x.width()) + "x" + std::to_string(x.height()) + "x" +
                    std::to_string(x.channels()));
  }
  return result;
}

struct ProcessLimiter::Impl {
  std::counting_semaphore<1024> slots;
  explicit Impl(int n) : slots(n) {}
};

ProcessLimiter::ProcessLimiter(int max_concurrent)
    : impl_(std::make_unique<Impl>(std::clamp(max_concurrent, 1, 1024))) {}

ProcessLimiter::~ProcessLimiter() = default;

ExternalResult ProcessLimiter::run(const ExternalParams& params, const Image& x) {
  impl_->slots.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{impl_->slots};
  return external_denoise(params, x);
}

}  // namespace dnb
