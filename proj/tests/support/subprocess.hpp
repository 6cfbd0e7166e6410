#pragma once

// Runs the procplan binary as a child process.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

extern char** environ;

namespace procplan::testing {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

class Child {
 public:
  explicit Child(const std::vector<std::string>& args) {
    if (pipe(out_) != 0 || pipe(err_) != 0) throw std::runtime_error("pipe failed");
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, out_[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err_[1], STDERR_FILENO);
    posix_spawn_file_actions_addclose(&actions, out_[0]);
    posix_spawn_file_actions_addclose(&actions, err_[0]);
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    int rc = posix_spawn(&pid_, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(out_[1]);
    close(err_[1]);
    if (rc != 0) throw std::runtime_error("cannot start " + args[0]);
  }

  ~Child() {
    if (pid_ > 0) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
    close(out_[0]);
    close(err_[0]);
  }

  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;

  // One line of standard output, without the newline; nullopt at EOF.
  std::optional<std::string> read_line() {
    std::string line;
    char c;
    while (true) {
      ssize_t n = read(out_[0], &c, 1);
      if (n <= 0) return line.empty() ? std::nullopt : std::optional(line);
      if (c == '\n') return line;
      line.push_back(c);
    }
  }

  void signal(int sig) { kill(pid_, sig); }

  ProcessResult wait() {
    ProcessResult result;
    result.out = drain(out_[0]);
    result.err = drain(err_[0]);
    int status = 0;
    waitpid(pid_, &status, 0);
    pid_ = -1;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return result;
  }

 private:
  static std::string drain(int fd) {
    std::string out;
    char buf[4096];
    ssize_t n;
    while ((n = read(fd, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
    return out;
  }

  pid_t pid_ = -1;
  int out_[2] = {-1, -1};
  int err_[2] = {-1, -1};
};

inline ProcessResult run_process(const std::vector<std::string>& args) {
  return Child(args).wait();
}

// A `procplan serve` child on an ephemeral port.
class ServeProcess {
 public:
  ServeProcess(const std::string& binary, const std::string& data_dir,
               const std::vector<std::string>& users)
      : child_(args(binary, data_dir, users)) {
    auto line = child_.read_line();
    const std::string prefix = "listening on ";
    if (!line || line->rfind(prefix, 0) != 0) {
      throw std::runtime_error("server did not start: " + child_.wait().err);
    }
    port_ = std::stoi(line->substr(line->rfind(':') + 1));
  }

  int port() const { return port_; }

  // Interrupts the server and returns its exit status.
  ProcessResult stop() {
    child_.signal(SIGINT);
    return child_.wait();
  }

 private:
  static std::vector<std::string> args(const std::string& binary, const std::string& data_dir,
                                       const std::vector<std::string>& users) {
    std::vector<std::string> out{binary, "serve", "--addr", "127.0.0.1:0", "--data-dir", data_dir};
    for (const auto& u : users) {
      out.push_back("--user");
      out.push_back(u);
    }
    return out;
  }

  Child child_;
  int port_ = 0;
};

}  // namespace procplan::testing
