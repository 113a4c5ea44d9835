#include "eotbench/drift_protocol.hpp"

#include "eotbench/pair_io.hpp"

#include <cerrno>
#include <charconv>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <istream>
#include <ostream>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace eotbench {

namespace {

// Parses whitespace-separated reals; returns false on any junk.
bool parse_reals(std::string_view line, std::vector<double>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    double v = 0.0;
    const auto res = std::from_chars(line.data() + i, line.data() + j, v);
    if (res.ec != std::errc() || res.ptr != line.data() + j) return false;
    out.push_back(v);
    i = j;
  }
  return true;
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

DriftSubprocess::DriftSubprocess(const std::vector<std::string>& argv, Index dim, std::size_t chunk_lines)
    : dim_(dim), chunk_lines_(std::max<std::size_t>(1, chunk_lines)) {
  require(!argv.empty(), ErrorCode::kInvalidArgument, "drift command is empty");
  require(dim >= 1, ErrorCode::kInvalidArgument, "drift dimension must be positive");
  // A child that dies mid-exchange must surface as an error, not a signal.
  std::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  require(::pipe2(in_pipe, O_CLOEXEC) == 0, ErrorCode::kIo, "pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorCode::kIo, "pipe failed");
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw Error(ErrorCode::kIo, "cannot start drift command '" + argv[0] + "': " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

DriftSubprocess::~DriftSubprocess() {
  try {
    finish();
  } catch (...) {
  }
}

int DriftSubprocess::finish() {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ < 0) return 0;
  int status = 0;
  while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
  }
  pid_ = -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

void DriftSubprocess::exchange(const std::string& requests, std::size_t lines, double* out) {
  require(pid_ >= 0, ErrorCode::kProtocol, "drift child has already exited");
  std::size_t written = 0;
  std::size_t received = 0;
  std::vector<double> values;
  char buf[65536];
  // Interleave writing and reading: the child may answer before it has read
  // every request, and neither side may block on a full pipe.
  while (received < lines) {
    pollfd fds[2];
    nfds_t count = 0;
    fds[count++] = {from_child_, POLLIN, 0};
    const bool writing = written < requests.size();
    if (writing) fds[count++] = {to_child_, POLLOUT, 0};
    if (::poll(fds, count, -1) < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, std::string("poll failed: ") + std::strerror(errno));
    }
    if (writing && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const std::size_t n = std::min<std::size_t>(requests.size() - written, 65536);
      const ssize_t w = ::write(to_child_, requests.data() + written, n);
      if (w < 0 && errno != EINTR && errno != EAGAIN) {
        throw Error(ErrorCode::kProtocol, "drift child closed its input after " +
                                              std::to_string(lines_sent_ + received) + " responses");
      }
      if (w > 0) written += static_cast<std::size_t>(w);
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t r = ::read(from_child_, buf, sizeof(buf));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kIo, std::string("read failed: ") + std::strerror(errno));
      }
      if (r == 0) {
        throw Error(ErrorCode::kProtocol, "drift child exited after " +
                                              std::to_string(lines_sent_ + received) + " of " +
                                              std::to_string(lines_sent_ + lines) + " responses");
      }
      pending_.append(buf, static_cast<std::size_t>(r));
      std::size_t start = 0;
      for (auto nl = pending_.find('\n'); nl != std::string::npos; nl = pending_.find('\n', start)) {
        const std::string_view line(pending_.data() + start, nl - start);
        start = nl + 1;
        const std::size_t line_no = lines_sent_ + received + 1;
        if (received >= lines) {
          throw Error(ErrorCode::kProtocol, "drift child sent an unsolicited line " + std::to_string(line_no));
        }
        if (!parse_reals(line, values)) {
          throw Error(ErrorCode::kProtocol,
                      "malformed drift response on line " + std::to_string(line_no) + ": '" +
                          std::string(line.substr(0, 80)) + "'");
        }
        if (static_cast<Index>(values.size()) != dim_) {
          throw Error(ErrorCode::kProtocol, "drift response on line " + std::to_string(line_no) +
                                                " has " + std::to_string(values.size()) +
                                                " values, expected " + std::to_string(dim_));
        }
        std::copy(values.begin(), values.end(), out + received * static_cast<std::size_t>(dim_));
        ++received;
      }
      pending_.erase(0, start);
    }
  }
  lines_sent_ += lines;
}

SampleMatrix DriftSubprocess::evaluate(const SampleMatrix& states, double t) {
  require_dim(states.cols(), dim_, "drift request");
  SampleMatrix out(states.rows(), dim_);
  const std::string t_text = format_real(t);
  const auto rows = static_cast<std::size_t>(states.rows());
  for (std::size_t begin = 0; begin < rows; begin += chunk_lines_) {
    const std::size_t end = std::min(rows, begin + chunk_lines_);
    std::string requests;
    for (std::size_t i = begin; i < end; ++i) {
      for (Index j = 0; j < dim_; ++j) {
        requests += format_real(states(static_cast<Index>(i), j));
        requests += ' ';
      }
      requests += t_text;
      requests += '\n';
    }
    exchange(requests, end - begin, out.data() + begin * static_cast<std::size_t>(dim_));
  }
  return out;
}

BatchDrift subprocess_batch_drift(std::shared_ptr<DriftSubprocess> child) {
  return [child](const SampleMatrix& states, double t) { return child->evaluate(states, t); };
}

void serve_drift(const DriftField& field, std::istream& in, std::ostream& out) {
  const Index dim = field.dim();
  std::string line;
  std::vector<double> values;
  std::size_t line_no = 0;
  Point x(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!parse_reals(line, values) || static_cast<Index>(values.size()) != dim + 1) {
      throw Error(ErrorCode::kProtocol, "request line " + std::to_string(line_no) + " must hold " +
                                            std::to_string(dim + 1) + " numbers");
    }
    for (Index j = 0; j < dim; ++j) x[j] = values[static_cast<std::size_t>(j)];
    const Point v = field(x, values.back());
    for (Index j = 0; j < dim; ++j) {
      if (j) out << ' ';
      out << format_real(v[j]);
    }
    out << '\n';
    if (in.rdbuf()->in_avail() <= 0) out.flush();
  }
  out.flush();
}

}  // namespace eotbench
