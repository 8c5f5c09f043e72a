#include "coedit/channel.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "coedit/error.hpp"

namespace coedit {

namespace {

void write_all(int fd, const char* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("write failed: ") + std::strerror(errno));
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

void ignore_sigpipe() {
  static const bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

}  // namespace

bool FdReader::fill() {
  if (pos_ > 0) {
    buffer_.erase(0, pos_);
    pos_ = 0;
  }
  char chunk[65536];
  for (;;) {
    const ssize_t n = ::read(fd_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    buffer_.append(chunk, static_cast<std::size_t>(n));
    return true;
  }
}

bool FdReader::read_line(std::string& line) {
  for (;;) {
    const auto nl = buffer_.find('\n', pos_);
    if (nl != std::string::npos) {
      line.assign(buffer_, pos_, nl - pos_);
      pos_ = nl + 1;
      return true;
    }
    if (!fill()) {
      if (pos_ < buffer_.size()) {
        line.assign(buffer_, pos_);
        pos_ = buffer_.size();
        return true;
      }
      return false;
    }
  }
}

bool FdReader::read_exact(std::size_t size, std::string& out) {
  while (buffer_.size() - pos_ < size) {
    if (!fill()) return false;
  }
  out.assign(buffer_, pos_, size);
  pos_ += size;
  return true;
}

std::string FdReader::read_all() {
  while (fill()) {
  }
  std::string out = buffer_.substr(pos_);
  buffer_.clear();
  pos_ = 0;
  return out;
}

Subprocess::Subprocess(const std::vector<std::string>& argv, const std::string& working_dir, bool quiet_stderr) {
  if (argv.empty()) throw Error("empty command");
  ignore_sigpipe();
  int in[2];
  int out[2];
  if (::pipe2(in, O_CLOEXEC) != 0 || ::pipe2(out, O_CLOEXEC) != 0) {
    throw Error(std::string("pipe failed: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_ = ::fork();
  if (pid_ < 0) throw Error(std::string("fork failed: ") + std::strerror(errno));
  if (pid_ == 0) {
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    if (quiet_stderr) {
      const int null_fd = ::open("/dev/null", O_WRONLY);
      if (null_fd >= 0) ::dup2(null_fd, STDERR_FILENO);
    }
    if (!working_dir.empty() && ::chdir(working_dir.c_str()) != 0) ::_exit(127);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in[0]);
  ::close(out[1]);
  stdin_fd_ = in[1];
  stdout_fd_ = out[0];
  reader_ = FdReader(stdout_fd_);
}

Subprocess::~Subprocess() {
  close_write();
  if (!waited_) {
    kill();
    wait();
  }
  if (stdout_fd_ >= 0) ::close(stdout_fd_);
}

void Subprocess::write(const std::string& data) {
  if (stdin_fd_ < 0) throw Error("write to closed process input");
  write_all(stdin_fd_, data.data(), data.size());
}

void Subprocess::write_line(const std::string& line) { write(line + "\n"); }

bool Subprocess::read_line(std::string& line) { return reader_.read_line(line); }

bool Subprocess::read_exact(std::size_t size, std::string& out) { return reader_.read_exact(size, out); }

void Subprocess::close_write() {
  if (stdin_fd_ >= 0) {
    ::close(stdin_fd_);
    stdin_fd_ = -1;
  }
}

int Subprocess::wait() {
  if (waited_) return status_;
  int raw = 0;
  while (::waitpid(pid_, &raw, 0) < 0) {
    if (errno != EINTR) break;
  }
  waited_ = true;
  status_ = WIFEXITED(raw) ? WEXITSTATUS(raw) : 128 + (WIFSIGNALED(raw) ? WTERMSIG(raw) : 0);
  return status_;
}

void Subprocess::kill() {
  if (!waited_ && pid_ > 0) ::kill(pid_, SIGKILL);
}

TcpChannel::TcpChannel(const std::string& address) {
  ignore_sigpipe();
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) throw Error("expected host:port, got '" + address + "'");
  const std::string host = address.substr(0, colon);
  const std::string port = address.substr(colon + 1);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* results = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &results); rc != 0) {
    throw Error("cannot resolve " + address + ": " + ::gai_strerror(rc));
  }
  for (addrinfo* ai = results; ai != nullptr; ai = ai->ai_next) {
    fd_ = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(results);
  if (fd_ < 0) throw Error("cannot connect to " + address);
  reader_ = FdReader(fd_);
}

TcpChannel::~TcpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpChannel::write_line(const std::string& line) {
  const std::string data = line + "\n";
  write_all(fd_, data.data(), data.size());
}

bool TcpChannel::read_line(std::string& line) { return reader_.read_line(line); }

bool TcpChannel::read_exact(std::size_t size, std::string& out) { return reader_.read_exact(size, out); }

void TcpChannel::close_write() { ::shutdown(fd_, SHUT_WR); }

void TcpChannel::shutdown() { ::shutdown(fd_, SHUT_RDWR); }

CommandResult run_command(const std::vector<std::string>& argv, const std::string& working_dir) {
  Subprocess process(argv, working_dir, true);
  process.close_write();
  CommandResult result;
  result.output = process.read_all();
  result.status = process.wait();
  return result;
}

}  // namespace coedit
