#pragma once

#include <memory>
#include <string>
#include <vector>

namespace coedit {

/// A bidirectional, newline-delimited text stream.
class LineChannel {
 public:
  virtual ~LineChannel() = default;

  /// Writes `line` followed by '\n'. Throws Error when the peer is gone.
  virtual void write_line(const std::string& line) = 0;

  /// Reads one line without its terminator; false at end of stream.
  virtual bool read_line(std::string& line) = 0;

  /// Reads exactly `size` bytes; false at end of stream.
  virtual bool read_exact(std::size_t size, std::string& out) = 0;

  /// Closes the writing side so the peer sees end of input.
  virtual void close_write() = 0;
};

/// Buffered reader over a file descriptor.
class FdReader {
 public:
  explicit FdReader(int fd = -1) : fd_(fd) {}
  bool read_line(std::string& line);
  bool read_exact(std::size_t size, std::string& out);
  std::string read_all();

 private:
  bool fill();

  int fd_;
  std::string buffer_;
  std::size_t pos_ = 0;
};

/// A child process with piped standard input and output. Standard error is
/// inherited unless `quiet_stderr` is set.
class Subprocess : public LineChannel {
 public:
  explicit Subprocess(const std::vector<std::string>& argv, const std::string& working_dir = {},
                      bool quiet_stderr = false);
  ~Subprocess() override;

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  void write_line(const std::string& line) override;
  void write(const std::string& data);
  bool read_line(std::string& line) override;
  bool read_exact(std::size_t size, std::string& out) override;
  void close_write() override;

  std::string read_all() { return reader_.read_all(); }

  /// Waits for exit and returns the exit status (128 + signal when killed).
  int wait();
  void kill();

 private:
  int pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  FdReader reader_;
  bool waited_ = false;
  int status_ = 0;
};

/// Line channel over a TCP connection to "host:port".
class TcpChannel : public LineChannel {
 public:
  explicit TcpChannel(const std::string& address);
  ~TcpChannel() override;

  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

  void write_line(const std::string& line) override;
  bool read_line(std::string& line) override;
  bool read_exact(std::size_t size, std::string& out) override;
  void close_write() override;

  /// Shuts the connection down in both directions, unblocking readers.
  void shutdown();

 private:
  int fd_ = -1;
  FdReader reader_;
};

struct CommandResult {
  int status = 0;
  std::string output;
};

/// Runs a command to completion and captures its standard output.
CommandResult run_command(const std::vector<std::string>& argv, const std::string& working_dir = {});

}  // namespace coedit
