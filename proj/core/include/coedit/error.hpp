#pragma once

#include <stdexcept>
#include <string>

namespace coedit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RegionOutOfBounds : public Error {
 public:
  using Error::Error;
};

/// A deletion was requested on a line whose status is already `<add>`.
class InvalidDelete : public Error {
 public:
  using Error::Error;
};

class MalformedOutput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class NotEligible : public Error {
 public:
  using Error::Error;
};

class QueryOverflow : public Error {
 public:
  using Error::Error;
};

class OracleFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset files, git failures and similar input problems.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace coedit
