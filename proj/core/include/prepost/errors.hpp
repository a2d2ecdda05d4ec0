#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prepost {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed DSL source. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class ReservedNameError : public Error {
 public:
  using Error::Error;
};

/// Trace file that does not follow the line format or the pre/post alternation.
class TraceFormatError : public Error {
 public:
  TraceFormatError(const std::string& msg, std::size_t line)
      : Error("trace format error at line " + std::to_string(line) + ": " + msg), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A logged list value that is not a valid pre/post encoding.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// Local traces that cannot come from a single run (unmatched partners, cycles).
class InconsistentTrace : public Error {
 public:
  using Error::Error;
};

}  // namespace prepost
