#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rif {

/// Base for every error raised by the library. `is_input_error()` separates
/// bad user input (CLI exit code 2) from internal failures (exit code 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual bool is_input_error() const { return true; }
};

class EmptyCloud : public Error {
 public:
  EmptyCloud() : Error("EmptyCloud: point cloud has no points") {}
};

class DegenerateCloud : public Error {
 public:
  explicit DegenerateCloud(const std::string& what)
      : Error("DegenerateCloud: " + what) {}
};

class NumericallyDegenerate : public Error {
 public:
  explicit NumericallyDegenerate(const std::string& what)
      : Error("NumericallyDegenerate: " + what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("ShapeError: " + what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("ParseError (line " + std::to_string(line) + "): " + what),
        line_(line) {}
  explicit ParseError(const std::string& what) : Error("ParseError: " + what) {}

  /// 1-based line number, 0 when the error is not tied to a text line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

class UnsupportedFormat : public ParseError {
 public:
  explicit UnsupportedFormat(const std::string& what)
      : ParseError("unsupported format: " + what) {}
};

class TruncatedData : public ParseError {
 public:
  explicit TruncatedData(const std::string& what)
      : ParseError("truncated data: " + what) {}
};

class BadMagic : public ParseError {
 public:
  explicit BadMagic(const std::string& what) : ParseError("bad magic: " + what) {}
};

class UndefinedMetric : public Error {
 public:
  explicit UndefinedMetric(const std::string& what)
      : Error("UndefinedMetric: " + what) {}
};

class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& what)
      : Error("InvalidConfig: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError: " + what) {}
};

}  // namespace rif
