#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace femdd {

/// Base of every exception thrown by the library. The code maps one-to-one
/// onto the status values of the C API.
class Error : public std::runtime_error {
 public:
  enum class Code {
    invalid_argument = 1,
    parse = 2,
    config = 3,
    io = 4,
    solver = 5,
    stall = 6,
    range = 7,
    mesh = 8,
  };

  Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(Code::invalid_argument, what) {}
};

class MeshError : public Error {
 public:
  explicit MeshError(const std::string& what) : Error(Code::mesh, what) {}
};

/// Exponent or argument outside the representable window. `node` is the
/// offending vertex or element when known, -1 otherwise.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, long node = -1) : Error(Code::range, what), node_(node) {}
  long node() const noexcept { return node_; }

 private:
  long node_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Code::io, what) {}
};

/// Configuration text could not be read. Line and column are 1-based, 0 if
/// unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(Code::parse, format(what, line, column)), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
  }
  int line_;
  int column_;
};

/// Configuration parsed but is semantically wrong. `path` names the field,
/// e.g. "bias.sweep.contact".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(Code::config, path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(Code::solver, what) {}
};

/// Gummel map failed to reach the tolerance. Carries the per-iteration
/// increment history so callers can decide on a smaller bias step.
class NonConvergence : public SolverError {
 public:
  NonConvergence(const std::string& what, std::vector<double> history)
      : SolverError(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace femdd
