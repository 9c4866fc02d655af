#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qppkit {

/// Base class for all qppkit errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Invalid configuration or parameters (bad flag values, missing required inputs).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Inputs parse but are unusable: missing pairs, empty intersections, duplicates.
class DataError : public Error {
public:
  using Error::Error;
};

/// A judge failed: transport errors, authentication, malformed endpoint replies.
class JudgeError : public Error {
public:
  using Error::Error;
};

/// A statistic is undefined on the given input (constant series, degenerate marginals).
class StatError : public Error {
public:
  using Error::Error;
};

} // namespace qppkit
