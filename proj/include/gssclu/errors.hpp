#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gssclu {

// Invalid configuration or argument supplied by the caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two sketches (or statistics bundles) built with different configs were combined.
class ConfigMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A graph does not match the stream schema it is processed against.
class SchemaMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed stream input. line() is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Corrupt or incompatible binary checkpoint data.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gssclu
