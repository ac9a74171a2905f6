#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smartlet {

/// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied a value outside its documented domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A run command failed its parity check; the robot keeps its prior program.
class RejectedProgram : public Error {
 public:
  using Error::Error;
};

/// No preamble could be located in a waveform.
class NoFrame : public Error {
 public:
  using Error::Error;
};

/// A preamble was found but the Manchester stream broke mid-frame.
class FramingError : public Error {
 public:
  FramingError(const std::string& what, std::size_t bit_index)
      : Error(what), bit_index_(bit_index) {}
  std::size_t bit_index() const noexcept { return bit_index_; }

 private:
  std::size_t bit_index_;
};

/// Text input (scenario, program, log) could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Simulation state became non-finite.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace smartlet
