#ifndef NOSE_ERRORS_HPP
#define NOSE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nose {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Data does not have the layout a scenario requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class InsufficientDrawsError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class McmcError : public Error {
 public:
  McmcError(std::string move, long iteration, const std::string& detail)
      : Error("MCMC aborted in " + move + " at iteration " + std::to_string(iteration) + ": " +
              detail),
        move_(std::move(move)),
        iteration_(iteration) {}

  const std::string& move() const noexcept { return move_; }
  long iteration() const noexcept { return iteration_; }

 private:
  std::string move_;
  long iteration_;
};

// Malformed input file; line is 1-based, 0 when the whole file is unusable.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail)
      : Error(line == 0 ? detail : "line " + std::to_string(line) + ": " + detail), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace nose

#endif  // NOSE_ERRORS_HPP
