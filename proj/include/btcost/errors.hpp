#pragma once

#include <stdexcept>
#include <string>

namespace btcost {

/// Bad argument or violated precondition (non-finite input, unknown feature, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A pair was never compared, so no relative frequency exists.
class NoDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two recourses where one contains the other; no cross pairs to average over.
class NotComparableError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The unregularized likelihood has no finite maximizer for this data.
class NonIdentifiableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace btcost
