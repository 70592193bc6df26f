#pragma once

#include <stdexcept>
#include <string>

namespace sandlab {

// Bad user input: malformed graph, wrong ranges, non-recurrent operand.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A legal-move precondition was violated (illegal toppling, unstable input).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Refusal: enumeration or precision budget would be exceeded.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Something that theory says cannot happen did happen.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sandlab
