#pragma once

#include <stdexcept>
#include <string>

namespace gsure {

// Precondition violation or malformed input; the caller can fix it.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not produce a result.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gsure
