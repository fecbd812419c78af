#pragma once

#include <stdexcept>
#include <string>

namespace rmnl {

// Bad caller-supplied arguments (invalid item index, delta <= 0, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A policy produced an assortment that breaks the protocol (|S| > K, bad item).
class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal invariant broken; indicates a bug, not bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rmnl
