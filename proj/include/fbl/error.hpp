#pragma once

#include <stdexcept>
#include <string>

namespace fbl {

// Bad arguments, malformed files, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A search ran out of budget before reaching its target.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stored witness failed independent re-verification. Always a bug.
class CertificationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fbl
