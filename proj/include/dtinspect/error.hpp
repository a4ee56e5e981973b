#pragma once

#include <stdexcept>
#include <string>

namespace dtinspect {

/// Malformed input: bad files, schema violations, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failures (unreadable/unwritable paths, codec errors).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine could not produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dtinspect
