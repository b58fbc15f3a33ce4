#pragma once

#include <stdexcept>
#include <string>

namespace littlewood {

// Each error class maps onto one CLI exit code (see tools/littlewood.cpp).

/// Malformed or out-of-domain input (exit 2).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A certified decision could not be made at the maximum precision (exit 3).
class PrecisionExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A claimed inequality or divisibility failed to certify (exit 1).
class CertificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A finite search window did not contain what was asked for (exit 4).
class NotFoundInWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by interval code when a sign or comparison is not decided at the
/// current precision. Precision drivers catch it and retry with more bits.
class Undecided : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace littlewood
