#pragma once

#include <stdexcept>
#include <string>

namespace mqm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain (non-reduced fraction, empty CF, x > 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A configured budget (bits, level size, precision ceiling) would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Persisted state (digit cache, scan checkpoint) failed validation on load.
class CacheError : public Error {
 public:
  using Error::Error;
};

/// No partial quotient in [1, cap] satisfies the candidate system.
class CandidateError : public Error {
 public:
  using Error::Error;
};

/// A selected digit interval does not carry the expected sign change of ?(x) - x.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace mqm
