#pragma once

#include <stdexcept>
#include <string>

namespace scalpel {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition (e.g. backward on a non-scalar).
class ContractError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// Too few clusters/labels for an index to be defined.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents (bad magic, checksum, truncated payload).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// The filesystem refused an open/read/write.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace scalpel
