#pragma once

#include <stdexcept>
#include <string>

namespace entropy_embed {

// Base class for every error raised by the library. Each subclass maps to
// one failure mode of the public operations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConstantChannel : public Error {
 public:
  using Error::Error;
};

class SeriesTooShort : public Error {
 public:
  using Error::Error;
};

class MalformedCsv : public Error {
 public:
  using Error::Error;
};

class NotEnoughNeighbors : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularCovariance : public Error {
 public:
  using Error::Error;
};

class DegenerateResidual : public Error {
 public:
  using Error::Error;
};

class EmptyPool : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class Diverged : public Error {
 public:
  using Error::Error;
};

}  // namespace entropy_embed
