#pragma once

#include <stdexcept>
#include <string>

namespace formalcr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Mismatched contexts, shapes, or variable sets.
class StructuralError : public Error {
public:
  using Error::Error;
};

/// An operation was called outside its domain (nonzero constant term in a
/// substitution, singular linear part, insufficient truncation, ...).
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// User data that does not describe a valid object, e.g. a series that is
/// not the defining equation of a formal real submanifold.
class InputRejected : public Error {
public:
  using Error::Error;
};

/// Two independent computations of the same fact disagreed. Always a bug.
class InternalInconsistency : public Error {
public:
  using Error::Error;
};

}  // namespace formalcr
