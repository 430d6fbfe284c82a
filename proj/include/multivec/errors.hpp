// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_ERRORS_HPP_
#define MULTIVEC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace multivec {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class ParameterOutOfDomain : public Error {
 public:
  using Error::Error;
};

class NonPositiveInput : public Error {
 public:
  using Error::Error;
};

/// Raised when a special function argument lies outside its supported range.
class Overflow : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class NonFiniteLikelihood : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

class DegenerateSample : public Error {
 public:
  using Error::Error;
};

class DegenerateWeights : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace multivec

#endif  // MULTIVEC_ERRORS_HPP_
