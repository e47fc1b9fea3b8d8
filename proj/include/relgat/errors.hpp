// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace relgat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A softmax or attention normalizer had no admissible entry.
class EmptySupportError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (embedding width, missing parameters, head count).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed user-supplied data.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace relgat
