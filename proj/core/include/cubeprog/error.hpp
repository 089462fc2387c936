// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace cubeprog {

/// Root of every exception thrown by the library. `kind()` names the error
/// category so callers (the CLI in particular) can map it to an exit code
/// without a chain of dynamic_casts.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  const char* kind() const noexcept { return kind_; }

 private:
  const char* kind_;
};

#define CUBEPROG_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  };

// geometry
CUBEPROG_DEFINE_ERROR(BehindCamera)
CUBEPROG_DEFINE_ERROR(DegenerateHull)
CUBEPROG_DEFINE_ERROR(InvalidScene)
// shared by scene generation, training and enumeration
CUBEPROG_DEFINE_ERROR(ConfigError)
// beliefmap
CUBEPROG_DEFINE_ERROR(OutOfFrame)
CUBEPROG_DEFINE_ERROR(ShapeError)
CUBEPROG_DEFINE_ERROR(NoDetection)
// metrics
CUBEPROG_DEFINE_ERROR(EmptyInput)
// neural
CUBEPROG_DEFINE_ERROR(NumericError)
// relationship
CUBEPROG_DEFINE_ERROR(IncompleteDetection)
CUBEPROG_DEFINE_ERROR(DiagonalError)
CUBEPROG_DEFINE_ERROR(TooFewObjects)
// program
CUBEPROG_DEFINE_ERROR(InvalidGoal)
// executor
CUBEPROG_DEFINE_ERROR(ReferenceError)
CUBEPROG_DEFINE_ERROR(ActionRejected)
// file formats
CUBEPROG_DEFINE_ERROR(FormatError)
CUBEPROG_DEFINE_ERROR(VersionMismatch)
CUBEPROG_DEFINE_ERROR(IoError)

#undef CUBEPROG_DEFINE_ERROR

}  // namespace cubeprog
