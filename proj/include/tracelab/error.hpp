// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <stdexcept>
#include <string>

namespace tracelab {

enum class ErrorCode {
  invalid_argument = 1,
  load,
  validation,
  not_found,
  io,
  version_mismatch,
  incompatible,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception thrown by every module of the library. The code survives the
/// C boundary as a status value; the message is shown to the user verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tracelab
