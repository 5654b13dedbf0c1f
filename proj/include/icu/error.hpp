// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icu {

enum class ErrorCode {
    // usage
    UsageError,
    InvalidFrame,
    InvalidLanguage,
    InvalidConfig,
    // data
    ParseError,
    LabelDomainError,
    LanguageMismatch,
    MissingImage,
    CountMismatch,
    NotEnoughShots,
    LengthMismatch,
    IdMismatch,
    EmptyMap,
    EmptySweep,
    EmptyAfterNormalization,
    CacheConflict,
    IoFailure,
    PreconditionViolation,
    // backend
    EmptyInput,
    ImageUnreadable,
    BackendFailure,
    NotTunable,
    TrainingFailure,
    UnknownBackend,
};

enum class ErrorCategory { Usage, Data, Backend };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

/// Process exit code for a failure of the given category (2 usage, 3 data, 4 backend).
int exit_code_for(ErrorCategory category);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace icu
