// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/error.hpp"

namespace icu {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::InvalidFrame: return "InvalidFrame";
    case ErrorCode::InvalidLanguage: return "InvalidLanguage";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LabelDomainError: return "LabelDomainError";
    case ErrorCode::LanguageMismatch: return "LanguageMismatch";
    case ErrorCode::MissingImage: return "MissingImage";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::NotEnoughShots: return "NotEnoughShots";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::EmptyMap: return "EmptyMap";
    case ErrorCode::EmptySweep: return "EmptySweep";
    case ErrorCode::EmptyAfterNormalization: return "EmptyAfterNormalization";
    case ErrorCode::CacheConflict: return "CacheConflict";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ImageUnreadable: return "ImageUnreadable";
    case ErrorCode::BackendFailure: return "BackendFailure";
    case ErrorCode::NotTunable: return "NotTunable";
    case ErrorCode::TrainingFailure: return "TrainingFailure";
    case ErrorCode::UnknownBackend: return "UnknownBackend";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
    switch (code) {
    case ErrorCode::UsageError:
    case ErrorCode::InvalidFrame:
    case ErrorCode::InvalidLanguage:
    case ErrorCode::InvalidConfig:
        return ErrorCategory::Usage;
    case ErrorCode::EmptyInput:
    case ErrorCode::ImageUnreadable:
    case ErrorCode::BackendFailure:
    case ErrorCode::NotTunable:
    case ErrorCode::TrainingFailure:
    case ErrorCode::UnknownBackend:
        return ErrorCategory::Backend;
    default:
        return ErrorCategory::Data;
    }
}

int exit_code_for(ErrorCategory category) {
    switch (category) {
    case ErrorCategory::Usage: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Backend: return 4;
    }
    return 1;
}

} // namespace icu
