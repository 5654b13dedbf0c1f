// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <string_view>

#include "icu/types.hpp"

namespace icu {

/// Caption-pair composition template. `pattern` uses {left} and {right} as placeholders.
struct FrameTemplate {
    FrameId id;
    std::string_view pattern;
};

/// The six fixed frames, indexed by frame id.
const std::array<FrameTemplate, FrameId::kCount>& frame_templates();

/// Strips surrounding whitespace and any trailing run of '.'.
/// Throws EmptyAfterNormalization if nothing remains.
std::string normalize_caption(std::string_view text);

/// Substitutes the captions into the frame's pattern, verbatim and in one pass
/// (placeholder text inside a caption is not expanded).
std::string render(FrameId frame, std::string_view left, std::string_view right);

} // namespace icu
