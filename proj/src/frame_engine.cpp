// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/frame_engine.hpp"

#include "icu/backends.hpp"

namespace icu {

namespace {

constexpr std::string_view kLeft = "{left}";
constexpr std::string_view kRight = "{right}";

} // namespace

const std::array<FrameTemplate, FrameId::kCount>& frame_templates() {
    static const std::array<FrameTemplate, FrameId::kCount> kTemplates{{
        {FrameId(0), "{left} {right}"},
        {FrameId(1), "<{left}> <{right}>"},
        {FrameId(2), "Left: {left}. Right: {right}."},
        {FrameId(3), "Left: <{left}>. Right: <{right}>."},
        {FrameId(4), "There are {left} in the left image and {right} in the right image."},
        {FrameId(5), "The left image shows {left} while the right image shows {right}."},
    }};
    return kTemplates;
}

std::string normalize_caption(std::string_view text) {
    std::string_view t = trim(text);
    while (!t.empty() && t.back() == '.') {
        t.remove_suffix(1);
    }
    t = trim(t);
    if (t.empty()) {
        fail(ErrorCode::EmptyAfterNormalization, "caption '" + std::string(text) + "' is empty after normalization");
    }
    return std::string(t);
}

std::string render(FrameId frame, std::string_view left, std::string_view right) {
    if (trim(left).empty() || trim(right).empty()) {
        fail(ErrorCode::PreconditionViolation, "render needs two non-empty captions");
    }
    const std::string_view pattern = frame_templates()[static_cast<std::size_t>(frame.value())].pattern;
    const auto l = pattern.find(kLeft);
    const auto r = pattern.find(kRight);

    std::string out;
    out.reserve(pattern.size() + left.size() + right.size());
    out.append(pattern.substr(0, l));
    out.append(left);
    out.append(pattern.substr(l + kLeft.size(), r - l - kLeft.size()));
    out.append(right);
    out.append(pattern.substr(r + kRight.size()));
    return out;
}

} // namespace icu
