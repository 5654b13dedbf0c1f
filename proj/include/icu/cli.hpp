// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace icu {

/// Entry point of the `icu` tool. Subcommands: caption, predict, evaluate,
/// fewshot, sweep-shots, sweep-frames, report.
///
/// Returns 0 on success. Failures print one line to `err`,
///   icu: error=<Code> exit=<n> message=<text>
/// and return 2 (usage), 3 (data) or 4 (backend).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace icu
