// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <string>

#include "run_config.hpp"

namespace cubeprog::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitGeneric = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitGoalNotReached = 4;
inline constexpr int kExitVersion = 5;

/// Each command writes `<out>/<name>.json` and a short human summary to `log`.
using Command = std::function<int(const RunConfig&, std::ostream& log)>;

/// Subcommand name -> implementation, in help order.
const std::map<std::string, Command>& commands();
const std::map<std::string, std::string>& commandHelp();

}  // namespace cubeprog::cli
