// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Trace output on stderr; the level comes from the OMQ_LOG variable
// (trace, debug, info, warn, error, off). Default: warn.
#pragma once

#include <spdlog/spdlog.h>

#include <utility>

namespace omq::log {

void init();

template <typename... Args>
void debug(fmt::format_string<Args...> f, Args&&... args) {
    spdlog::debug(f, std::forward<Args>(args)...);
}
template <typename... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
    spdlog::info(f, std::forward<Args>(args)...);
}
template <typename... Args>
void warn(fmt::format_string<Args...> f, Args&&... args) {
    spdlog::warn(f, std::forward<Args>(args)...);
}

} // namespace omq::log
