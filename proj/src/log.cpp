// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <mutex>
#include <string>

namespace omq::log {

void init() {
    static std::once_flag once;
    std::call_once(once, [] {
        auto logger = spdlog::stderr_color_mt("omq");
        logger->set_pattern("[%l] %v");
        spdlog::set_default_logger(logger);
        spdlog::set_level(spdlog::level::warn);
        if (const char* env = std::getenv("OMQ_LOG")) spdlog::set_level(spdlog::level::from_str(env));
    });
}

} // namespace omq::log
