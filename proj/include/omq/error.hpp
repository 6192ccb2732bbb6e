// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace omq {

struct SourceSpan {
    std::string file;
    std::size_t line = 1;
    std::size_t column = 1;

    std::string str() const;
};

// Diagnostic about user input: syntax, validation, unsupported shapes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    Error(const SourceSpan& at, const std::string& msg)
        : std::runtime_error(at.str() + ": " + msg), span_(at), has_span_(true) {}

    const SourceSpan* span() const { return has_span_ ? &span_ : nullptr; }

private:
    SourceSpan span_;
    bool has_span_ = false;
};

// A configured resource cap was hit; the result is undecided, not wrong.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace omq
