// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Text syntax for knowledge bases, conjunctive queries and cores.
#pragma once

#include "omq/dl.hpp"
#include "omq/error.hpp"

#include <set>
#include <string>
#include <vector>

namespace omq {

struct QueryAtom {
    std::string predicate;
    std::vector<std::string> vars;  // one (concept) or two (role)

    bool is_role() const { return vars.size() == 2; }
    auto operator<=>(const QueryAtom&) const = default;
    bool operator==(const QueryAtom&) const = default;
};

struct ConjunctiveQuery {
    std::string name = "q";
    std::vector<std::string> answer_vars;
    std::vector<QueryAtom> atoms;  // sorted, unique

    std::set<std::string> variables() const;
    bool operator==(const ConjunctiveQuery&) const = default;
};

KnowledgeBase parse_kb(const std::string& text, const std::string& file = "<input>");

// Arguments naming a member of `individuals` are rejected: queries range
// over variables only.
ConjunctiveQuery parse_query(const std::string& text, const std::string& file = "<input>",
                             const std::set<std::string>& individuals = {});

std::string to_string(const KnowledgeBase& kb);
std::string to_string(const ConjunctiveQuery& q);

// Assertion list whose arguments may name fringe elements as `a^i`
// (parent a, 1-based existential index i). A bare element followed by ';'
// declares it without labels.
struct CoreText {
    std::vector<Assertion> assertions;
    std::vector<std::string> declared;
};
CoreText parse_core_text(const std::string& text, const std::string& file = "<input>");

std::string read_file(const std::string& path);

} // namespace omq
