// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#pragma once

#include "omq/normalizer.hpp"
#include "omq/parser.hpp"

#include <set>
#include <string>
#include <variant>

namespace omq {

struct OMQ {
    NormalTBox tbox;
    std::set<std::string> sigma;
    ConjunctiveQuery query;
};

// Normalizes the KB's TBox and declares query symbols missing from it.
OMQ make_omq(const KnowledgeBase& kb, const ConjunctiveQuery& q);

struct CSafe {};
struct CAcyclic {};
struct Unsupported {
    std::string reason;
};
using QueryClass = std::variant<CSafe, CAcyclic, Unsupported>;

std::string to_string(const QueryClass& c);

std::set<std::string> c_variables(const OMQ& omq);
QueryClass classify(const OMQ& omq);

// Query concept of an acyclic connected query rooted at `root`.
ConceptExpr query_concept(const ConjunctiveQuery& q, const std::string& root);

OMQ rollup(const OMQ& omq);

} // namespace omq
