// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Reference procedures that decide entailment without the rewriting:
// bounded finite-model search over the description-logic semantics, and
// direct core enumeration combined with type elimination.
#pragma once

#include "omq/dl.hpp"
#include "omq/parser.hpp"
#include "omq/query.hpp"
#include "omq/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace omq {

// Individuals of the KB are interpreted as themselves.
struct FiniteInterp {
    std::vector<std::string> domain;
    std::map<std::string, std::set<std::string>> concepts;
    std::map<std::string, std::set<std::pair<std::string, std::string>>> roles;

    bool in_concept(const std::string& a, const std::string& d) const;
    bool in_role(const RoleExpr& r, const std::string& d, const std::string& e) const;
    // ABox syntax followed by the list of anonymous elements.
    std::string str(const std::vector<std::string>& individuals) const;
};

std::set<std::string> extension(const ConceptExpr& c, const FiniteInterp& i);
bool models_kb(const FiniteInterp& i, const KnowledgeBase& kb);
bool satisfies_query(const FiniteInterp& i, const ConjunctiveQuery& q, const std::vector<std::string>& tuple);

// A core read as a plain interpretation; fringe elements are named a^i.
FiniteInterp core_interp(const Core& core);

struct Goal {
    ConjunctiveQuery query;
    std::vector<std::string> tuple;
};

struct BoundedOptions {
    std::size_t max_size = 0;  // 0: default bound
    std::uint64_t conflict_limit = 0;
    unsigned jobs = 1;
};

struct BoundedResult {
    std::optional<FiniteInterp> model;
    std::size_t bound = 0;
    bool exhausted = false;  // no model of any size up to the bound
    bool aborted = false;    // some size hit the conflict limit
};

// |N_I(K)| + |existentials| * |N_I(K)| + 2.
std::size_t default_bound(const KnowledgeBase& kb);

// Model of the KB falsifying the goal (or any model without a goal).
BoundedResult bounded_model_search(const KnowledgeBase& kb, const std::optional<Goal>& goal,
                                   const BoundedOptions& opts = {});

// Model of the normalized KB that extends the core, with at most `bound`
// elements.
BoundedResult extend_core_search(const Core& core, const TypeContext& ctx, const std::vector<Assertion>& abox,
                                 std::size_t bound, std::uint64_t conflict_limit = 0);

struct CoreSearchOptions {
    std::size_t max_free_bits = 40;
    std::uint64_t max_cores = 5'000'000;
};

// Number of individual-level bits left open by the ABox and Σ; each fringe
// element is searched separately and contributes its own, smaller block.
std::size_t free_core_bits(const TypeContext& ctx, const std::vector<Assertion>& abox);

// Whether the tuple is a certain answer, decided by searching for a core
// that falsifies the query and admits a non-losing strategy.
bool core_enumeration_decide(const OMQ& omq, const std::vector<Assertion>& abox,
                             const std::vector<std::string>& tuple, const CoreSearchOptions& opts = {});

struct OracleAnswers {
    std::set<std::vector<std::string>> answers;
    bool inconsistent = false;
};
OracleAnswers core_enumeration_answers(const OMQ& omq, const std::vector<Assertion>& abox,
                                       const CoreSearchOptions& opts = {});

// Visits every valid core of the KB with its non-losing-strategy verdict.
std::uint64_t enumerate_cores(const OMQ& omq, const std::vector<Assertion>& abox,
                              const std::function<void(const Core&, bool)>& visit,
                              const CoreSearchOptions& opts = {});

} // namespace omq
