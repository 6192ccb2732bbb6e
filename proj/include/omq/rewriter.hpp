// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Rewriting of c-safe (and, after rolling up, c-acyclic) OMQs into
// Datalog with stable negation, and the positive disjunctive variant
// for OMQs without closed predicates.
#pragma once

#include "omq/datalog.hpp"
#include "omq/query.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace omq {

enum class PredRole {
    Ind, Eq, Concept, ConceptNeg, ConceptFringe, ConceptFringeNeg,
    Role, RoleNeg, RoleFw, RoleBw, RoleFwNeg, RoleBwNeg,
    In, Out, Wit, True, False, First, Last, Next, Type,
    Marked, ClosedType, RealizedType, FringeType,
    HasType, HasTypeFringe, MarkedOne, MarkedUntil, Answer
};

struct PredInfo {
    PredRole role;
    std::string symbol;         // user concept or role name, if any
    std::size_t index = 0;      // existential index (1-based) or level
    std::size_t level = 0;      // hastype level
    std::size_t arity = 0;
    int layer = 1;              // 1, 2 or 3
};

// Injective map from logical predicates to lowercase emitted names.
class PredTable {
public:
    PredTable() = default;
    PredTable(const std::vector<std::string>& concepts, const std::vector<std::string>& roles,
              std::size_t existentials, std::size_t k, std::size_t answer_arity);

    std::string concept_pred(const std::string& a) const { return "c_" + base(concepts_, a); }
    std::string concept_neg(const std::string& a) const { return "nc_" + base(concepts_, a); }
    std::string concept_fringe(const std::string& a, std::size_t i) const;
    std::string concept_fringe_neg(const std::string& a, std::size_t i) const;
    std::string role_pred(const std::string& p) const { return "r_" + base(roles_, p); }
    std::string role_neg(const std::string& p) const { return "nr_" + base(roles_, p); }
    std::string role_dir(const std::string& p, bool forward, std::size_t i) const;
    std::string role_dir_neg(const std::string& p, bool forward, std::size_t i) const;
    static std::string in(std::size_t i) { return "in_e" + std::to_string(i); }
    static std::string out(std::size_t i) { return "out_e" + std::to_string(i); }
    static std::string wit(std::size_t j) { return "wit_e" + std::to_string(j); }
    static std::string first(std::size_t i) { return "first" + std::to_string(i); }
    static std::string last(std::size_t i) { return "last" + std::to_string(i); }
    static std::string next(std::size_t i) { return "next" + std::to_string(i); }
    static std::string hastype(std::size_t i) { return "hastype" + std::to_string(i); }
    static std::string hastype_fringe(std::size_t i, std::size_t j) {
        return "hastype" + std::to_string(i) + "_e" + std::to_string(j);
    }
    static std::string markedone(std::size_t i) { return "markedone_e" + std::to_string(i); }
    static std::string markeduntil(std::size_t i) { return "markeduntil_e" + std::to_string(i); }

    const PredInfo* info(const std::string& mangled) const;
    const std::map<std::string, PredInfo>& entries() const { return entries_; }

private:
    static std::string base(const std::map<std::string, std::string>& m, const std::string& n);
    void build(std::size_t existentials, std::size_t k, std::size_t answer_arity);

    std::map<std::string, std::string> concepts_, roles_;  // user name -> mangled base
    std::map<std::string, PredInfo> entries_;
};

enum class RewriteMode { StableNegation, PositiveDisjunctive };

struct RewriteOptions {
    // Replacement for the bit constants 0 and 1.
    std::optional<std::pair<std::string, std::string>> bit_constants;
};

struct RewriteContext {
    std::vector<Basic> basis;
    std::vector<N2> existentials;
    std::vector<N1> n1;
    std::vector<N3> universals;
    std::vector<N4> role_inclusions;
    RoleHierarchy hierarchy;
    std::set<std::string> sigma;
    std::vector<std::string> concepts, roles, nominals;
    std::string lo = "0", hi = "1";
    PredTable preds;

    std::size_t k() const { return basis.size(); }
    std::size_t index(const Basic& b) const;  // 0-based
    bool closed_role(const RoleExpr& r) const { return subsumed_by_closed(r, hierarchy, sigma); }
    bool closed_concept(const std::string& a) const { return sigma.count(a) > 0; }
};

RewriteContext make_context(const OMQ& omq, std::size_t answer_arity, const RewriteOptions& opts = {});

datalog::DProgram build_core_program(const RewriteContext& ctx);
datalog::DProgram build_marking_program(const RewriteContext& ctx);
datalog::DProgram build_filter_program(const RewriteContext& ctx);
datalog::DProgram build_query_rule(const RewriteContext& ctx, const ConjunctiveQuery& q);

// Simple-core replacements used by the positive variant.
datalog::DProgram build_simple_core_program(const RewriteContext& ctx);
datalog::DProgram build_positive_marking_program(const RewriteContext& ctx);
datalog::DProgram build_positive_filter_program(const RewriteContext& ctx);

struct RewriteOutput {
    datalog::DProgram program;
    std::string answer_pred = "q";
    RewriteMode mode = RewriteMode::StableNegation;
    RewriteContext ctx;
    OMQ omq;  // the c-safe OMQ actually rewritten
};

RewriteOutput rewrite(const OMQ& omq, const RewriteOptions& opts = {});
RewriteOutput rewrite_positive(const OMQ& omq, const RewriteOptions& opts = {});

// ABox assertions as facts over the emitted predicate names.
datalog::HerbrandInterp abox_facts(const RewriteOutput& out, const std::vector<Assertion>& abox);

// Individuals of the KB formed by the ABox and the TBox nominals, sorted.
std::vector<std::string> kb_individuals(const RewriteOutput& out, const std::vector<Assertion>& abox);

} // namespace omq
