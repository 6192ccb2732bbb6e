// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Layered stable-model evaluation of rewritten programs and certain
// answers.
#pragma once

#include "omq/datalog.hpp"
#include "omq/rewriter.hpp"
#include "omq/sat.hpp"
#include "omq/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace omq {

struct LayeredProgram {
    datalog::DProgram p1;  // guesses, validation, query rule
    datalog::DProgram p2;  // realized types
    datalog::DProgram p3;  // order, marking, fringe filter
    // Predicates defined by even negation loops or disjunctive heads in p1.
    std::set<std::string> choice_preds;
    std::set<std::pair<std::string, std::string>> choice_pairs;
};

LayeredProgram stratify(const RewriteOutput& out);

// Stable models of a ground program via completion, loop formulas and
// minimality checks over a CDCL solver.
class StableSolver {
public:
    explicit StableSolver(const datalog::GroundProgram& g);
    ~StableSolver();
    StableSolver(const StableSolver&) = delete;
    StableSolver& operator=(const StableSolver&) = delete;

    // Next stable model consistent with the clauses added so far;
    // nullopt when none is left. Throws ResourceError on the conflict limit.
    std::optional<datalog::Bits> next(const std::vector<sat::Lit>& assumptions = {}, std::uint64_t conflict_limit = 0);

    // Clauses over atom ids (variable i is atom i).
    bool add_clause(std::vector<sat::Lit> c);
    // Excludes exactly the given assignment of atoms.
    void block(const datalog::Bits& model);
    void set_priority(std::uint32_t atom, int priority);
    bool head_cycle_free() const;
    std::uint64_t stability_checks() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::vector<datalog::HerbrandInterp> enumerate_stable_models(const datalog::GroundProgram& g,
                                                             std::size_t limit = 0);

struct EngineOptions {
    std::uint64_t branch_limit = 1'000'000;  // candidate p1 models
    std::uint64_t conflict_limit = 0;        // per solver call, 0 = unlimited
    unsigned jobs = 1;
    // Restricts the question to one tuple.
    std::optional<std::vector<std::string>> goal;
};

struct AnswerReport {
    std::set<std::vector<std::string>> answers;
    bool inconsistent = false;
    std::uint64_t models_explored = 0;
};

// Groundings of the three layers over one ABox, evaluated per p1 model.
class LayerEvaluator {
public:
    LayerEvaluator(const RewriteOutput& out, const std::vector<Assertion>& abox);
    ~LayerEvaluator();

    const datalog::GroundProgram& p1() const;
    const datalog::GroundProgram& upper() const;

    struct Verdict {
        bool survives = true;
        // Literals over p1 atoms, all true in the evaluated model, that
        // together force a violated constraint.
        std::vector<sat::Lit> reason;
    };
    Verdict evaluate(const datalog::Bits& m1, bool explain = true) const;

    // Full stable model: p1 atoms plus the derived upper-layer atoms.
    datalog::HerbrandInterp complete(const datalog::Bits& m1) const;

    // Atom ids of answer atoms in p1 with their argument tuples.
    const std::vector<std::pair<std::uint32_t, std::vector<std::string>>>& answer_atoms() const;
    int priority(std::uint32_t atom) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

AnswerReport certain_answers(const RewriteOutput& out, const std::vector<Assertion>& abox,
                             const EngineOptions& opts = {});

// Checks an externally produced answer set against the full grounding.
bool verify_model(const RewriteOutput& out, const std::vector<Assertion>& abox,
                  const datalog::HerbrandInterp& model);

// Enumerates every stable model of the p1 layer over the ABox, reporting
// whether it survives the upper layers. Returns the number of models.
std::uint64_t enumerate_p1(const RewriteOutput& out, const std::vector<Assertion>& abox,
                           const std::function<void(const datalog::HerbrandInterp&, bool)>& visit,
                           const EngineOptions& opts = {});

// Core encoded by a p1 model: c_A(x) is A(x), c_A_e<i>(x) is A(x^i),
// r_p_fw_e<i>(x) is p(x, x^i) and r_p_bw_e<i>(x) is p(x^i, x).
Core project_core(const RewriteOutput& out, const std::vector<std::string>& individuals,
                  const datalog::HerbrandInterp& model);

// The p1 grounding, for inspection.
datalog::DProgram ground_p1(const RewriteOutput& out, const std::vector<Assertion>& abox);

} // namespace omq
