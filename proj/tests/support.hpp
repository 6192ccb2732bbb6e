// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Fixture loading, small program parser and random instance generators
// shared by the unit suites and the acceptance binary.
#pragma once

#include "omq/datalog.hpp"
#include "omq/dl.hpp"
#include "omq/normalizer.hpp"
#include "omq/parser.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

namespace omq::test {

std::string fixture(const std::string& name);
KnowledgeBase load_kb(const std::string& name);
ConjunctiveQuery load_query(const std::string& name);

// Rules in emitted syntax: "a | b :- c, not d, X != Y." One rule per '.'.
datalog::DProgram program(const std::string& text);
// Whitespace-separated ground atoms.
datalog::HerbrandInterp interp(const std::string& text);
std::set<std::string> strs(const std::vector<datalog::HerbrandInterp>& models);

std::set<std::vector<std::string>> all_tuples(const std::vector<std::string>& individuals, std::size_t arity);

struct Instance {
    KnowledgeBase kb;
    ConjunctiveQuery query;
    std::string str() const;
};

// At most 2 individuals, 3 concept names, 1 role and 4 normal axioms;
// closed predicates drawn from the concept names; one query atom, c-safe.
Instance random_micro(std::mt19937_64& rng);

// No closed predicates; nominals only when `nominals` is set. The query
// is c-safe or c-acyclic.
Instance random_open(std::mt19937_64& rng, bool nominals);

// Ground program over atoms p0..p{atoms-1}, disjunctive heads, negation
// and constraints.
datalog::DProgram random_ground_program(std::mt19937_64& rng, std::size_t atoms, std::size_t rules);

// Normal TBox over A1..Ak with 3k + 1 axioms.
std::vector<Axiom> tbox_family(std::size_t k);

} // namespace omq::test
