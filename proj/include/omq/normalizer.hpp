// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Normal form (N1)-(N4):
//   N1  B1 and .. and Bn <= Bn+1 or .. or Bm   (basic concepts; empty lhs is top, empty rhs is bot)
//   N2  A <= exists r . B                      (B a concept name, or a nominal)
//   N3  A <= forall r . B
//   N4  r <= s
#pragma once

#include "omq/dl.hpp"

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace omq {

struct N1 {
    std::vector<Basic> lhs, rhs;  // sorted, unique, no top/bot
    bool operator==(const N1&) const = default;
};
struct N2 {
    std::string a;
    RoleExpr r;
    Basic b;
    bool operator==(const N2&) const = default;
};
struct N3 {
    std::string a;
    RoleExpr r;
    std::string b;
    bool operator==(const N3&) const = default;
};
struct N4 {
    RoleExpr r, s;
    bool operator==(const N4&) const = default;
};
using NormalAxiom = std::variant<N1, N2, N3, N4>;

std::string to_string(const NormalAxiom& ax);
Axiom to_axiom(const NormalAxiom& ax);

struct NormalTBox {
    std::vector<NormalAxiom> axioms;
    std::vector<N2> existentials;  // alpha_1 .. alpha_n in emission order
    std::map<std::string, ConceptExpr> fresh_names;
    RoleHierarchy hierarchy;

    // Signature, including names that occur only in trivial axioms.
    std::set<std::string> concept_names;
    std::set<std::string> role_names;
    std::set<std::string> nominals;

    std::vector<N1> n1() const;
    std::vector<N3> universals() const;
    std::vector<N4> role_inclusions() const;
    std::vector<Axiom> to_axioms() const;

    // Structural sharing state, keyed by the printed subconcept.
    struct Memo {
        std::string name;
        bool pos = false;  // name <= concept emitted
        bool neg = false;  // concept <= name emitted
    };
    std::map<std::string, Memo> memo;
    std::map<std::string, std::size_t> counters;
};

NormalTBox normalize(const std::vector<Axiom>& tbox);

// Normalizes further axioms into an existing normal TBox; fresh names use
// `prefix` followed by a per-prefix counter.
void normalize_into(NormalTBox& nt, const std::vector<Axiom>& axioms, const std::string& prefix = "_X");

// Adds concept or role names to the signature without axioms.
void declare_concept(NormalTBox& nt, const std::string& name);
void declare_role(NormalTBox& nt, const std::string& name);

bool is_normal(const Axiom& ax);

} // namespace omq
