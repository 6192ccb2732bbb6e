// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Abstract syntax for ALCHOI knowledge bases with closed predicates.
#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace omq {

struct RoleExpr {
    std::string name;
    bool inverted = false;

    RoleExpr inverse() const { return {name, !inverted}; }
    std::string str() const;

    auto operator<=>(const RoleExpr&) const = default;
    bool operator==(const RoleExpr&) const = default;
};

class ConceptExpr {
public:
    enum class Kind { Name, Top, Bot, Nominal, Not, And, Or, Exists, Forall };

    ConceptExpr();  // Top

    static ConceptExpr name(std::string n);
    static ConceptExpr top();
    static ConceptExpr bot();
    static ConceptExpr nominal(std::string individual);
    static ConceptExpr negation(ConceptExpr c);
    static ConceptExpr conj(ConceptExpr a, ConceptExpr b);
    static ConceptExpr disj(ConceptExpr a, ConceptExpr b);
    static ConceptExpr exists(RoleExpr r, ConceptExpr c);
    static ConceptExpr forall(RoleExpr r, ConceptExpr c);

    Kind kind() const { return node_->kind; }
    // Concept name, or individual for a nominal.
    const std::string& label() const { return node_->label; }
    const RoleExpr& role() const { return node_->role; }
    // Operand of Not/Exists/Forall; left operand of And/Or.
    const ConceptExpr& first() const { return node_->kids[0]; }
    const ConceptExpr& second() const { return node_->kids[1]; }

    bool is_basic() const;  // Name, Nominal, Top or Bot
    std::string str() const;

    friend bool operator==(const ConceptExpr& a, const ConceptExpr& b);
    friend std::strong_ordering operator<=>(const ConceptExpr& a, const ConceptExpr& b);

private:
    struct Node {
        Kind kind = Kind::Top;
        std::string label;
        RoleExpr role;
        std::vector<ConceptExpr> kids;
    };
    explicit ConceptExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct ConceptIncl {
    ConceptExpr lhs, rhs;
    bool operator==(const ConceptIncl&) const = default;
};
struct RoleIncl {
    RoleExpr lhs, rhs;
    bool operator==(const RoleIncl&) const = default;
};
using Axiom = std::variant<ConceptIncl, RoleIncl>;

std::string to_string(const Axiom& ax);

struct Assertion {
    std::string predicate;
    std::vector<std::string> args;  // one (concept) or two (role)

    bool is_role() const { return args.size() == 2; }
    std::string str() const;
    auto operator<=>(const Assertion&) const = default;
    bool operator==(const Assertion&) const = default;
};

struct KnowledgeBase {
    std::vector<Axiom> tbox;
    std::set<std::string> sigma;
    std::vector<Assertion> abox;
};

// A concept name or a nominal; the members of the type basis.
struct Basic {
    bool nominal = false;
    std::string name;

    std::string str() const { return nominal ? "{" + name + "}" : name; }
    auto operator<=>(const Basic&) const = default;
    bool operator==(const Basic&) const = default;
};

struct Signature {
    std::vector<std::string> individuals;
    std::vector<std::string> concept_names;
    std::vector<std::string> role_names;
    std::vector<Basic> basis;
};

struct RoleHierarchy {
    std::set<std::pair<RoleExpr, RoleExpr>> pairs;

    bool sub(const RoleExpr& r, const RoleExpr& s) const;
};

// Names and nominals occurring in a list of axioms.
struct TBoxSymbols {
    std::set<std::string> concepts;
    std::set<std::string> roles;
    std::set<std::string> nominals;
};
TBoxSymbols symbols_of(const std::vector<Axiom>& tbox);
void collect_symbols(const ConceptExpr& c, TBoxSymbols& out);

RoleHierarchy role_closure(const std::vector<Axiom>& tbox);
RoleHierarchy role_closure(const std::vector<RoleIncl>& incls, const std::set<std::string>& roles);

bool subsumed_by_closed(const RoleExpr& r, const RoleHierarchy& h, const std::set<std::string>& sigma);

Signature signature_of(const KnowledgeBase& kb);

// Sorted, deduplicated individuals of the ABox plus the given nominals.
std::vector<std::string> individuals_of(const std::vector<Assertion>& abox,
                                        const std::set<std::string>& nominals);

struct ValidationOptions {
    bool extend_with_abox_symbols = false;
};

// Checks sigma and ABox symbols against the TBox signature. With
// extend_with_abox_symbols, unknown ABox symbols become vacuous axioms
// instead of errors; the returned strings are the warnings issued.
std::vector<std::string> validate_kb(KnowledgeBase& kb, const ValidationOptions& opts = {});

} // namespace omq
