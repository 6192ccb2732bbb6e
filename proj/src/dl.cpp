// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/dl.hpp"

#include "omq/error.hpp"

#include <algorithm>
#include <sstream>

namespace omq {

std::string SourceSpan::str() const {
    std::ostringstream os;
    os << (file.empty() ? "<input>" : file) << ":" << line << ":" << column;
    return os.str();
}

std::string RoleExpr::str() const { return inverted ? "inv(" + name + ")" : name; }

ConceptExpr::ConceptExpr() : node_(std::make_shared<Node>()) {}

ConceptExpr ConceptExpr::name(std::string n) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Name;
    node->label = std::move(n);
    return ConceptExpr(std::move(node));
}

ConceptExpr ConceptExpr::top() { return ConceptExpr(); }

ConceptExpr ConceptExpr::bot() {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Bot;
    return ConceptExpr(std::move(node));
}

ConceptExpr ConceptExpr::nominal(std::string individual) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Nominal;
    node->label = std::move(individual);
    return ConceptExpr(std::move(node));
}

ConceptExpr ConceptExpr::negation(ConceptExpr c) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Not;
    node->kids.push_back(std::move(c));
    return ConceptExpr(std::move(node));
}

ConceptExpr ConceptExpr::conj(ConceptExpr a, ConceptExpr b) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::And;
    node->kids = {std::move(a), std::move(b)};
    return ConceptExpr(std::move(node));
}

ConceptExpr ConceptExpr::disj(ConceptExpr a, ConceptExpr b) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Or;
    node->kids = {std::move(a), std::move(b)};
    return ConceptExpr(std::move(node));
}

ConceptExpr ConceptExpr::exists(RoleExpr r, ConceptExpr c) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Exists;
    node->role = std::move(r);
    node->kids.push_back(std::move(c));
    return ConceptExpr(std::move(node));
}

ConceptExpr ConceptExpr::forall(RoleExpr r, ConceptExpr c) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Forall;
    node->role = std::move(r);
    node->kids.push_back(std::move(c));
    return ConceptExpr(std::move(node));
}

bool ConceptExpr::is_basic() const {
    switch (kind()) {
    case Kind::Name: case Kind::Nominal: case Kind::Top: case Kind::Bot: return true;
    default: return false;
    }
}

namespace {

int precedence(ConceptExpr::Kind k) {
    switch (k) {
    case ConceptExpr::Kind::Or: return 1;
    case ConceptExpr::Kind::And: return 2;
    default: return 3;
    }
}

void print(const ConceptExpr& c, std::ostream& os, int min_prec) {
    using K = ConceptExpr::Kind;
    bool paren = precedence(c.kind()) < min_prec;
    if (paren) os << "(";
    switch (c.kind()) {
    case K::Name: os << c.label(); break;
    case K::Top: os << "top"; break;
    case K::Bot: os << "bot"; break;
    case K::Nominal: os << "{" << c.label() << "}"; break;
    case K::Not: os << "not "; print(c.first(), os, 3); break;
    case K::And:
        print(c.first(), os, 2);
        os << " and ";
        print(c.second(), os, 3);
        break;
    case K::Or:
        print(c.first(), os, 1);
        os << " or ";
        print(c.second(), os, 2);
        break;
    case K::Exists:
    case K::Forall:
        os << (c.kind() == K::Exists ? "exists " : "forall ") << c.role().str() << " . ";
        print(c.first(), os, 3);
        break;
    }
    if (paren) os << ")";
}

} // namespace

std::string ConceptExpr::str() const {
    std::ostringstream os;
    print(*this, os, 1);
    return os.str();
}

bool operator==(const ConceptExpr& a, const ConceptExpr& b) {
    return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const ConceptExpr& a, const ConceptExpr& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (auto c = a.label() <=> b.label(); c != 0) return c;
    if (auto c = a.role() <=> b.role(); c != 0) return c;
    const auto& ka = a.node_->kids;
    const auto& kb = b.node_->kids;
    for (std::size_t i = 0; i < ka.size() && i < kb.size(); ++i)
        if (auto c = ka[i] <=> kb[i]; c != 0) return c;
    return ka.size() <=> kb.size();
}

std::string to_string(const Axiom& ax) {
    if (auto* ci = std::get_if<ConceptIncl>(&ax)) return ci->lhs.str() + " <= " + ci->rhs.str();
    const auto& ri = std::get<RoleIncl>(ax);
    return ri.lhs.str() + " <= " + ri.rhs.str();
}

std::string Assertion::str() const {
    std::string s = predicate + "(" + args[0];
    if (args.size() > 1) s += ", " + args[1];
    return s + ")";
}

bool RoleHierarchy::sub(const RoleExpr& r, const RoleExpr& s) const {
    if (r == s) return true;
    return pairs.count({r, s}) > 0;
}

void collect_symbols(const ConceptExpr& c, TBoxSymbols& out) {
    using K = ConceptExpr::Kind;
    switch (c.kind()) {
    case K::Name: out.concepts.insert(c.label()); break;
    case K::Nominal: out.nominals.insert(c.label()); break;
    case K::Top: case K::Bot: break;
    case K::Not: collect_symbols(c.first(), out); break;
    case K::And: case K::Or:
        collect_symbols(c.first(), out);
        collect_symbols(c.second(), out);
        break;
    case K::Exists: case K::Forall:
        out.roles.insert(c.role().name);
        collect_symbols(c.first(), out);
        break;
    }
}

TBoxSymbols symbols_of(const std::vector<Axiom>& tbox) {
    TBoxSymbols out;
    for (const auto& ax : tbox) {
        if (auto* ci = std::get_if<ConceptIncl>(&ax)) {
            collect_symbols(ci->lhs, out);
            collect_symbols(ci->rhs, out);
        } else {
            const auto& ri = std::get<RoleIncl>(ax);
            out.roles.insert(ri.lhs.name);
            out.roles.insert(ri.rhs.name);
        }
    }
    return out;
}

RoleHierarchy role_closure(const std::vector<RoleIncl>& incls, const std::set<std::string>& roles) {
    RoleHierarchy h;
    for (const auto& p : roles) {
        h.pairs.insert({{p, false}, {p, false}});
        h.pairs.insert({{p, true}, {p, true}});
    }
    for (const auto& ri : incls) {
        h.pairs.insert({ri.lhs, ri.lhs});
        h.pairs.insert({ri.lhs.inverse(), ri.lhs.inverse()});
        h.pairs.insert({ri.rhs, ri.rhs});
        h.pairs.insert({ri.rhs.inverse(), ri.rhs.inverse()});
    }
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::pair<RoleExpr, RoleExpr>> add;
        for (const auto& [r, s] : h.pairs) {
            for (const auto& ri : incls) {
                if (ri.lhs == s) add.push_back({r, ri.rhs});
                if (ri.lhs.inverse() == s) add.push_back({r, ri.rhs.inverse()});
            }
            add.push_back({r.inverse(), s.inverse()});
        }
        for (auto& p : add)
            if (h.pairs.insert(p).second) changed = true;
    }
    return h;
}

RoleHierarchy role_closure(const std::vector<Axiom>& tbox) {
    std::vector<RoleIncl> incls;
    for (const auto& ax : tbox)
        if (auto* ri = std::get_if<RoleIncl>(&ax)) incls.push_back(*ri);
    return role_closure(incls, symbols_of(tbox).roles);
}

bool subsumed_by_closed(const RoleExpr& r, const RoleHierarchy& h, const std::set<std::string>& sigma) {
    if (sigma.count(r.name)) return true;
    for (const auto& [a, b] : h.pairs)
        if (a == r && sigma.count(b.name)) return true;
    return false;
}

std::vector<std::string> individuals_of(const std::vector<Assertion>& abox,
                                        const std::set<std::string>& nominals) {
    std::set<std::string> inds(nominals.begin(), nominals.end());
    for (const auto& a : abox)
        for (const auto& x : a.args) inds.insert(x);
    return {inds.begin(), inds.end()};
}

Signature signature_of(const KnowledgeBase& kb) {
    auto syms = symbols_of(kb.tbox);
    Signature sig;
    sig.individuals = individuals_of(kb.abox, syms.nominals);
    sig.concept_names.assign(syms.concepts.begin(), syms.concepts.end());
    sig.role_names.assign(syms.roles.begin(), syms.roles.end());
    for (const auto& c : sig.concept_names) sig.basis.push_back({false, c});
    for (const auto& n : syms.nominals) sig.basis.push_back({true, n});
    return sig;
}

std::vector<std::string> validate_kb(KnowledgeBase& kb, const ValidationOptions& opts) {
    std::vector<std::string> warnings;
    auto syms = symbols_of(kb.tbox);
    for (const auto& s : kb.sigma)
        if (!syms.concepts.count(s) && !syms.roles.count(s))
            throw Error("closed predicate '" + s + "' does not occur in the TBox");
    for (const auto& s : kb.sigma)
        if (syms.concepts.count(s) && syms.roles.count(s))
            throw Error("closed predicate '" + s + "' is used both as a concept and as a role");
    std::set<std::string> added;
    for (const auto& a : kb.abox) {
        bool known = a.is_role() ? syms.roles.count(a.predicate) > 0 : syms.concepts.count(a.predicate) > 0;
        if (known || added.count(a.predicate)) continue;
        if (!opts.extend_with_abox_symbols)
            throw Error("ABox symbol '" + a.predicate + "' does not occur in the TBox");
        added.insert(a.predicate);
        warnings.push_back("ABox symbol '" + a.predicate + "' added to the TBox signature");
        if (a.is_role())
            kb.tbox.push_back(RoleIncl{{a.predicate, false}, {a.predicate, false}});
        else
            kb.tbox.push_back(ConceptIncl{ConceptExpr::name(a.predicate), ConceptExpr::top()});
    }
    return warnings;
}

} // namespace omq
