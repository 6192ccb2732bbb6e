// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/normalizer.hpp"

#include <algorithm>

namespace omq {

namespace {

using K = ConceptExpr::Kind;

ConceptExpr nnf(const ConceptExpr& c, bool neg) {
    switch (c.kind()) {
    case K::Name:
    case K::Nominal: return neg ? ConceptExpr::negation(c) : c;
    case K::Top: return neg ? ConceptExpr::bot() : c;
    case K::Bot: return neg ? ConceptExpr::top() : c;
    case K::Not: return nnf(c.first(), !neg);
    case K::And:
        return neg ? ConceptExpr::disj(nnf(c.first(), true), nnf(c.second(), true))
                   : ConceptExpr::conj(nnf(c.first(), false), nnf(c.second(), false));
    case K::Or:
        return neg ? ConceptExpr::conj(nnf(c.first(), true), nnf(c.second(), true))
                   : ConceptExpr::disj(nnf(c.first(), false), nnf(c.second(), false));
    case K::Exists:
        return neg ? ConceptExpr::forall(c.role(), nnf(c.first(), true))
                   : ConceptExpr::exists(c.role(), nnf(c.first(), false));
    case K::Forall:
        return neg ? ConceptExpr::exists(c.role(), nnf(c.first(), true))
                   : ConceptExpr::forall(c.role(), nnf(c.first(), false));
    }
    return c;
}

void flatten(const ConceptExpr& c, K op, std::vector<ConceptExpr>& out) {
    if (c.kind() == op) {
        flatten(c.first(), op, out);
        flatten(c.second(), op, out);
    } else {
        out.push_back(c);
    }
}

ConceptExpr fold(const std::vector<ConceptExpr>& cs, K op) {
    if (cs.empty()) return op == K::And ? ConceptExpr::top() : ConceptExpr::bot();
    ConceptExpr acc = cs[0];
    for (std::size_t i = 1; i < cs.size(); ++i)
        acc = op == K::And ? ConceptExpr::conj(acc, cs[i]) : ConceptExpr::disj(acc, cs[i]);
    return acc;
}

Basic to_basic(const ConceptExpr& c) { return {c.kind() == K::Nominal, c.label()}; }

ConceptExpr from_basic(const Basic& b) {
    return b.nominal ? ConceptExpr::nominal(b.name) : ConceptExpr::name(b.name);
}

void unique_sort(std::vector<Basic>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

class Normalizer {
public:
    Normalizer(NormalTBox& nt, std::string prefix) : nt_(nt), prefix_(std::move(prefix)) {
        for (const auto& ax : nt_.axioms) seen_.insert(to_string(ax));
    }

    void axiom(const Axiom& ax) {
        if (auto* ri = std::get_if<RoleIncl>(&ax)) {
            nt_.role_names.insert(ri->lhs.name);
            nt_.role_names.insert(ri->rhs.name);
            if (ri->lhs != ri->rhs) emit(N4{ri->lhs, ri->rhs});
            return;
        }
        const auto& ci = std::get<ConceptIncl>(ax);
        TBoxSymbols syms;
        collect_symbols(ci.lhs, syms);
        collect_symbols(ci.rhs, syms);
        nt_.concept_names.insert(syms.concepts.begin(), syms.concepts.end());
        nt_.role_names.insert(syms.roles.begin(), syms.roles.end());
        nt_.nominals.insert(syms.nominals.begin(), syms.nominals.end());
        process(ci.lhs, ci.rhs);
    }

private:
    void emit(NormalAxiom ax) {
        if (!seen_.insert(to_string(ax)).second) return;
        if (auto* n2 = std::get_if<N2>(&ax)) nt_.existentials.push_back(*n2);
        nt_.axioms.push_back(std::move(ax));
    }

    std::string fresh() {
        std::string n;
        do {
            n = prefix_ + std::to_string(++nt_.counters[prefix_]);
        } while (nt_.concept_names.count(n));
        nt_.concept_names.insert(n);
        return n;
    }

    // A concept name standing for c: c <= name (neg) or name <= c (pos).
    std::string concept_name_for(const ConceptExpr& c, bool pos) {
        if (c.kind() == K::Name) return c.label();
        auto& m = nt_.memo[c.str()];
        if (m.name.empty()) {
            m.name = fresh();
            nt_.fresh_names.emplace(m.name, c);
        }
        std::string n = m.name;
        ConceptExpr nc = ConceptExpr::name(n);
        if (c.kind() == K::Not && c.first().is_basic()) {
            if (!m.pos || !m.neg) {
                m.pos = m.neg = true;
                process(nc, c);
                process(c, nc);
            }
            return n;
        }
        if (pos && !m.pos) {
            m.pos = true;
            process(nc, c);
        } else if (!pos && !m.neg) {
            m.neg = true;
            process(c, nc);
        }
        return n;
    }

    ConceptExpr basic_for(const ConceptExpr& c, bool pos) {
        if (c.kind() == K::Name || c.kind() == K::Nominal) return c;
        return ConceptExpr::name(concept_name_for(c, pos));
    }

    void process(const ConceptExpr& lhs_in, const ConceptExpr& rhs_in) {
        std::vector<ConceptExpr> l0, r0, L, R;
        flatten(nnf(lhs_in, false), K::And, l0);
        flatten(nnf(rhs_in, false), K::Or, r0);
        for (auto& c : l0) {
            if (c.kind() == K::Not) R.push_back(c.first());
            else L.push_back(c);
        }
        for (auto& c : r0) {
            if (c.kind() == K::Not) L.push_back(c.first());
            else R.push_back(c);
        }
        auto has = [](const std::vector<ConceptExpr>& v, K k) {
            return std::any_of(v.begin(), v.end(), [k](const ConceptExpr& c) { return c.kind() == k; });
        };
        if (has(L, K::Bot) || has(R, K::Top)) return;
        std::erase_if(L, [](const ConceptExpr& c) { return c.kind() == K::Top; });
        std::erase_if(R, [](const ConceptExpr& c) { return c.kind() == K::Bot; });
        for (const auto& l : L)
            if (l.is_basic() && std::find(R.begin(), R.end(), l) != R.end()) return;

        if (L.size() == 1 && L[0].kind() == K::Or) {
            ConceptExpr rhs = fold(R, K::Or);
            process(L[0].first(), rhs);
            process(L[0].second(), rhs);
            return;
        }
        if (R.size() == 1 && R[0].kind() == K::And) {
            ConceptExpr lhs = fold(L, K::And);
            process(lhs, R[0].first());
            process(lhs, R[0].second());
            return;
        }
        if (L.size() == 1 && L[0].kind() == K::Exists) {
            ConceptExpr target = R.size() == 1 && R[0].kind() == K::Name
                                     ? R[0]
                                     : ConceptExpr::name(concept_name_for(fold(R, K::Or), true));
            process(L[0].first(), ConceptExpr::forall(L[0].role().inverse(), target));
            return;
        }
        if (L.size() == 1 && L[0].kind() == K::Forall) {
            std::vector<ConceptExpr> r2 = R;
            r2.push_back(ConceptExpr::exists(L[0].role(), nnf(L[0].first(), true)));
            process(ConceptExpr::top(), fold(r2, K::Or));
            return;
        }
        if (R.size() == 1 && (R[0].kind() == K::Exists || R[0].kind() == K::Forall)) {
            std::string a = L.size() == 1 && L[0].kind() == K::Name ? L[0].label()
                                                                     : concept_name_for(fold(L, K::And), false);
            const ConceptExpr& x = R[0].first();
            const RoleExpr& r = R[0].role();
            if (R[0].kind() == K::Exists) {
                if (x.kind() == K::Bot) {
                    emit(N1{{{false, a}}, {}});
                } else if (x.kind() == K::Name || x.kind() == K::Nominal) {
                    emit(N2{a, r, to_basic(x)});
                } else {
                    emit(N2{a, r, {false, concept_name_for(x, true)}});
                }
            } else {
                if (x.kind() == K::Top) return;
                emit(N3{a, r, x.kind() == K::Name ? x.label() : concept_name_for(x, true)});
            }
            return;
        }
        N1 n1;
        for (const auto& l : L) n1.lhs.push_back(to_basic(basic_for(l, false)));
        for (const auto& r : R) n1.rhs.push_back(to_basic(basic_for(r, true)));
        unique_sort(n1.lhs);
        unique_sort(n1.rhs);
        for (const auto& b : n1.lhs)
            if (std::find(n1.rhs.begin(), n1.rhs.end(), b) != n1.rhs.end()) return;
        emit(std::move(n1));
    }

    NormalTBox& nt_;
    std::string prefix_;
    std::set<std::string> seen_;
};

std::string join_basics(const std::vector<Basic>& bs, const char* sep, const char* empty) {
    if (bs.empty()) return empty;
    std::string s;
    for (std::size_t i = 0; i < bs.size(); ++i) s += (i ? sep : "") + bs[i].str();
    return s;
}

} // namespace

std::string to_string(const NormalAxiom& ax) {
    return std::visit(
        [](const auto& a) -> std::string {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, N1>)
                return join_basics(a.lhs, " and ", "top") + " <= " + join_basics(a.rhs, " or ", "bot");
            else if constexpr (std::is_same_v<T, N2>)
                return a.a + " <= exists " + a.r.str() + " . " + a.b.str();
            else if constexpr (std::is_same_v<T, N3>)
                return a.a + " <= forall " + a.r.str() + " . " + a.b;
            else
                return a.r.str() + " <= " + a.s.str();
        },
        ax);
}

Axiom to_axiom(const NormalAxiom& ax) {
    if (auto* a = std::get_if<N1>(&ax)) {
        std::vector<ConceptExpr> l, r;
        for (const auto& b : a->lhs) l.push_back(from_basic(b));
        for (const auto& b : a->rhs) r.push_back(from_basic(b));
        return ConceptIncl{fold(l, K::And), fold(r, K::Or)};
    }
    if (auto* a = std::get_if<N2>(&ax))
        return ConceptIncl{ConceptExpr::name(a->a), ConceptExpr::exists(a->r, from_basic(a->b))};
    if (auto* a = std::get_if<N3>(&ax))
        return ConceptIncl{ConceptExpr::name(a->a), ConceptExpr::forall(a->r, ConceptExpr::name(a->b))};
    const auto& n4 = std::get<N4>(ax);
    return RoleIncl{n4.r, n4.s};
}

std::vector<N1> NormalTBox::n1() const {
    std::vector<N1> out;
    for (const auto& ax : axioms)
        if (auto* a = std::get_if<N1>(&ax)) out.push_back(*a);
    return out;
}

std::vector<N3> NormalTBox::universals() const {
    std::vector<N3> out;
    for (const auto& ax : axioms)
        if (auto* a = std::get_if<N3>(&ax)) out.push_back(*a);
    return out;
}

std::vector<N4> NormalTBox::role_inclusions() const {
    std::vector<N4> out;
    for (const auto& ax : axioms)
        if (auto* a = std::get_if<N4>(&ax)) out.push_back(*a);
    return out;
}

std::vector<Axiom> NormalTBox::to_axioms() const {
    std::vector<Axiom> out;
    for (const auto& ax : axioms) out.push_back(to_axiom(ax));
    for (const auto& c : concept_names) out.push_back(ConceptIncl{ConceptExpr::name(c), ConceptExpr::top()});
    return out;
}

void declare_concept(NormalTBox& nt, const std::string& name) { nt.concept_names.insert(name); }

void declare_role(NormalTBox& nt, const std::string& name) {
    if (nt.role_names.insert(name).second) {
        std::vector<RoleIncl> incls;
        for (const auto& n4 : nt.role_inclusions()) incls.push_back({n4.r, n4.s});
        nt.hierarchy = role_closure(incls, nt.role_names);
    }
}

void normalize_into(NormalTBox& nt, const std::vector<Axiom>& axioms, const std::string& prefix) {
    Normalizer n(nt, prefix);
    for (const auto& ax : axioms) n.axiom(ax);
    std::vector<RoleIncl> incls;
    for (const auto& n4 : nt.role_inclusions()) incls.push_back({n4.r, n4.s});
    nt.hierarchy = role_closure(incls, nt.role_names);
}

NormalTBox normalize(const std::vector<Axiom>& tbox) {
    NormalTBox nt;
    normalize_into(nt, tbox);
    return nt;
}

bool is_normal(const Axiom& ax) {
    if (std::holds_alternative<RoleIncl>(ax)) return true;
    const auto& ci = std::get<ConceptIncl>(ax);
    auto basic_only = [](const ConceptExpr& c, K op) {
        std::vector<ConceptExpr> parts;
        flatten(c, op, parts);
        return std::all_of(parts.begin(), parts.end(), [](const ConceptExpr& p) { return p.is_basic(); });
    };
    if (basic_only(ci.lhs, K::And) && basic_only(ci.rhs, K::Or)) return true;
    if (ci.lhs.kind() != K::Name) return false;
    if (ci.rhs.kind() == K::Exists)
        return ci.rhs.first().kind() == K::Name || ci.rhs.first().kind() == K::Nominal;
    if (ci.rhs.kind() == K::Forall) return ci.rhs.first().kind() == K::Name;
    return false;
}

} // namespace omq
