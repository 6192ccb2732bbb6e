// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/types.hpp"

#include "omq/error.hpp"

#include <algorithm>
#include <sstream>

namespace omq {

TypeContext::TypeContext(NormalTBox tbox, std::set<std::string> sigma, std::vector<std::string> individuals)
    : tbox_(std::move(tbox)), sigma_(std::move(sigma)), individuals_(std::move(individuals)) {
    for (const auto& c : tbox_.concept_names) basis_.push_back({false, c});
    for (const auto& n : tbox_.nominals) basis_.push_back({true, n});
    if (basis_.size() > 64) throw ResourceError("more than 64 basic concepts");
    for (std::size_t i = 0; i < basis_.size(); ++i) index_[basis_[i]] = i;
    for (const auto& n1 : tbox_.n1()) n1_masks_.push_back({mask(n1.lhs), mask(n1.rhs)});
    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (basis_[i].nominal || sigma_.count(basis_[i].name)) c_mask_ |= std::uint64_t{1} << i;
    for (const auto& ex : tbox_.existentials)
        if (closed_role(ex.r)) c_mask_ |= std::uint64_t{1} << index({false, ex.a});
}

std::optional<std::size_t> TypeContext::index_of(const Basic& b) const {
    auto it = index_.find(b);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t TypeContext::index(const Basic& b) const {
    auto i = index_of(b);
    if (!i) throw Error("unknown basic concept '" + b.str() + "'");
    return *i;
}

bool TypeContext::closed_role(const RoleExpr& r) const {
    return subsumed_by_closed(r, tbox_.hierarchy, sigma_);
}

std::uint64_t TypeContext::mask(const std::vector<Basic>& bs) const {
    std::uint64_t m = 0;
    for (const auto& b : bs) m |= std::uint64_t{1} << index(b);
    return m;
}

bool TypeContext::satisfies_n1(TypeVec t) const {
    for (const auto& [l, r] : n1_masks_)
        if ((t.bits & l) == l && (t.bits & r) == 0) return false;
    return true;
}

bool TypeContext::is_c_type(TypeVec t) const { return (t.bits & c_mask_) != 0; }

std::string TypeContext::str(TypeVec t) const {
    std::string s;
    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (t.has(i)) s += (s.empty() ? "" : ",") + basis_[i].str();
    return s;
}

std::string Element::str() const { return is_fringe() ? ind + "^" + std::to_string(fringe + 1) : ind; }

Element Element::parse(const std::string& s) {
    auto p = s.find('^');
    if (p == std::string::npos) return {s, -1};
    return {s.substr(0, p), std::stoi(s.substr(p + 1)) - 1};
}

std::vector<Element> Core::domain() const {
    std::vector<Element> d;
    for (const auto& i : individuals) d.push_back({i, -1});
    for (const auto& f : fringe) d.push_back(f.element());
    std::sort(d.begin(), d.end());
    return d;
}

bool Core::has(const Element& e) const {
    if (e.is_fringe()) return fringe.count({e.ind, static_cast<std::size_t>(e.fringe)}) > 0;
    return std::find(individuals.begin(), individuals.end(), e.ind) != individuals.end();
}

bool Core::in_concept(const std::string& a, const Element& e) const {
    auto it = concept_ext.find(a);
    return it != concept_ext.end() && it->second.count(e);
}

bool Core::in_role(const RoleExpr& r, const Element& d, const Element& e) const {
    auto it = role_ext.find(r.name);
    if (it == role_ext.end()) return false;
    return r.inverted ? it->second.count({e, d}) > 0 : it->second.count({d, e}) > 0;
}

std::string Core::str() const {
    std::ostringstream os;
    os << "abox {\n";
    for (const auto& e : domain()) os << "  " << e.str() << ";\n";
    for (const auto& [a, ext] : concept_ext)
        for (const auto& e : ext) os << "  " << a << "(" << e.str() << ");\n";
    for (const auto& [r, ext] : role_ext)
        for (const auto& [d, e] : ext) os << "  " << r << "(" << d.str() << ", " << e.str() << ");\n";
    os << "}\n";
    return os.str();
}

Core core_from_text(const CoreText& text, const TypeContext& ctx) {
    Core core;
    core.individuals = ctx.individuals();
    auto element = [&](const std::string& s) {
        Element e = Element::parse(s);
        if (std::find(core.individuals.begin(), core.individuals.end(), e.ind) == core.individuals.end())
            throw Error("core element '" + s + "' does not name an individual of the KB");
        if (e.is_fringe()) {
            if (e.fringe < 0 || static_cast<std::size_t>(e.fringe) >= ctx.tbox().existentials.size())
                throw Error("core element '" + s + "' refers to an unknown existential axiom");
            core.fringe.insert({e.ind, static_cast<std::size_t>(e.fringe)});
        }
        return e;
    };
    for (const auto& d : text.declared) element(d);
    for (const auto& a : text.assertions) {
        if (a.is_role())
            core.role_ext[a.predicate].insert({element(a.args[0]), element(a.args[1])});
        else
            core.concept_ext[a.predicate].insert(element(a.args[0]));
    }
    return core;
}

bool MarkResult::is_marked(TypeVec t) const { return std::binary_search(marked.begin(), marked.end(), t); }

TypeVec type_of(const Element& e, const Core& core, const TypeContext& ctx) {
    if (!core.has(e)) throw Error("element '" + e.str() + "' is not in the core");
    TypeVec t;
    const auto& basis = ctx.basis();
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].nominal) {
            if (!e.is_fringe() && e.ind == basis[i].name) t.set(i);
        } else if (core.in_concept(basis[i].name, e)) {
            t.set(i);
        }
    }
    return t;
}

bool is_c_type(TypeVec t, const TypeContext& ctx) { return ctx.is_c_type(t); }

bool lc_check(TypeVec t, const Core& core, const TypeContext& ctx) {
    if (!ctx.satisfies_n1(t)) return false;
    if (!ctx.is_c_type(t)) return true;
    for (const auto& i : core.individuals)
        if (type_of({i, -1}, core, ctx) == t) return true;
    return false;
}

namespace {

std::vector<std::pair<Element, Element>> role_pairs(const Core& core, const RoleExpr& r) {
    std::vector<std::pair<Element, Element>> out;
    auto it = core.role_ext.find(r.name);
    if (it == core.role_ext.end()) return out;
    for (const auto& [d, e] : it->second) out.push_back(r.inverted ? std::make_pair(e, d) : std::make_pair(d, e));
    return out;
}

bool in_basic(const Core& core, const Basic& b, const Element& e) {
    if (b.nominal) return !e.is_fringe() && e.ind == b.name;
    return core.in_concept(b.name, e);
}

bool has_successor(const Core& core, const RoleExpr& r, const Basic& b, const Element& d) {
    for (const auto& [x, y] : role_pairs(core, r))
        if (x == d && in_basic(core, b, y)) return true;
    return false;
}

} // namespace

CoreReport validate_core(const Core& core, const TypeContext& ctx, const std::vector<Assertion>& abox) {
    CoreReport rep;
    auto bad = [&](const std::string& cond, const std::string& what) { rep.violations.push_back(cond + ": " + what); };
    const auto& tb = ctx.tbox();

    if (core.individuals != ctx.individuals()) bad("c1", "domain individuals differ from the KB's individuals");
    for (const auto& f : core.fringe)
        if (f.axiom >= tb.existentials.size() ||
            std::find(core.individuals.begin(), core.individuals.end(), f.parent) == core.individuals.end())
            bad("c1", "malformed fringe element " + f.element().str());
    for (const auto& [a, ext] : core.concept_ext) {
        if (!tb.concept_names.count(a)) bad("c1", "unknown concept " + a);
        for (const auto& e : ext)
            if (!core.has(e)) bad("c1", e.str() + " in " + a + " is outside the domain");
    }
    for (const auto& [r, ext] : core.role_ext) {
        if (!tb.role_names.count(r)) bad("c1", "unknown role " + r);
        for (const auto& [d, e] : ext)
            if (!core.has(d) || !core.has(e)) bad("c1", "(" + d.str() + "," + e.str() + ") in " + r + " is outside the domain");
    }

    std::map<std::string, std::set<Element>> abox_c;
    std::map<std::string, std::set<std::pair<Element, Element>>> abox_r;
    for (const auto& a : abox) {
        if (a.is_role()) {
            std::pair<Element, Element> p{{a.args[0], -1}, {a.args[1], -1}};
            abox_r[a.predicate].insert(p);
            if (!core.in_role({a.predicate, false}, p.first, p.second)) bad("c2", "assertion " + a.str() + " fails");
        } else {
            Element e{a.args[0], -1};
            abox_c[a.predicate].insert(e);
            if (!core.in_concept(a.predicate, e)) bad("c2", "assertion " + a.str() + " fails");
        }
    }
    for (const auto& s : ctx.sigma()) {
        auto ic = core.concept_ext.find(s);
        if (ic != core.concept_ext.end())
            for (const auto& e : ic->second)
                if (!abox_c[s].count(e)) bad("c2", "closed " + s + " contains " + e.str());
        auto ir = core.role_ext.find(s);
        if (ir != core.role_ext.end())
            for (const auto& p : ir->second)
                if (!abox_r[s].count(p)) bad("c2", "closed " + s + " contains (" + p.first.str() + "," + p.second.str() + ")");
    }

    auto domain = core.domain();
    for (const auto& e : domain)
        if (!ctx.satisfies_n1(type_of(e, core, ctx))) bad("c3.1", e.str() + " violates an N1 axiom");
    for (const auto& u : tb.universals())
        for (const auto& [d, e] : role_pairs(core, u.r))
            if (core.in_concept(u.a, d) && !core.in_concept(u.b, e))
                bad("c3.2", d.str() + " violates " + to_string(NormalAxiom{u}));
    for (const auto& ri : tb.role_inclusions())
        for (const auto& [d, e] : role_pairs(core, ri.r))
            if (!core.in_role(ri.s, d, e)) bad("c3.3", "(" + d.str() + "," + e.str() + ") violates " + to_string(NormalAxiom{ri}));
    for (const auto& ex : tb.existentials) {
        if (!ctx.closed_role(ex.r)) continue;
        for (const auto& e : domain)
            if (core.in_concept(ex.a, e) && !has_successor(core, ex.r, ex.b, e))
                bad("c3.4", e.str() + " violates " + to_string(NormalAxiom{ex}));
    }

    for (const auto& [r, ext] : core.role_ext)
        for (const auto& [d, e] : ext) {
            bool ok = (!d.is_fringe() && !e.is_fringe()) || (!d.is_fringe() && e.is_fringe() && e.ind == d.ind) ||
                      (d.is_fringe() && !e.is_fringe() && d.ind == e.ind);
            if (!ok) bad("c4", "(" + d.str() + "," + e.str() + ") in " + r + " is not a core edge");
        }

    for (const auto& i : core.individuals) {
        Element e{i, -1};
        for (const auto& ex : tb.existentials)
            if (core.in_concept(ex.a, e) && !has_successor(core, ex.r, ex.b, e))
                bad("c5", i + " violates " + to_string(NormalAxiom{ex}));
    }
    return rep;
}

MarkResult mark(const TypeContext& ctx, const std::set<TypeVec>& realized) {
    const std::size_t k = ctx.k();
    if (k > 22) throw ResourceError("type space too large for marking (k=" + std::to_string(k) + ")");
    const std::uint64_t n = std::uint64_t{1} << k;
    std::vector<char> marked(n, 0);
    for (std::uint64_t t = 0; t < n; ++t) {
        TypeVec tv{t};
        if (!ctx.satisfies_n1(tv) || (ctx.is_c_type(tv) && !realized.count(tv))) marked[t] = 1;
    }

    struct Check {
        std::uint64_t a, b;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> req;   // a1 in t => a2 in t'
        std::vector<std::pair<std::uint64_t, std::uint64_t>> forb;  // a2 not in t => a1 not in t'
    };
    std::vector<Check> checks;
    for (const auto& ex : ctx.tbox().existentials) {
        if (ctx.closed_role(ex.r)) continue;
        Check c{std::uint64_t{1} << ctx.index({false, ex.a}), std::uint64_t{1} << ctx.index(ex.b), {}, {}};
        for (const auto& u : ctx.tbox().universals()) {
            auto a1 = std::uint64_t{1} << ctx.index({false, u.a});
            auto a2 = std::uint64_t{1} << ctx.index({false, u.b});
            if (ctx.tbox().hierarchy.sub(ex.r, u.r)) c.req.push_back({a1, a2});
            if (ctx.tbox().hierarchy.sub(ex.r.inverse(), u.r)) c.forb.push_back({a2, a1});
        }
        checks.push_back(std::move(c));
    }

    MarkResult res;
    bool changed = true;
    while (changed) {
        changed = false;
        ++res.iterations;
        for (std::uint64_t t = 0; t < n; ++t) {
            if (marked[t]) continue;
            for (const auto& c : checks) {
                if (!(t & c.a)) continue;
                std::uint64_t need = c.b, avoid = 0;
                for (auto [a1, a2] : c.req)
                    if (t & a1) need |= a2;
                for (auto [a2, a1] : c.forb)
                    if (!(t & a2)) avoid |= a1;
                bool found = false;
                for (std::uint64_t u = 0; u < n && !found; ++u)
                    found = !marked[u] && (u & need) == need && (u & avoid) == 0;
                if (!found) {
                    marked[t] = 1;
                    changed = true;
                    break;
                }
            }
        }
    }
    for (std::uint64_t t = 0; t < n; ++t) (marked[t] ? res.marked : res.unmarked).push_back({t});
    return res;
}

MarkResult mark(const TypeContext& ctx, const Core& core) {
    std::set<TypeVec> realized;
    for (const auto& i : core.individuals) realized.insert(type_of({i, -1}, core, ctx));
    return mark(ctx, realized);
}

bool has_nonlosing_strategy(const Core& core, const TypeContext& ctx, const MarkResult& m) {
    for (const auto& f : core.fringe)
        if (m.is_marked(type_of(f.element(), core, ctx))) return false;
    return true;
}

bool has_nonlosing_strategy(const Core& core, const TypeContext& ctx) {
    return has_nonlosing_strategy(core, ctx, mark(ctx, core));
}

std::string dump_types(const MarkResult& m, const TypeContext& ctx) {
    std::ostringstream os;
    os << "marked " << m.marked.size() << "\n";
    for (auto t : m.marked) os << "  {" << ctx.str(t) << "}\n";
    os << "unmarked " << m.unmarked.size() << "\n";
    for (auto t : m.unmarked) os << "  {" << ctx.str(t) << "}\n";
    return os.str();
}

} // namespace omq
