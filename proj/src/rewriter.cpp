// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/rewriter.hpp"

#include "omq/error.hpp"

#include <algorithm>
#include <cctype>

namespace omq {

using datalog::DAtom;
using datalog::DProgram;
using datalog::DRule;
using datalog::DTerm;

// ---------------------------------------------------------------------------
// Predicate table

namespace {

std::string lower(const std::string& s) {
    std::string out;
    for (unsigned char c : s) out += static_cast<char>(std::tolower(c));
    return out;
}

} // namespace

PredTable::PredTable(const std::vector<std::string>& concepts, const std::vector<std::string>& roles,
                     std::size_t existentials, std::size_t k, std::size_t answer_arity) {
    for (const auto& c : concepts) concepts_[c] = lower(c);
    for (const auto& r : roles) roles_[r] = lower(r);
    for (;;) {
        build(existentials, k, answer_arity);
        // Collisions among user-derived names: the first owner keeps the name.
        std::map<std::string, std::pair<bool, std::string>> owner;
        std::set<std::pair<bool, std::string>> bump;
        auto claim = [&](const std::string& mangled, bool is_role, const std::string& user) {
            auto [it, fresh] = owner.emplace(mangled, std::make_pair(is_role, user));
            if (!fresh && it->second != std::make_pair(is_role, user)) bump.insert({is_role, user});
        };
        for (const auto& [c, b] : concepts_) {
            claim(concept_pred(c), false, c);
            claim(concept_neg(c), false, c);
            for (std::size_t i = 1; i <= existentials; ++i) {
                claim(concept_fringe(c, i), false, c);
                claim(concept_fringe_neg(c, i), false, c);
            }
        }
        for (const auto& [r, b] : roles_) {
            claim(role_pred(r), true, r);
            claim(role_neg(r), true, r);
            for (std::size_t i = 1; i <= existentials; ++i)
                for (bool fw : {true, false}) {
                    claim(role_dir(r, fw, i), true, r);
                    claim(role_dir_neg(r, fw, i), true, r);
                }
        }
        if (bump.empty()) break;
        for (const auto& [is_role, user] : bump) {
            auto& m = is_role ? roles_ : concepts_;
            m[user] = "u_" + m[user];
        }
    }
}

std::string PredTable::base(const std::map<std::string, std::string>& m, const std::string& n) {
    auto it = m.find(n);
    if (it == m.end()) throw Error("no predicate for symbol '" + n + "'");
    return it->second;
}

std::string PredTable::concept_fringe(const std::string& a, std::size_t i) const {
    return concept_pred(a) + "_e" + std::to_string(i);
}
std::string PredTable::concept_fringe_neg(const std::string& a, std::size_t i) const {
    return concept_neg(a) + "_e" + std::to_string(i);
}
std::string PredTable::role_dir(const std::string& p, bool forward, std::size_t i) const {
    return role_pred(p) + (forward ? "_fw_e" : "_bw_e") + std::to_string(i);
}
std::string PredTable::role_dir_neg(const std::string& p, bool forward, std::size_t i) const {
    return role_neg(p) + (forward ? "_fw_e" : "_bw_e") + std::to_string(i);
}

const PredInfo* PredTable::info(const std::string& mangled) const {
    auto it = entries_.find(mangled);
    return it == entries_.end() ? nullptr : &it->second;
}

void PredTable::build(std::size_t n, std::size_t k, std::size_t answer_arity) {
    entries_.clear();
    auto put = [&](const std::string& name, PredInfo info) { entries_[name] = std::move(info); };
    put("ind", {PredRole::Ind, "", 0, 0, 1, 1});
    put("eq", {PredRole::Eq, "", 0, 0, 2, 1});
    put("q", {PredRole::Answer, "", 0, 0, answer_arity, 1});
    for (const auto& [c, b] : concepts_) {
        put(concept_pred(c), {PredRole::Concept, c, 0, 0, 1, 1});
        put(concept_neg(c), {PredRole::ConceptNeg, c, 0, 0, 1, 1});
        for (std::size_t i = 1; i <= n; ++i) {
            put(concept_fringe(c, i), {PredRole::ConceptFringe, c, i, 0, 1, 1});
            put(concept_fringe_neg(c, i), {PredRole::ConceptFringeNeg, c, i, 0, 1, 1});
        }
    }
    for (const auto& [r, b] : roles_) {
        put(role_pred(r), {PredRole::Role, r, 0, 0, 2, 1});
        put(role_neg(r), {PredRole::RoleNeg, r, 0, 0, 2, 1});
        for (std::size_t i = 1; i <= n; ++i) {
            put(role_dir(r, true, i), {PredRole::RoleFw, r, i, 0, 1, 1});
            put(role_dir(r, false, i), {PredRole::RoleBw, r, i, 0, 1, 1});
            put(role_dir_neg(r, true, i), {PredRole::RoleFwNeg, r, i, 0, 1, 1});
            put(role_dir_neg(r, false, i), {PredRole::RoleBwNeg, r, i, 0, 1, 1});
        }
    }
    for (std::size_t i = 1; i <= n; ++i) {
        put(in(i), {PredRole::In, "", i, 0, 1, 1});
        put(out(i), {PredRole::Out, "", i, 0, 1, 1});
        put(wit(i), {PredRole::Wit, "", i, 0, 1, 1});
        put(markedone(i), {PredRole::MarkedOne, "", i, 0, 2 * k, 3});
        put(markeduntil(i), {PredRole::MarkedUntil, "", i, 0, 2 * k, 3});
        for (std::size_t l = 0; l <= k; ++l) put(hastype_fringe(l, i), {PredRole::HasTypeFringe, "", i, l, l + 1, 3});
    }
    put("tt", {PredRole::True, "", 0, 0, 1, 3});
    put("ff", {PredRole::False, "", 0, 0, 1, 3});
    for (std::size_t i = 1; i <= k; ++i) {
        put(first(i), {PredRole::First, "", 0, i, i, 3});
        put(last(i), {PredRole::Last, "", 0, i, i, 3});
        put(next(i), {PredRole::Next, "", 0, i, 2 * i, 3});
    }
    put("type", {PredRole::Type, "", 0, 0, k, 3});
    put("marked", {PredRole::Marked, "", 0, 0, k, 3});
    put("closedtype", {PredRole::ClosedType, "", 0, 0, k, 3});
    put("fringetype", {PredRole::FringeType, "", 0, 0, k, 3});
    put("realizedtype", {PredRole::RealizedType, "", 0, 0, k, 2});
    for (std::size_t l = 0; l <= k; ++l) put(hastype(l), {PredRole::HasType, "", 0, l, l + 1, 2});
}

// ---------------------------------------------------------------------------
// Context

std::size_t RewriteContext::index(const Basic& b) const {
    auto it = std::find(basis.begin(), basis.end(), b);
    if (it == basis.end()) throw Error("unknown basic concept '" + b.str() + "'");
    return static_cast<std::size_t>(it - basis.begin());
}

RewriteContext make_context(const OMQ& omq, std::size_t answer_arity, const RewriteOptions& opts) {
    RewriteContext ctx;
    const auto& tb = omq.tbox;
    ctx.concepts.assign(tb.concept_names.begin(), tb.concept_names.end());
    ctx.roles.assign(tb.role_names.begin(), tb.role_names.end());
    ctx.nominals.assign(tb.nominals.begin(), tb.nominals.end());
    for (const auto& c : ctx.concepts) ctx.basis.push_back({false, c});
    for (const auto& n : ctx.nominals) ctx.basis.push_back({true, n});
    ctx.existentials = tb.existentials;
    ctx.n1 = tb.n1();
    ctx.universals = tb.universals();
    ctx.role_inclusions = tb.role_inclusions();
    ctx.hierarchy = tb.hierarchy;
    ctx.sigma = omq.sigma;
    if (opts.bit_constants) {
        if (opts.bit_constants->first == opts.bit_constants->second)
            throw Error("bit constants must be distinct");
        ctx.lo = opts.bit_constants->first;
        ctx.hi = opts.bit_constants->second;
    }
    ctx.preds = PredTable(ctx.concepts, ctx.roles, ctx.existentials.size(), ctx.k(), answer_arity);
    return ctx;
}

// ---------------------------------------------------------------------------
// Rule construction helpers

namespace {

DTerm var(const std::string& n) { return DTerm::var(n); }
DTerm cst(const std::string& n) { return DTerm::cst(n); }
const DTerm X = var("X");
const DTerm Y = var("Y");

std::vector<DTerm> vars(const std::string& prefix, std::size_t n) {
    std::vector<DTerm> v;
    for (std::size_t i = 1; i <= n; ++i) v.push_back(var(prefix + std::to_string(i)));
    return v;
}

std::vector<DTerm> cat(std::vector<DTerm> a, const std::vector<DTerm>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// A body literal that may be statically true or false.
struct BLit {
    enum Kind { Pos, Neg, Neq, True, False } kind;
    DAtom atom;
    DTerm a, b;
};

BLit pos(DAtom a) { return {BLit::Pos, std::move(a), {}, {}}; }
BLit negl(DAtom a) { return {BLit::Neg, std::move(a), {}, {}}; }
BLit neq(DTerm a, DTerm b) { return {BLit::Neq, {}, std::move(a), std::move(b)}; }
BLit always() { return {BLit::True, {}, {}, {}}; }
BLit never() { return {BLit::False, {}, {}, {}}; }

DAtom at(const std::string& p, std::vector<DTerm> args) { return datalog::atom(p, std::move(args)); }

class Builder {
public:
    explicit Builder(DProgram& p) : p_(p) {}

    void rule(std::vector<DAtom> head, const std::vector<BLit>& body) {
        DRule r;
        r.head = std::move(head);
        for (const auto& l : body) {
            switch (l.kind) {
            case BLit::False: return;
            case BLit::True: break;
            case BLit::Pos: r.pos.push_back(l.atom); break;
            case BLit::Neg: r.neg.push_back(l.atom); break;
            case BLit::Neq: r.neq.emplace_back(l.a, l.b); break;
            }
        }
        p_.add(std::move(r));
    }
    void fact(DAtom a) { rule({std::move(a)}, {}); }
    void constraint(const std::vector<BLit>& body) { rule({}, body); }

private:
    DProgram& p_;
};

// r~(x,y): p(x,y) for r = p, p(y,x) for r = inv(p).
DAtom role_atom(const RewriteContext& ctx, const RoleExpr& r, const DTerm& x, const DTerm& y) {
    const auto name = ctx.preds.role_pred(r.name);
    return r.inverted ? at(name, {y, x}) : at(name, {x, y});
}

// r_D^alpha(x); for r = inv(p) the direction flips. False for closed p.
BLit role_dir_lit(const RewriteContext& ctx, const RoleExpr& r, bool forward, std::size_t i, const DTerm& x) {
    if (ctx.closed_concept(r.name)) return never();
    bool fw = r.inverted ? !forward : forward;
    return pos(at(ctx.preds.role_dir(r.name, fw, i), {x}));
}

// B(x) at an individual.
BLit basic_lit(const RewriteContext& ctx, const Basic& b, const DTerm& x) {
    if (b.nominal) return pos(at("eq", {x, cst(b.name)}));
    return pos(at(ctx.preds.concept_pred(b.name), {x}));
}

// B-bar(x) at an individual.
BLit basic_neg_lit(const RewriteContext& ctx, const Basic& b, const DTerm& x) {
    if (b.nominal) return neq(x, cst(b.name));
    if (ctx.closed_concept(b.name)) return negl(at(ctx.preds.concept_pred(b.name), {x}));
    return pos(at(ctx.preds.concept_neg(b.name), {x}));
}

// B^alpha(x): fringe elements are never nominals nor in closed concepts.
BLit fringe_lit(const RewriteContext& ctx, const Basic& b, std::size_t i, const DTerm& x) {
    if (b.nominal || ctx.closed_concept(b.name)) return never();
    return pos(at(ctx.preds.concept_fringe(b.name, i), {x}));
}

BLit fringe_neg_lit(const RewriteContext& ctx, const Basic& b, std::size_t i, const DTerm& x) {
    if (b.nominal || ctx.closed_concept(b.name)) return always();
    return pos(at(ctx.preds.concept_fringe_neg(b.name, i), {x}));
}

// not B^alpha(x)
BLit not_fringe_lit(const RewriteContext& ctx, const std::string& b, std::size_t i, const DTerm& x) {
    if (ctx.closed_concept(b)) return always();
    return negl(at(ctx.preds.concept_fringe(b, i), {x}));
}

BLit bit(const RewriteContext&, bool value, const DTerm& x) { return pos(at(value ? "tt" : "ff", {x})); }

void individuals_rules(const RewriteContext& ctx, Builder& b) {
    for (const auto& n : ctx.nominals) b.fact(at("ind", {cst(n)}));
    for (const auto& c : ctx.concepts) b.rule({at("ind", {X})}, {pos(at(ctx.preds.concept_pred(c), {X}))});
    for (const auto& r : ctx.roles) {
        b.rule({at("ind", {X})}, {pos(at(ctx.preds.role_pred(r), {X, Y}))});
        b.rule({at("ind", {Y})}, {pos(at(ctx.preds.role_pred(r), {X, Y}))});
    }
    b.rule({at("eq", {X, X})}, {pos(at("ind", {X}))});
}

void n1_individual_constraint(const RewriteContext& ctx, Builder& b, const N1& ax, bool skip_nominal_rhs) {
    std::vector<BLit> body{pos(at("ind", {X}))};
    for (const auto& l : ax.lhs) body.push_back(basic_lit(ctx, l, X));
    for (const auto& r : ax.rhs) {
        if (r.nominal && skip_nominal_rhs) return;
        body.push_back(basic_neg_lit(ctx, r, X));
    }
    b.constraint(body);
}

} // namespace

// ---------------------------------------------------------------------------
// (I)-(III)

DProgram build_core_program(const RewriteContext& ctx) {
    DProgram p;
    Builder b(p);
    const auto& pt = ctx.preds;
    const std::size_t n = ctx.existentials.size();
    individuals_rules(ctx, b);

    for (std::size_t i = 1; i <= n; ++i) {
        b.rule({at(pt.in(i), {X})}, {pos(at("ind", {X})), negl(at(pt.out(i), {X}))});
        b.rule({at(pt.out(i), {X})}, {pos(at("ind", {X})), negl(at(pt.in(i), {X}))});
    }
    for (const auto& c : ctx.concepts) {
        if (ctx.closed_concept(c)) continue;
        b.rule({at(pt.concept_pred(c), {X})}, {pos(at("ind", {X})), negl(at(pt.concept_neg(c), {X}))});
        b.rule({at(pt.concept_neg(c), {X})}, {pos(at("ind", {X})), negl(at(pt.concept_pred(c), {X}))});
        for (std::size_t i = 1; i <= n; ++i) {
            b.rule({at(pt.concept_fringe(c, i), {X})},
                   {pos(at(pt.in(i), {X})), negl(at(pt.concept_fringe_neg(c, i), {X}))});
            b.rule({at(pt.concept_fringe_neg(c, i), {X})},
                   {pos(at(pt.in(i), {X})), negl(at(pt.concept_fringe(c, i), {X}))});
        }
    }
    for (const auto& r : ctx.roles) {
        if (ctx.closed_concept(r)) continue;
        b.rule({at(pt.role_pred(r), {X, Y})},
               {pos(at("ind", {X})), pos(at("ind", {Y})), negl(at(pt.role_neg(r), {X, Y}))});
        b.rule({at(pt.role_neg(r), {X, Y})},
               {pos(at("ind", {X})), pos(at("ind", {Y})), negl(at(pt.role_pred(r), {X, Y}))});
        for (std::size_t i = 1; i <= n; ++i)
            for (bool fw : {true, false}) {
                b.rule({at(pt.role_dir(r, fw, i), {X})},
                       {pos(at(pt.in(i), {X})), negl(at(pt.role_dir_neg(r, fw, i), {X}))});
                b.rule({at(pt.role_dir_neg(r, fw, i), {X})},
                       {pos(at(pt.in(i), {X})), negl(at(pt.role_dir(r, fw, i), {X}))});
            }
    }

    // (c3.1)
    for (const auto& ax : ctx.n1) {
        n1_individual_constraint(ctx, b, ax, false);
        for (std::size_t i = 1; i <= n; ++i) {
            std::vector<BLit> body{pos(at(pt.in(i), {X}))};
            for (const auto& l : ax.lhs) body.push_back(fringe_lit(ctx, l, i, X));
            for (const auto& r : ax.rhs) body.push_back(fringe_neg_lit(ctx, r, i, X));
            b.constraint(body);
        }
    }
    // (c3.2)
    for (const auto& u : ctx.universals) {
        b.constraint({pos(at(pt.concept_pred(u.a), {X})), pos(role_atom(ctx, u.r, X, Y)),
                      negl(at(pt.concept_pred(u.b), {Y}))});
        for (std::size_t i = 1; i <= n; ++i) {
            b.constraint({pos(at(pt.concept_pred(u.a), {X})), role_dir_lit(ctx, u.r, true, i, X),
                          not_fringe_lit(ctx, u.b, i, X)});
            b.constraint({fringe_lit(ctx, {false, u.a}, i, X), role_dir_lit(ctx, u.r, false, i, X),
                          negl(at(pt.concept_pred(u.b), {X}))});
        }
    }
    // (c3.3)
    for (const auto& ri : ctx.role_inclusions) {
        b.constraint({pos(role_atom(ctx, ri.r, X, Y)), negl(role_atom(ctx, ri.s, X, Y))});
        for (std::size_t i = 1; i <= n; ++i)
            for (bool fw : {true, false}) {
                BLit s = role_dir_lit(ctx, ri.s, fw, i, X);
                BLit not_s = s.kind == BLit::False ? always() : negl(s.atom);
                b.constraint({role_dir_lit(ctx, ri.r, fw, i, X), not_s});
            }
    }
    // (c5)
    for (std::size_t j = 1; j <= n; ++j) {
        const auto& beta = ctx.existentials[j - 1];
        auto w = at(pt.wit(j), {X});
        b.rule({w}, {pos(role_atom(ctx, beta.r, X, Y)), basic_lit(ctx, beta.b, Y)});
        for (std::size_t i = 1; i <= n; ++i)
            b.rule({w}, {role_dir_lit(ctx, beta.r, true, i, X), fringe_lit(ctx, beta.b, i, X)});
        b.constraint({pos(at(pt.concept_pred(beta.a), {X})), negl(w)});
    }
    // (c3.4)
    for (std::size_t i = 1; i <= n; ++i)
        for (const auto& beta : ctx.existentials)
            if (ctx.closed_role(beta.r)) b.constraint({fringe_lit(ctx, {false, beta.a}, i, X)});
    return p;
}

// ---------------------------------------------------------------------------
// (IV)-(VIII)

namespace {

void order_rules(const RewriteContext& ctx, Builder& b) {
    const std::size_t k = ctx.k();
    const DTerm lo = cst(ctx.lo), hi = cst(ctx.hi);
    b.fact(at(PredTable::first(1), {lo}));
    b.fact(at(PredTable::last(1), {hi}));
    b.fact(at(PredTable::next(1), {lo, hi}));
    for (std::size_t i = 1; i < k; ++i) {
        auto xs = vars("X", i), ys = vars("Y", i);
        auto nx = PredTable::next(i + 1), ni = PredTable::next(i);
        b.rule({at(nx, cat(cat({lo}, xs), cat({lo}, ys)))}, {pos(at(ni, cat(xs, ys)))});
        b.rule({at(nx, cat(cat({hi}, xs), cat({hi}, ys)))}, {pos(at(ni, cat(xs, ys)))});
        b.rule({at(nx, cat(cat({lo}, xs), cat({hi}, ys)))},
               {pos(at(PredTable::last(i), xs)), pos(at(PredTable::first(i), ys))});
        b.rule({at(PredTable::first(i + 1), cat({lo}, xs))}, {pos(at(PredTable::first(i), xs))});
        b.rule({at(PredTable::last(i + 1), cat({hi}, xs))}, {pos(at(PredTable::last(i), xs))});
    }
    auto xs = vars("X", k), ys = vars("Y", k);
    b.rule({at("type", xs)}, {pos(at(PredTable::first(k), xs))});
    b.rule({at("type", ys)}, {pos(at(PredTable::next(k), cat(xs, ys)))});
}

void n1_marking_rules(const RewriteContext& ctx, Builder& b) {
    auto xs = vars("X", ctx.k());
    b.fact(at("tt", {cst(ctx.hi)}));
    b.fact(at("ff", {cst(ctx.lo)}));
    for (const auto& ax : ctx.n1) {
        std::vector<BLit> body{pos(at("type", xs))};
        for (const auto& l : ax.lhs) body.push_back(bit(ctx, true, xs[ctx.index(l)]));
        for (const auto& r : ax.rhs) body.push_back(bit(ctx, false, xs[ctx.index(r)]));
        b.rule({at("marked", xs)}, body);
    }
}

void realized_rules(const RewriteContext& ctx, Builder& b) {
    const std::size_t k = ctx.k();
    const auto& pt = ctx.preds;
    const DTerm lo = cst(ctx.lo), hi = cst(ctx.hi);
    b.rule({at(PredTable::hastype(0), {X})}, {pos(at("ind", {X}))});
    for (std::size_t i = 1; i <= k; ++i) {
        auto ys = vars("Y", i - 1);
        auto prev = [&](const DTerm& x) { return pos(at(PredTable::hastype(i - 1), cat({x}, ys))); };
        auto head = [&](const DTerm& x, const DTerm& v) { return at(PredTable::hastype(i), cat(cat({x}, ys), {v})); };
        const Basic& bi = ctx.basis[i - 1];
        if (bi.nominal) {
            DTerm a = cst(bi.name);
            b.rule({head(a, hi)}, {prev(a)});
            b.rule({head(X, lo)}, {prev(X), neq(X, a)});
        } else {
            b.rule({head(X, hi)}, {prev(X), pos(at(pt.concept_pred(bi.name), {X}))});
            if (ctx.closed_concept(bi.name))
                b.rule({head(X, lo)}, {prev(X), negl(at(pt.concept_pred(bi.name), {X}))});
            else
                b.rule({head(X, lo)}, {prev(X), pos(at(pt.concept_neg(bi.name), {X}))});
        }
    }
    auto ys = vars("Y", k);
    b.rule({at("realizedtype", ys)}, {pos(at(PredTable::hastype(k), cat({X}, ys)))});
}

void exists_marking_rules(const RewriteContext& ctx, Builder& b) {
    const std::size_t k = ctx.k();
    auto xs = vars("X", k), ys = vars("Y", k), zs = vars("Z", k), us = vars("U", k);
    for (std::size_t i = 1; i <= ctx.existentials.size(); ++i) {
        const auto& alpha = ctx.existentials[i - 1];
        if (ctx.closed_role(alpha.r)) continue;
        auto mo = PredTable::markedone(i), mu = PredTable::markeduntil(i);
        b.rule({at(mo, cat(xs, ys))}, {pos(at("type", xs)), pos(at("marked", ys))});
        b.rule({at(mo, cat(xs, ys))},
               {pos(at("type", xs)), pos(at("type", ys)), bit(ctx, false, ys[ctx.index(alpha.b)])});
        for (const auto& u : ctx.universals) {
            std::size_t a1 = ctx.index({false, u.a}), a2 = ctx.index({false, u.b});
            if (ctx.hierarchy.sub(alpha.r, u.r))
                b.rule({at(mo, cat(xs, ys))}, {pos(at("type", xs)), pos(at("type", ys)), bit(ctx, true, xs[a1]),
                                               bit(ctx, false, ys[a2])});
            if (ctx.hierarchy.sub(alpha.r.inverse(), u.r))
                b.rule({at(mo, cat(xs, ys))}, {pos(at("type", xs)), pos(at("type", ys)), bit(ctx, true, ys[a1]),
                                               bit(ctx, false, xs[a2])});
        }
        b.rule({at(mu, cat(xs, zs))}, {pos(at(mo, cat(xs, zs))), pos(at(PredTable::first(k), zs))});
        b.rule({at(mu, cat(xs, us))},
               {pos(at(mu, cat(xs, zs))), pos(at(PredTable::next(k), cat(zs, us))), pos(at(mo, cat(xs, us)))});
        b.rule({at("marked", xs)}, {pos(at(mu, cat(xs, zs))), bit(ctx, true, xs[ctx.index({false, alpha.a})]),
                                    pos(at(PredTable::last(k), zs))});
    }
}

std::vector<std::size_t> c_type_positions(const RewriteContext& ctx) {
    std::set<std::size_t> out;
    for (std::size_t i = 0; i < ctx.k(); ++i)
        if (ctx.basis[i].nominal || ctx.closed_concept(ctx.basis[i].name)) out.insert(i);
    for (const auto& ex : ctx.existentials)
        if (ctx.closed_role(ex.r)) out.insert(ctx.index({false, ex.a}));
    return {out.begin(), out.end()};
}

} // namespace

DProgram build_marking_program(const RewriteContext& ctx) {
    DProgram p;
    if (ctx.k() == 0) return p;
    Builder b(p);
    order_rules(ctx, b);
    n1_marking_rules(ctx, b);
    realized_rules(ctx, b);
    auto xs = vars("X", ctx.k());
    for (auto i : c_type_positions(ctx))
        b.rule({at("closedtype", xs)}, {pos(at("type", xs)), bit(ctx, true, xs[i])});
    b.rule({at("marked", xs)}, {pos(at("closedtype", xs)), negl(at("realizedtype", xs))});
    exists_marking_rules(ctx, b);
    return p;
}

// ---------------------------------------------------------------------------
// (IX)

DProgram build_filter_program(const RewriteContext& ctx) {
    DProgram p;
    const std::size_t k = ctx.k(), n = ctx.existentials.size();
    if (k == 0 || n == 0) return p;
    Builder b(p);
    const auto& pt = ctx.preds;
    const DTerm lo = cst(ctx.lo), hi = cst(ctx.hi);
    for (std::size_t a = 1; a <= n; ++a) {
        b.rule({at(PredTable::hastype_fringe(0, a), {X})}, {pos(at(pt.in(a), {X}))});
        for (std::size_t i = 1; i <= k; ++i) {
            auto ys = vars("Y", i - 1);
            auto prev = pos(at(PredTable::hastype_fringe(i - 1, a), cat({X}, ys)));
            auto head = [&](const DTerm& v) { return at(PredTable::hastype_fringe(i, a), cat(cat({X}, ys), {v})); };
            const Basic& bi = ctx.basis[i - 1];
            if (bi.nominal || ctx.closed_concept(bi.name)) {
                b.rule({head(lo)}, {prev});
            } else {
                b.rule({head(hi)}, {prev, pos(at(pt.concept_fringe(bi.name, a), {X}))});
                b.rule({head(lo)}, {prev, pos(at(pt.concept_fringe_neg(bi.name, a), {X}))});
            }
        }
        auto ys = vars("Y", k);
        b.rule({at("fringetype", ys)}, {pos(at(PredTable::hastype_fringe(k, a), cat({X}, ys)))});
    }
    auto xs = vars("X", k);
    b.constraint({pos(at("marked", xs)), pos(at("fringetype", xs))});
    return p;
}

// ---------------------------------------------------------------------------
// Query rule

DProgram build_query_rule(const RewriteContext& ctx, const ConjunctiveQuery& q) {
    std::map<std::string, std::string> names;
    std::set<std::string> used;
    bool clash = false;
    for (const auto& v : q.variables()) {
        std::string n = v;
        n[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(n[0])));
        if (!used.insert(n).second) clash = true;
        names[v] = n;
    }
    if (clash) {
        std::size_t i = 0;
        for (auto& [v, n] : names) n = "V" + std::to_string(++i);
    }
    DProgram p;
    DRule r;
    std::vector<DTerm> head;
    for (const auto& v : q.answer_vars) head.push_back(var(names.at(v)));
    r.head.push_back(at("q", head));
    for (const auto& a : q.atoms) {
        if (a.is_role())
            r.pos.push_back(at(ctx.preds.role_pred(a.predicate), {var(names.at(a.vars[0])), var(names.at(a.vars[1]))}));
        else
            r.pos.push_back(at(ctx.preds.concept_pred(a.predicate), {var(names.at(a.vars[0]))}));
    }
    p.add(std::move(r));
    return p;
}

// ---------------------------------------------------------------------------
// Positive variant

DProgram build_simple_core_program(const RewriteContext& ctx) {
    DProgram p;
    Builder b(p);
    const auto& pt = ctx.preds;
    individuals_rules(ctx, b);
    for (const auto& c : ctx.concepts)
        b.rule({at(pt.concept_pred(c), {X}), at(pt.concept_neg(c), {X})}, {pos(at("ind", {X}))});
    for (const auto& r : ctx.roles)
        b.rule({at(pt.role_pred(r), {X, Y}), at(pt.role_neg(r), {X, Y})}, {pos(at("ind", {X})), pos(at("ind", {Y}))});
    for (const auto& ax : ctx.n1) n1_individual_constraint(ctx, b, ax, true);
    for (const auto& ex : ctx.existentials)
        if (ex.b.nominal) b.rule({role_atom(ctx, ex.r, X, cst(ex.b.name))}, {pos(at(pt.concept_pred(ex.a), {X}))});
    for (const auto& u : ctx.universals)
        b.rule({at(pt.concept_pred(u.b), {Y})}, {pos(at(pt.concept_pred(u.a), {X})), pos(role_atom(ctx, u.r, X, Y))});
    for (const auto& ri : ctx.role_inclusions) b.rule({role_atom(ctx, ri.s, X, Y)}, {pos(role_atom(ctx, ri.r, X, Y))});
    return p;
}

DProgram build_positive_marking_program(const RewriteContext& ctx) {
    DProgram p;
    if (ctx.k() == 0) return p;
    Builder b(p);
    order_rules(ctx, b);
    n1_marking_rules(ctx, b);
    realized_rules(ctx, b);
    const std::size_t k = ctx.k();
    auto xs = vars("X", k), ys = vars("Y", k);
    for (const auto& a : ctx.nominals) {
        std::size_t ja = ctx.index({true, a});
        for (std::size_t m = 0; m < k; ++m) {
            b.rule({at("marked", xs)}, {pos(at("type", xs)), bit(ctx, true, xs[ja]),
                                        pos(at(PredTable::hastype(k), cat({cst(a)}, ys))), bit(ctx, true, xs[m]),
                                        bit(ctx, false, ys[m])});
            b.rule({at("marked", xs)}, {pos(at("type", xs)), bit(ctx, true, xs[ja]),
                                        pos(at(PredTable::hastype(k), cat({cst(a)}, ys))), bit(ctx, false, xs[m]),
                                        bit(ctx, true, ys[m])});
        }
    }
    exists_marking_rules(ctx, b);
    return p;
}

DProgram build_positive_filter_program(const RewriteContext& ctx) {
    DProgram p;
    if (ctx.k() == 0) return p;
    Builder b(p);
    auto xs = vars("X", ctx.k());
    b.constraint({pos(at("marked", xs)), pos(at("realizedtype", xs))});
    return p;
}

// ---------------------------------------------------------------------------

namespace {

OMQ c_safe(const OMQ& omq) {
    auto cls = classify(omq);
    if (auto* u = std::get_if<Unsupported>(&cls)) throw Error("unsupported query: " + u->reason);
    if (std::holds_alternative<CAcyclic>(cls)) return rollup(omq);
    return omq;
}

} // namespace

RewriteOutput rewrite(const OMQ& omq, const RewriteOptions& opts) {
    RewriteOutput out;
    out.omq = c_safe(omq);
    out.mode = RewriteMode::StableNegation;
    out.ctx = make_context(out.omq, out.omq.query.answer_vars.size(), opts);
    out.program.append(build_core_program(out.ctx));
    out.program.append(build_marking_program(out.ctx));
    out.program.append(build_filter_program(out.ctx));
    out.program.append(build_query_rule(out.ctx, out.omq.query));
    return out;
}

RewriteOutput rewrite_positive(const OMQ& omq, const RewriteOptions& opts) {
    if (!omq.sigma.empty()) throw Error("the positive rewriting requires an empty set of closed predicates");
    RewriteOutput out;
    out.omq = c_safe(omq);
    out.mode = RewriteMode::PositiveDisjunctive;
    out.ctx = make_context(out.omq, out.omq.query.answer_vars.size(), opts);
    out.program.append(build_simple_core_program(out.ctx));
    out.program.append(build_positive_marking_program(out.ctx));
    out.program.append(build_positive_filter_program(out.ctx));
    out.program.append(build_query_rule(out.ctx, out.omq.query));
    return out;
}

datalog::HerbrandInterp abox_facts(const RewriteOutput& out, const std::vector<Assertion>& abox) {
    datalog::HerbrandInterp facts;
    const auto& tb = out.omq.tbox;
    for (const auto& a : abox) {
        if (a.is_role()) {
            if (!tb.role_names.count(a.predicate)) throw Error("ABox role '" + a.predicate + "' does not occur in the TBox");
            facts.insert(at(out.ctx.preds.role_pred(a.predicate), {cst(a.args[0]), cst(a.args[1])}));
        } else {
            if (!tb.concept_names.count(a.predicate))
                throw Error("ABox concept '" + a.predicate + "' does not occur in the TBox");
            facts.insert(at(out.ctx.preds.concept_pred(a.predicate), {cst(a.args[0])}));
        }
    }
    return facts;
}

std::vector<std::string> kb_individuals(const RewriteOutput& out, const std::vector<Assertion>& abox) {
    std::set<std::string> s(out.ctx.nominals.begin(), out.ctx.nominals.end());
    for (const auto& a : abox) s.insert(a.args.begin(), a.args.end());
    return {s.begin(), s.end()};
}

} // namespace omq
