// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/oracle.hpp"

#include "omq/error.hpp"
#include "omq/log.hpp"
#include "omq/normalizer.hpp"
#include "omq/sat.hpp"

#include <algorithm>
#include <future>
#include <sstream>
#include <stdexcept>

namespace omq {

// ---------------------------------------------------------------------------
// Finite interpretations

bool FiniteInterp::in_concept(const std::string& a, const std::string& d) const {
    auto it = concepts.find(a);
    return it != concepts.end() && it->second.count(d);
}

bool FiniteInterp::in_role(const RoleExpr& r, const std::string& d, const std::string& e) const {
    auto it = roles.find(r.name);
    if (it == roles.end()) return false;
    return r.inverted ? it->second.count({e, d}) > 0 : it->second.count({d, e}) > 0;
}

std::string FiniteInterp::str(const std::vector<std::string>& individuals) const {
    std::ostringstream os;
    os << "abox {\n";
    for (const auto& [a, ext] : concepts)
        for (const auto& d : ext) os << "  " << a << "(" << d << ");\n";
    for (const auto& [r, ext] : roles)
        for (const auto& [d, e] : ext) os << "  " << r << "(" << d << ", " << e << ");\n";
    os << "}\n# anonymous:";
    for (const auto& d : domain)
        if (std::find(individuals.begin(), individuals.end(), d) == individuals.end()) os << " " << d;
    os << "\n";
    return os.str();
}

std::set<std::string> extension(const ConceptExpr& c, const FiniteInterp& i) {
    using K = ConceptExpr::Kind;
    std::set<std::string> dom(i.domain.begin(), i.domain.end());
    switch (c.kind()) {
    case K::Top: return dom;
    case K::Bot: return {};
    case K::Name: {
        std::set<std::string> out;
        auto it = i.concepts.find(c.label());
        if (it != i.concepts.end())
            for (const auto& d : it->second)
                if (dom.count(d)) out.insert(d);
        return out;
    }
    case K::Nominal: return dom.count(c.label()) ? std::set<std::string>{c.label()} : std::set<std::string>{};
    case K::Not: {
        auto inner = extension(c.first(), i);
        std::set<std::string> out;
        for (const auto& d : dom)
            if (!inner.count(d)) out.insert(d);
        return out;
    }
    case K::And:
    case K::Or: {
        auto a = extension(c.first(), i), b = extension(c.second(), i);
        std::set<std::string> out;
        for (const auto& d : dom) {
            bool x = a.count(d) > 0, y = b.count(d) > 0;
            if (c.kind() == K::And ? (x && y) : (x || y)) out.insert(d);
        }
        return out;
    }
    case K::Exists:
    case K::Forall: {
        auto inner = extension(c.first(), i);
        std::set<std::string> out;
        for (const auto& d : dom) {
            bool any = false, all = true;
            for (const auto& e : dom) {
                if (!i.in_role(c.role(), d, e)) continue;
                if (inner.count(e))
                    any = true;
                else
                    all = false;
            }
            if (c.kind() == K::Exists ? any : all) out.insert(d);
        }
        return out;
    }
    }
    return {};
}

bool models_kb(const FiniteInterp& i, const KnowledgeBase& kb) {
    if (i.domain.empty()) return false;
    std::set<std::string> dom(i.domain.begin(), i.domain.end());
    if (dom.size() != i.domain.size()) return false;
    auto syms = symbols_of(kb.tbox);
    for (const auto& a : individuals_of(kb.abox, syms.nominals))
        if (!dom.count(a)) return false;
    for (const auto& [a, ext] : i.concepts)
        for (const auto& d : ext)
            if (!dom.count(d)) return false;
    for (const auto& [r, ext] : i.roles)
        for (const auto& [d, e] : ext)
            if (!dom.count(d) || !dom.count(e)) return false;

    for (const auto& ax : kb.tbox) {
        if (const auto* ci = std::get_if<ConceptIncl>(&ax)) {
            auto l = extension(ci->lhs, i), r = extension(ci->rhs, i);
            if (!std::includes(r.begin(), r.end(), l.begin(), l.end())) return false;
        } else {
            const auto& ri = std::get<RoleIncl>(ax);
            for (const auto& d : i.domain)
                for (const auto& e : i.domain)
                    if (i.in_role(ri.lhs, d, e) && !i.in_role(ri.rhs, d, e)) return false;
        }
    }
    std::set<std::string> abox_roles;
    for (const auto& as : kb.abox) {
        if (as.is_role()) {
            abox_roles.insert(as.predicate);
            if (!i.in_role({as.predicate, false}, as.args[0], as.args[1])) return false;
        } else if (!i.in_concept(as.predicate, as.args[0])) {
            return false;
        }
    }
    for (const auto& s : kb.sigma) {
        bool role = syms.roles.count(s) || abox_roles.count(s);
        if (role) {
            std::set<std::pair<std::string, std::string>> want;
            for (const auto& as : kb.abox)
                if (as.predicate == s && as.is_role()) want.insert({as.args[0], as.args[1]});
            auto it = i.roles.find(s);
            if ((it == i.roles.end() ? decltype(want){} : it->second) != want) return false;
        } else {
            std::set<std::string> want;
            for (const auto& as : kb.abox)
                if (as.predicate == s && !as.is_role()) want.insert(as.args[0]);
            auto it = i.concepts.find(s);
            if ((it == i.concepts.end() ? decltype(want){} : it->second) != want) return false;
        }
    }
    return true;
}

bool satisfies_query(const FiniteInterp& i, const ConjunctiveQuery& q, const std::vector<std::string>& tuple) {
    if (tuple.size() != q.answer_vars.size()) throw Error("tuple arity does not match the query");
    std::map<std::string, std::string> bind;
    for (std::size_t k = 0; k < tuple.size(); ++k) {
        auto [it, fresh] = bind.emplace(q.answer_vars[k], tuple[k]);
        if (!fresh && it->second != tuple[k]) return false;
    }
    std::vector<std::string> free;
    for (const auto& v : q.variables())
        if (!bind.count(v)) free.push_back(v);
    std::function<bool(std::size_t)> go = [&](std::size_t k) {
        if (k == free.size()) {
            for (const auto& a : q.atoms) {
                bool ok = a.is_role() ? i.in_role({a.predicate, false}, bind[a.vars[0]], bind[a.vars[1]])
                                      : i.in_concept(a.predicate, bind[a.vars[0]]);
                if (!ok) return false;
            }
            return true;
        }
        for (const auto& d : i.domain) {
            bind[free[k]] = d;
            if (go(k + 1)) return true;
        }
        bind.erase(free[k]);
        return false;
    };
    return go(0);
}

FiniteInterp core_interp(const Core& core) {
    FiniteInterp i;
    for (const auto& e : core.domain()) i.domain.push_back(e.str());
    for (const auto& [a, ext] : core.concept_ext)
        for (const auto& e : ext) i.concepts[a].insert(e.str());
    for (const auto& [r, ext] : core.role_ext)
        for (const auto& [d, e] : ext) i.roles[r].insert({d.str(), e.str()});
    return i;
}

// ---------------------------------------------------------------------------
// Bounded model search

namespace {

using sat::Lit;

// Propositional encoding of a normalized TBox over a fixed finite domain.
class Encoding {
public:
    Encoding(std::vector<std::string> domain, std::vector<std::string> concepts, std::vector<std::string> roles)
        : dom_(std::move(domain)), cn_(std::move(concepts)), rn_(std::move(roles)) {
        truth_ = s_.new_var();
        s_.add_clause({sat::pos(truth_)});
        const std::size_t n = dom_.size();
        for (const auto& c : cn_) {
            auto& v = cv_[c];
            for (std::size_t d = 0; d < n; ++d) v.push_back(s_.new_var());
        }
        for (const auto& r : rn_) {
            auto& v = rv_[r];
            for (std::size_t d = 0; d < n * n; ++d) v.push_back(s_.new_var());
        }
    }

    std::size_t size() const { return dom_.size(); }
    sat::Solver& solver() { return s_; }
    Lit constant(bool v) const { return sat::lit(truth_, v); }

    Lit concept_of(const std::string& a, std::size_t d) const {
        auto it = cv_.find(a);
        if (it == cv_.end()) return constant(false);
        return sat::pos(it->second[d]);
    }
    Lit basic(const Basic& b, std::size_t d) const {
        return b.nominal ? constant(dom_[d] == b.name) : concept_of(b.name, d);
    }
    Lit role(const RoleExpr& r, std::size_t d, std::size_t e) const {
        auto it = rv_.find(r.name);
        if (it == rv_.end()) return constant(false);
        return r.inverted ? sat::pos(it->second[e * size() + d]) : sat::pos(it->second[d * size() + e]);
    }

    void add(std::vector<Lit> c) { s_.add_clause(std::move(c)); }

    void tbox(const NormalTBox& nt) {
        const std::size_t n = size();
        for (const auto& ax : nt.axioms) {
            if (const auto* a = std::get_if<N1>(&ax)) {
                for (std::size_t d = 0; d < n; ++d) {
                    std::vector<Lit> c;
                    for (const auto& l : a->lhs) c.push_back(sat::negate(basic(l, d)));
                    for (const auto& r : a->rhs) c.push_back(basic(r, d));
                    add(c);
                }
            } else if (const auto* a = std::get_if<N2>(&ax)) {
                for (std::size_t d = 0; d < n; ++d) {
                    std::vector<Lit> c{sat::negate(concept_of(a->a, d))};
                    for (std::size_t e = 0; e < n; ++e) {
                        std::uint32_t w = s_.new_var();
                        add({sat::neg(w), role(a->r, d, e)});
                        add({sat::neg(w), basic(a->b, e)});
                        c.push_back(sat::pos(w));
                    }
                    add(c);
                }
            } else if (const auto* a = std::get_if<N3>(&ax)) {
                for (std::size_t d = 0; d < n; ++d)
                    for (std::size_t e = 0; e < n; ++e)
                        add({sat::negate(concept_of(a->a, d)), sat::negate(role(a->r, d, e)), concept_of(a->b, e)});
            } else {
                const auto& ri = std::get<N4>(ax);
                for (std::size_t d = 0; d < n; ++d)
                    for (std::size_t e = 0; e < n; ++e) add({sat::negate(role(ri.r, d, e)), role(ri.s, d, e)});
            }
        }
    }

    // Closed predicates keep exactly their ABox extension over the domain.
    void abox(const std::vector<Assertion>& abox, const std::set<std::string>& sigma) {
        std::map<std::string, std::size_t> at;
        for (std::size_t d = 0; d < size(); ++d) at[dom_[d]] = d;
        for (const auto& a : abox) {
            if (a.is_role())
                add({role({a.predicate, false}, at.at(a.args[0]), at.at(a.args[1]))});
            else
                add({concept_of(a.predicate, at.at(a.args[0]))});
        }
        for (const auto& s : sigma) {
            if (cv_.count(s)) {
                for (std::size_t d = 0; d < size(); ++d) {
                    bool in = std::any_of(abox.begin(), abox.end(), [&](const Assertion& a) {
                        return !a.is_role() && a.predicate == s && a.args[0] == dom_[d];
                    });
                    if (!in) add({sat::negate(concept_of(s, d))});
                }
            }
            if (rv_.count(s)) {
                for (std::size_t d = 0; d < size(); ++d)
                    for (std::size_t e = 0; e < size(); ++e) {
                        bool in = std::any_of(abox.begin(), abox.end(), [&](const Assertion& a) {
                            return a.is_role() && a.predicate == s && a.args[0] == dom_[d] && a.args[1] == dom_[e];
                        });
                        if (!in) add({sat::negate(role({s, false}, d, e))});
                    }
            }
        }
    }

    void falsify(const Goal& g) {
        std::map<std::string, std::size_t> at;
        for (std::size_t d = 0; d < size(); ++d) at[dom_[d]] = d;
        std::map<std::string, std::size_t> bind;
        for (std::size_t k = 0; k < g.tuple.size(); ++k) {
            auto it = at.find(g.tuple[k]);
            if (it == at.end()) return;
            auto [b, fresh] = bind.emplace(g.query.answer_vars[k], it->second);
            if (!fresh && b->second != it->second) return;
        }
        std::vector<std::string> free;
        for (const auto& v : g.query.variables())
            if (!bind.count(v)) free.push_back(v);
        std::function<void(std::size_t)> go = [&](std::size_t k) {
            if (k == free.size()) {
                std::vector<Lit> c;
                for (const auto& a : g.query.atoms) {
                    Lit l = a.is_role() ? role({a.predicate, false}, bind[a.vars[0]], bind[a.vars[1]])
                                        : concept_of(a.predicate, bind[a.vars[0]]);
                    c.push_back(sat::negate(l));
                }
                add(c);
                return;
            }
            for (std::size_t d = 0; d < size(); ++d) {
                bind[free[k]] = d;
                go(k + 1);
            }
            bind.erase(free[k]);
        };
        go(0);
    }

    // Elements from `first` on are interchangeable: order their concept
    // vectors lexicographically non-increasing.
    void break_symmetry(std::size_t first) {
        for (std::size_t d = first; d + 1 < size(); ++d) {
            Lit eq = constant(true);
            for (const auto& c : cn_) {
                Lit x = concept_of(c, d), y = concept_of(c, d + 1);
                add({sat::negate(eq), x, sat::negate(y)});
                std::uint32_t next = s_.new_var();
                add({sat::negate(eq), sat::negate(x), sat::negate(y), sat::pos(next)});
                add({sat::negate(eq), x, y, sat::pos(next)});
                eq = sat::pos(next);
            }
        }
    }

    FiniteInterp model(const std::set<std::string>& keep_concepts) const {
        FiniteInterp i;
        i.domain = dom_;
        const std::size_t n = size();
        for (const auto& [c, v] : cv_) {
            if (!keep_concepts.count(c)) continue;
            for (std::size_t d = 0; d < n; ++d)
                if (s_.model_value(v[d])) i.concepts[c].insert(dom_[d]);
        }
        for (const auto& [r, v] : rv_)
            for (std::size_t d = 0; d < n; ++d)
                for (std::size_t e = 0; e < n; ++e)
                    if (s_.model_value(v[d * n + e])) i.roles[r].insert({dom_[d], dom_[e]});
        return i;
    }

private:
    std::vector<std::string> dom_, cn_, rn_;
    sat::Solver s_;
    std::uint32_t truth_ = 0;
    std::map<std::string, std::vector<std::uint32_t>> cv_, rv_;
};

std::vector<std::string> anonymous(std::size_t count) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= count; ++i) out.push_back("_d" + std::to_string(i));
    return out;
}

struct Attempt {
    std::optional<FiniteInterp> model;
    bool aborted = false;
};

template <typename Fn>
BoundedResult sweep(std::size_t from, std::size_t to, unsigned jobs, Fn attempt) {
    BoundedResult res;
    res.bound = to;
    bool any_abort = false;
    for (std::size_t n = from; n <= to;) {
        std::size_t batch = std::max(1u, jobs);
        std::vector<std::future<Attempt>> fs;
        std::vector<std::size_t> sizes;
        for (std::size_t k = 0; k < batch && n <= to; ++k, ++n) {
            sizes.push_back(n);
            fs.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, attempt, n));
        }
        for (auto& f : fs) {
            Attempt a = f.get();
            any_abort = any_abort || a.aborted;
            if (a.model && !res.model) res.model = std::move(a.model);
        }
        if (res.model) return res;
    }
    res.aborted = any_abort;
    res.exhausted = !any_abort;
    return res;
}

} // namespace

std::size_t default_bound(const KnowledgeBase& kb) {
    auto syms = symbols_of(kb.tbox);
    std::size_t ni = individuals_of(kb.abox, syms.nominals).size();
    std::size_t ex = normalize(kb.tbox).existentials.size();
    return ni + ex * ni + 2;
}

BoundedResult bounded_model_search(const KnowledgeBase& kb, const std::optional<Goal>& goal,
                                   const BoundedOptions& opts) {
    NormalTBox nt = normalize(kb.tbox);
    auto syms = symbols_of(kb.tbox);
    auto inds = individuals_of(kb.abox, syms.nominals);
    std::set<std::string> concepts = nt.concept_names, roles = nt.role_names, keep = syms.concepts;
    for (const auto& a : kb.abox) {
        (a.is_role() ? roles : concepts).insert(a.predicate);
        if (!a.is_role()) keep.insert(a.predicate);
    }
    if (goal)
        for (const auto& a : goal->query.atoms) {
            (a.is_role() ? roles : concepts).insert(a.predicate);
            if (!a.is_role()) keep.insert(a.predicate);
        }
    for (const auto& s : kb.sigma)
        if (!roles.count(s)) keep.insert(s);
    const std::size_t bound = opts.max_size ? opts.max_size : default_bound(kb);
    const std::size_t from = std::max<std::size_t>(1, inds.size());

    auto attempt = [&](std::size_t n) -> Attempt {
        auto dom = inds;
        auto anon = anonymous(n - inds.size());
        dom.insert(dom.end(), anon.begin(), anon.end());
        Encoding enc(dom, {concepts.begin(), concepts.end()}, {roles.begin(), roles.end()});
        enc.tbox(nt);
        enc.abox(kb.abox, kb.sigma);
        if (goal) enc.falsify(*goal);
        enc.break_symmetry(inds.size());
        auto r = enc.solver().solve({}, opts.conflict_limit);
        if (r == sat::Result::Unknown) return {std::nullopt, true};
        if (r == sat::Result::Unsat) return {};
        FiniteInterp m = enc.model(keep);
        if (!models_kb(m, kb) || (goal && satisfies_query(m, goal->query, goal->tuple)))
            throw std::logic_error("bounded search produced an interpretation that fails verification");
        return {std::move(m), false};
    };
    if (from > bound) {
        BoundedResult r;
        r.bound = bound;
        r.exhausted = true;
        return r;
    }
    return sweep(from, bound, opts.jobs, attempt);
}

BoundedResult extend_core_search(const Core& core, const TypeContext& ctx, const std::vector<Assertion>& abox,
                                 std::size_t bound, std::uint64_t conflict_limit) {
    const auto& nt = ctx.tbox();
    std::vector<std::string> base;
    for (const auto& e : core.domain()) base.push_back(e.str());
    std::set<std::string> in_core(base.begin(), base.end());
    std::vector<std::string> concepts(nt.concept_names.begin(), nt.concept_names.end());
    std::vector<std::string> roles(nt.role_names.begin(), nt.role_names.end());
    FiniteInterp ci = core_interp(core);

    KnowledgeBase kb;
    kb.tbox = nt.to_axioms();
    kb.sigma = ctx.sigma();
    kb.abox = abox;

    auto attempt = [&](std::size_t n) -> Attempt {
        auto dom = base;
        auto anon = anonymous(n - base.size());
        dom.insert(dom.end(), anon.begin(), anon.end());
        Encoding enc(dom, concepts, roles);
        enc.tbox(nt);
        enc.abox(abox, ctx.sigma());
        for (std::size_t d = 0; d < base.size(); ++d) {
            for (const auto& c : concepts) {
                Lit l = enc.concept_of(c, d);
                enc.add({ci.in_concept(c, base[d]) ? l : sat::negate(l)});
            }
            for (std::size_t e = 0; e < base.size(); ++e)
                for (const auto& r : roles) {
                    Lit l = enc.role({r, false}, d, e);
                    enc.add({ci.in_role({r, false}, base[d], base[e]) ? l : sat::negate(l)});
                }
        }
        enc.break_symmetry(base.size());
        auto r = enc.solver().solve({}, conflict_limit);
        if (r == sat::Result::Unknown) return {std::nullopt, true};
        if (r == sat::Result::Unsat) return {};
        std::set<std::string> keep(concepts.begin(), concepts.end());
        FiniteInterp m = enc.model(keep);
        if (!models_kb(m, kb)) throw std::logic_error("core extension fails verification");
        return {std::move(m), false};
    };
    if (base.size() > bound) {
        BoundedResult r;
        r.bound = bound;
        r.exhausted = true;
        return r;
    }
    return sweep(base.size(), bound, 1, attempt);
}

// ---------------------------------------------------------------------------
// Core enumeration

namespace {

// Individual part of a core: concept and role membership among individuals.
struct Part {
    std::vector<std::uint64_t> conc;            // per individual, bit per concept name
    std::vector<std::vector<char>> rel;         // per role name, n*n matrix
};

struct FringeOption {
    std::uint64_t t = 0;        // concept names
    std::uint64_t fw = 0, bw = 0;  // role names: parent -> fringe, fringe -> parent
    std::uint64_t wit = 0;      // existentials witnessed for the parent
    TypeVec type;
};

class CoreSpace {
public:
    CoreSpace(const TypeContext& ctx, const std::vector<Assertion>& abox, const CoreSearchOptions& opts)
        : ctx_(ctx), opts_(opts) {
        const auto& nt = ctx.tbox();
        inds_ = ctx.individuals();
        cn_.assign(nt.concept_names.begin(), nt.concept_names.end());
        rn_.assign(nt.role_names.begin(), nt.role_names.end());
        for (std::size_t i = 0; i < cn_.size(); ++i) ci_[cn_[i]] = i;
        for (std::size_t i = 0; i < rn_.size(); ++i) ri_[rn_[i]] = i;
        for (std::size_t i = 0; i < inds_.size(); ++i) ii_[inds_[i]] = i;
        if (cn_.size() > 63 || rn_.size() > 63) throw ResourceError("signature too large for core enumeration");
        const std::size_t n = inds_.size();

        // Variables of the individual part, fixed ones resolved.
        fixed_c_.assign(n * cn_.size(), -1);
        fixed_r_.assign(rn_.size() * n * n, -1);
        for (std::size_t c = 0; c < cn_.size(); ++c)
            if (ctx.closed_concept(cn_[c]))
                for (std::size_t i = 0; i < n; ++i) fixed_c_[i * cn_.size() + c] = 0;
        for (std::size_t r = 0; r < rn_.size(); ++r)
            if (ctx.sigma().count(rn_[r]))
                for (std::size_t k = 0; k < n * n; ++k) fixed_r_[r * n * n + k] = 0;
        for (const auto& a : abox) {
            if (a.is_role()) {
                auto r = ri_.find(a.predicate);
                if (r == ri_.end()) throw Error("ABox role '" + a.predicate + "' does not occur in the TBox");
                fixed_r_[r->second * n * n + ii_.at(a.args[0]) * n + ii_.at(a.args[1])] = 1;
            } else {
                auto c = ci_.find(a.predicate);
                if (c == ci_.end()) throw Error("ABox concept '" + a.predicate + "' does not occur in the TBox");
                fixed_c_[ii_.at(a.args[0]) * cn_.size() + c->second] = 1;
            }
        }
        for (std::size_t k = 0; k < fixed_c_.size(); ++k)
            if (fixed_c_[k] < 0) vars_.push_back({false, k});
        for (std::size_t k = 0; k < fixed_r_.size(); ++k)
            if (fixed_r_[k] < 0) vars_.push_back({true, k});
        for (std::size_t v = 0; v < vars_.size(); ++v) (vars_[v].role ? var_r_ : var_c_)[vars_[v].slot] = v;
        if (vars_.size() > opts.max_free_bits)
            throw ResourceError("core enumeration needs " + std::to_string(vars_.size()) + " free bits, cap is " +
                                std::to_string(opts.max_free_bits));

        std::size_t block = 1;
        for (const auto& c : cn_)
            if (!ctx.closed_concept(c)) ++block;
        for (const auto& r : rn_)
            if (!ctx.sigma().count(r)) block += 2;
        if (block > 24) throw ResourceError("fringe block of " + std::to_string(block) + " bits is too large");
        build_clauses();
    }

    const std::vector<std::string>& individuals() const { return inds_; }

    // Calls visit(part) for each individual part satisfying every
    // individual-level condition; visit returns false to stop.
    void parts(const std::function<bool(const Part&)>& visit) {
        const std::size_t n = inds_.size();
        std::vector<signed char> val(vars_.size(), -1);
        Part p;
        p.conc.assign(n, 0);
        p.rel.assign(rn_.size(), std::vector<char>(n * n, 0));
        bool stop = false;
        std::function<void(std::size_t)> go = [&](std::size_t v) {
            if (stop) return;
            if (v == vars_.size()) {
                fill(p, val);
                if (individual_ok(p) && !visit(p)) stop = true;
                return;
            }
            for (int b = 0; b < 2 && !stop; ++b) {
                val[v] = static_cast<signed char>(b);
                bool ok = true;
                for (auto ci : by_max_[v]) {
                    bool sat = false;
                    for (auto [var, sign] : clauses_[ci])
                        if ((val[var] == 1) == sign) {
                            sat = true;
                            break;
                        }
                    if (!sat) {
                        ok = false;
                        break;
                    }
                }
                if (ok) go(v + 1);
            }
            val[v] = -1;
        };
        if (!trivially_false_) go(0);
    }

    TypeVec individual_type(const Part& p, std::size_t i) const {
        TypeVec t;
        const auto& basis = ctx_.basis();
        for (std::size_t b = 0; b < basis.size(); ++b) {
            if (basis[b].nominal ? inds_[i] == basis[b].name : ((p.conc[i] >> ci_.at(basis[b].name)) & 1u)) t.set(b);
        }
        return t;
    }

    std::set<TypeVec> realized(const Part& p) const {
        std::set<TypeVec> out;
        for (std::size_t i = 0; i < inds_.size(); ++i) out.insert(individual_type(p, i));
        return out;
    }

    // Existentials of individual i not witnessed among individuals.
    std::uint64_t requirements(const Part& p, std::size_t i) const {
        std::uint64_t req = 0;
        const auto& ex = ctx_.tbox().existentials;
        for (std::size_t j = 0; j < ex.size(); ++j)
            if (concept_of(p, ex[j].a, i) && !witnessed(p, ex[j], i)) req |= std::uint64_t{1} << j;
        return req;
    }

    const std::vector<FringeOption>& options(const Part& p, std::size_t i) {
        std::uint64_t pm = p.conc[i];
        auto it = options_.find(pm);
        if (it != options_.end()) return it->second;
        std::vector<FringeOption> out;
        std::vector<std::size_t> oc, orl;
        for (std::size_t c = 0; c < cn_.size(); ++c)
            if (!ctx_.closed_concept(cn_[c])) oc.push_back(c);
        for (std::size_t r = 0; r < rn_.size(); ++r)
            if (!ctx_.sigma().count(rn_[r])) orl.push_back(r);
        const std::size_t bits = oc.size() + 2 * orl.size();
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << bits); ++m) {
            FringeOption o;
            for (std::size_t k = 0; k < oc.size(); ++k)
                if ((m >> k) & 1u) o.t |= std::uint64_t{1} << oc[k];
            for (std::size_t k = 0; k < orl.size(); ++k) {
                if ((m >> (oc.size() + 2 * k)) & 1u) o.fw |= std::uint64_t{1} << orl[k];
                if ((m >> (oc.size() + 2 * k + 1)) & 1u) o.bw |= std::uint64_t{1} << orl[k];
            }
            if (!fringe_ok(pm, o)) continue;
            const auto& ex = ctx_.tbox().existentials;
            for (std::size_t j = 0; j < ex.size(); ++j)
                if (!ex[j].b.nominal && edge(o, ex[j].r, true) && ((o.t >> ci_.at(ex[j].b.name)) & 1u))
                    o.wit |= std::uint64_t{1} << j;
            const auto& basis = ctx_.basis();
            for (std::size_t b = 0; b < basis.size(); ++b)
                if (!basis[b].nominal && ((o.t >> ci_.at(basis[b].name)) & 1u)) o.type.set(b);
            out.push_back(o);
        }
        return options_[pm] = std::move(out);
    }

    bool query_holds(const Part& p, const ConjunctiveQuery& q, const std::vector<std::string>& tuple) const {
        std::map<std::string, std::size_t> bind;
        for (std::size_t k = 0; k < tuple.size(); ++k) {
            auto it = ii_.find(tuple[k]);
            if (it == ii_.end()) return false;
            auto [b, fresh] = bind.emplace(q.answer_vars[k], it->second);
            if (!fresh && b->second != it->second) return false;
        }
        std::vector<std::string> free;
        for (const auto& v : q.variables())
            if (!bind.count(v)) free.push_back(v);
        std::function<bool(std::size_t)> go = [&](std::size_t k) {
            if (k == free.size()) {
                for (const auto& a : q.atoms) {
                    bool ok = a.is_role() ? role(p, {a.predicate, false}, bind[a.vars[0]], bind[a.vars[1]])
                                          : concept_of(p, a.predicate, bind[a.vars[0]]);
                    if (!ok) return false;
                }
                return true;
            }
            for (std::size_t d = 0; d < inds_.size(); ++d) {
                bind[free[k]] = d;
                if (go(k + 1)) return true;
            }
            bind.erase(free[k]);
            return false;
        };
        return go(0);
    }

    Core make_core(const Part& p, const std::vector<std::vector<const FringeOption*>>& fringe) const {
        Core core;
        core.individuals = inds_;
        const std::size_t n = inds_.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < cn_.size(); ++c)
                if ((p.conc[i] >> c) & 1u) core.concept_ext[cn_[c]].insert({inds_[i], -1});
        for (std::size_t r = 0; r < rn_.size(); ++r)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (p.rel[r][i * n + j]) core.role_ext[rn_[r]].insert({{inds_[i], -1}, {inds_[j], -1}});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < fringe[i].size(); ++a) {
                const FringeOption* o = fringe[i][a];
                if (!o) continue;
                Element parent{inds_[i], -1}, f{inds_[i], static_cast<int>(a)};
                core.fringe.insert({inds_[i], a});
                for (std::size_t c = 0; c < cn_.size(); ++c)
                    if ((o->t >> c) & 1u) core.concept_ext[cn_[c]].insert(f);
                for (std::size_t r = 0; r < rn_.size(); ++r) {
                    if ((o->fw >> r) & 1u) core.role_ext[rn_[r]].insert({parent, f});
                    if ((o->bw >> r) & 1u) core.role_ext[rn_[r]].insert({f, parent});
                }
            }
        return core;
    }

private:
    struct Var {
        bool role;
        std::size_t slot;
    };
    using CLit = std::pair<std::size_t, bool>;  // variable, polarity

    // Literal over the individual part: constant or variable.
    struct PLit {
        int constant = -1;  // 0/1 when constant
        CLit lit{0, true};
    };

    PLit concept_lit(const std::string& a, std::size_t i) const {
        auto it = ci_.find(a);
        if (it == ci_.end()) return {0, {}};
        std::size_t slot = i * cn_.size() + it->second;
        if (fixed_c_[slot] >= 0) return {fixed_c_[slot], {}};
        return {-1, {var_c_.at(slot), true}};
    }
    PLit basic_lit(const Basic& b, std::size_t i) const {
        if (b.nominal) return {inds_[i] == b.name ? 1 : 0, {}};
        return concept_lit(b.name, i);
    }
    PLit role_lit(const RoleExpr& r, std::size_t i, std::size_t j) const {
        auto it = ri_.find(r.name);
        if (it == ri_.end()) return {0, {}};
        const std::size_t n = inds_.size();
        std::size_t slot = it->second * n * n + (r.inverted ? j * n + i : i * n + j);
        if (fixed_r_[slot] >= 0) return {fixed_r_[slot], {}};
        return {-1, {var_r_.at(slot), true}};
    }
    static PLit negate(PLit l) {
        if (l.constant >= 0) return {1 - l.constant, {}};
        return {-1, {l.lit.first, !l.lit.second}};
    }

    void clause(const std::vector<PLit>& lits) {
        std::vector<CLit> c;
        for (const auto& l : lits) {
            if (l.constant == 1) return;
            if (l.constant == 0) continue;
            c.push_back(l.lit);
        }
        if (c.empty()) {
            trivially_false_ = true;
            return;
        }
        std::size_t mx = 0;
        for (auto [v, s] : c) mx = std::max(mx, v);
        by_max_[mx].push_back(clauses_.size());
        clauses_.push_back(std::move(c));
    }

    void build_clauses() {
        by_max_.assign(vars_.size() + 1, {});
        const std::size_t n = inds_.size();
        for (const auto& ax : ctx_.tbox().n1())
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<PLit> c;
                for (const auto& l : ax.lhs) c.push_back(negate(basic_lit(l, i)));
                for (const auto& r : ax.rhs) c.push_back(basic_lit(r, i));
                clause(c);
            }
        for (const auto& u : ctx_.tbox().universals())
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    clause({negate(concept_lit(u.a, i)), negate(role_lit(u.r, i, j)), concept_lit(u.b, j)});
        for (const auto& ri : ctx_.tbox().role_inclusions())
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) clause({negate(role_lit(ri.r, i, j)), role_lit(ri.s, i, j)});
    }

    void fill(Part& p, const std::vector<signed char>& val) const {
        const std::size_t n = inds_.size();
        std::fill(p.conc.begin(), p.conc.end(), 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < cn_.size(); ++c) {
                std::size_t slot = i * cn_.size() + c;
                int v = fixed_c_[slot] >= 0 ? fixed_c_[slot] : val[var_c_.at(slot)];
                if (v == 1) p.conc[i] |= std::uint64_t{1} << c;
            }
        for (std::size_t r = 0; r < rn_.size(); ++r)
            for (std::size_t k = 0; k < n * n; ++k) {
                std::size_t slot = r * n * n + k;
                p.rel[r][k] = static_cast<char>(fixed_r_[slot] >= 0 ? fixed_r_[slot] : val[var_r_.at(slot)]);
            }
    }

    bool concept_of(const Part& p, const std::string& a, std::size_t i) const {
        auto it = ci_.find(a);
        return it != ci_.end() && ((p.conc[i] >> it->second) & 1u);
    }
    bool role(const Part& p, const RoleExpr& r, std::size_t i, std::size_t j) const {
        auto it = ri_.find(r.name);
        if (it == ri_.end()) return false;
        const std::size_t n = inds_.size();
        return p.rel[it->second][r.inverted ? j * n + i : i * n + j] != 0;
    }
    bool witnessed(const Part& p, const N2& ex, std::size_t i) const {
        for (std::size_t j = 0; j < inds_.size(); ++j) {
            bool b = ex.b.nominal ? inds_[j] == ex.b.name : concept_of(p, ex.b.name, j);
            if (b && role(p, ex.r, i, j)) return true;
        }
        return false;
    }
    bool individual_ok(const Part& p) const {
        const auto& ex = ctx_.tbox().existentials;
        for (std::size_t i = 0; i < inds_.size(); ++i)
            for (const auto& e : ex)
                if (ctx_.closed_role(e.r) && concept_of(p, e.a, i) && !witnessed(p, e, i)) return false;
        return true;
    }

    // Edge between parent and fringe element in direction of r:
    // parent -> fringe when `out`, fringe -> parent otherwise.
    bool edge(const FringeOption& o, const RoleExpr& r, bool out) const {
        auto it = ri_.find(r.name);
        if (it == ri_.end()) return false;
        bool fw = r.inverted ? !out : out;
        return ((fw ? o.fw : o.bw) >> it->second) & 1u;
    }
    bool fringe_in(const FringeOption& o, const Basic& b) const {
        if (b.nominal) return false;
        auto it = ci_.find(b.name);
        return it != ci_.end() && ((o.t >> it->second) & 1u);
    }
    bool parent_in(std::uint64_t pm, const std::string& a) const {
        auto it = ci_.find(a);
        return it != ci_.end() && ((pm >> it->second) & 1u);
    }

    bool fringe_ok(std::uint64_t pm, const FringeOption& o) const {
        const auto& nt = ctx_.tbox();
        for (const auto& ax : nt.n1()) {
            bool lhs = std::all_of(ax.lhs.begin(), ax.lhs.end(), [&](const Basic& b) { return fringe_in(o, b); });
            bool rhs = std::any_of(ax.rhs.begin(), ax.rhs.end(), [&](const Basic& b) { return fringe_in(o, b); });
            if (lhs && !rhs) return false;
        }
        for (const auto& u : nt.universals()) {
            if (parent_in(pm, u.a) && edge(o, u.r, true) && !fringe_in(o, {false, u.b})) return false;
            if (fringe_in(o, {false, u.a}) && edge(o, u.r, false) && !parent_in(pm, u.b)) return false;
        }
        for (const auto& ri : nt.role_inclusions())
            for (bool out : {true, false})
                if (edge(o, ri.r, out) && !edge(o, ri.s, out)) return false;
        for (const auto& e : nt.existentials)
            if (ctx_.closed_role(e.r) && fringe_in(o, {false, e.a})) return false;
        return true;
    }

    const TypeContext& ctx_;
    CoreSearchOptions opts_;
    std::vector<std::string> inds_, cn_, rn_;
    std::map<std::string, std::size_t> ci_, ri_, ii_;
    std::vector<int> fixed_c_, fixed_r_;
    std::vector<Var> vars_;
    std::map<std::size_t, std::size_t> var_c_, var_r_;
    std::vector<std::vector<CLit>> clauses_;
    std::vector<std::vector<std::size_t>> by_max_;
    bool trivially_false_ = false;
    std::map<std::uint64_t, std::vector<FringeOption>> options_;
};

// Whether some choice of fringe elements covers the requirements using
// only options whose type is unmarked.
bool coverable(const std::vector<FringeOption>& opts, std::uint64_t req, std::size_t slots, const MarkResult& m) {
    if (req == 0) return true;
    std::set<std::uint64_t> masks;
    for (const auto& o : opts)
        if (!m.is_marked(o.type) && (o.wit & req)) masks.insert(o.wit & req);
    std::set<std::uint64_t> reach{0};
    for (std::size_t s = 0; s < slots; ++s) {
        std::set<std::uint64_t> next = reach;
        for (auto r : reach)
            for (auto w : masks) next.insert(r | w);
        reach = std::move(next);
        if (reach.count(req)) return true;
    }
    return reach.count(req) > 0;
}

OMQ c_safe_omq(const OMQ& omq) {
    auto cls = classify(omq);
    if (auto* u = std::get_if<Unsupported>(&cls)) throw Error("unsupported query: " + u->reason);
    if (std::holds_alternative<CAcyclic>(cls)) return rollup(omq);
    return omq;
}

// Visits individual parts that extend to a core with a non-losing strategy.
void good_parts(const OMQ& q, const std::vector<Assertion>& abox, const CoreSearchOptions& opts,
                const std::function<bool(CoreSpace&, const Part&)>& visit) {
    TypeContext ctx(q.tbox, q.sigma, individuals_of(abox, q.tbox.nominals));
    CoreSpace space(ctx, abox, opts);
    std::map<std::set<TypeVec>, MarkResult> memo;
    const std::size_t slots = q.tbox.existentials.size();
    space.parts([&](const Part& p) {
        auto realized = space.realized(p);
        auto it = memo.find(realized);
        if (it == memo.end()) it = memo.emplace(realized, mark(ctx, realized)).first;
        for (std::size_t i = 0; i < space.individuals().size(); ++i)
            if (!coverable(space.options(p, i), space.requirements(p, i), slots, it->second)) return true;
        return visit(space, p);
    });
}

} // namespace

std::size_t free_core_bits(const TypeContext& ctx, const std::vector<Assertion>& abox) {
    CoreSearchOptions opts;
    opts.max_free_bits = SIZE_MAX;
    std::size_t bits = 0;
    const std::size_t n = ctx.individuals().size();
    std::set<std::pair<std::string, std::string>> fixed;
    for (const auto& a : abox)
        if (a.is_role())
            fixed.insert({a.predicate, a.args[0] + "," + a.args[1]});
        else
            fixed.insert({a.predicate, a.args[0]});
    for (const auto& c : ctx.tbox().concept_names) {
        if (ctx.closed_concept(c)) continue;
        for (const auto& i : ctx.individuals())
            if (!fixed.count({c, i})) ++bits;
    }
    for (const auto& r : ctx.tbox().role_names) {
        if (ctx.sigma().count(r)) continue;
        std::size_t taken = 0;
        for (const auto& f : fixed)
            if (f.first == r && f.second.find(',') != std::string::npos) ++taken;
        bits += n * n - taken;
    }
    return bits;
}

bool core_enumeration_decide(const OMQ& omq, const std::vector<Assertion>& abox,
                             const std::vector<std::string>& tuple, const CoreSearchOptions& opts) {
    OMQ q = c_safe_omq(omq);
    if (tuple.size() != q.query.answer_vars.size()) throw Error("tuple arity does not match the query");
    bool countermodel = false;
    good_parts(q, abox, opts, [&](CoreSpace& space, const Part& p) {
        if (space.query_holds(p, q.query, tuple)) return true;
        countermodel = true;
        return false;
    });
    return !countermodel;
}

OracleAnswers core_enumeration_answers(const OMQ& omq, const std::vector<Assertion>& abox,
                                       const CoreSearchOptions& opts) {
    OMQ q = c_safe_omq(omq);
    auto inds = individuals_of(abox, q.tbox.nominals);
    std::set<std::vector<std::string>> cand;
    std::vector<std::string> cur;
    std::function<void()> all = [&] {
        if (cur.size() == q.query.answer_vars.size()) {
            cand.insert(cur);
            return;
        }
        for (const auto& d : inds) {
            cur.push_back(d);
            all();
            cur.pop_back();
        }
    };
    all();
    OracleAnswers out;
    bool consistent = false;
    good_parts(q, abox, opts, [&](CoreSpace& space, const Part& p) {
        consistent = true;
        for (auto it = cand.begin(); it != cand.end();) {
            if (!space.query_holds(p, q.query, *it))
                it = cand.erase(it);
            else
                ++it;
        }
        return true;
    });
    out.inconsistent = !consistent;
    out.answers = std::move(cand);
    return out;
}

std::uint64_t enumerate_cores(const OMQ& omq, const std::vector<Assertion>& abox,
                              const std::function<void(const Core&, bool)>& visit, const CoreSearchOptions& opts) {
    OMQ q = c_safe_omq(omq);
    TypeContext ctx(q.tbox, q.sigma, individuals_of(abox, q.tbox.nominals));
    CoreSpace space(ctx, abox, opts);
    const std::size_t n = space.individuals().size();
    const std::size_t slots = q.tbox.existentials.size();
    std::uint64_t count = 0;
    std::map<std::set<TypeVec>, MarkResult> memo;
    space.parts([&](const Part& p) {
        auto realized = space.realized(p);
        auto it = memo.find(realized);
        if (it == memo.end()) it = memo.emplace(realized, mark(ctx, realized)).first;
        const MarkResult& m = it->second;
        std::vector<std::vector<const FringeOption*>> choice(n, std::vector<const FringeOption*>(slots, nullptr));
        std::vector<std::uint64_t> req(n);
        std::vector<const std::vector<FringeOption>*> opts_of(n);
        for (std::size_t i = 0; i < n; ++i) {
            req[i] = space.requirements(p, i);
            opts_of[i] = &space.options(p, i);
        }
        std::function<void(std::size_t, std::size_t, std::uint64_t, bool)> go = [&](std::size_t i, std::size_t a,
                                                                                     std::uint64_t cover, bool good) {
            if (a == slots) {
                if ((cover & req[i]) != req[i]) return;
                if (i + 1 == n) {
                    if (++count > opts.max_cores) throw ResourceError("core enumeration cap reached");
                    visit(space.make_core(p, choice), good);
                    return;
                }
                go(i + 1, 0, 0, good);
                return;
            }
            choice[i][a] = nullptr;
            go(i, a + 1, cover, good);
            for (const auto& o : *opts_of[i]) {
                choice[i][a] = &o;
                go(i, a + 1, cover | o.wit, good && !m.is_marked(o.type));
            }
            choice[i][a] = nullptr;
        };
        if (n == 0) {
            ++count;
            visit(space.make_core(p, choice), true);
        } else {
            go(0, 0, 0, true);
        }
        return true;
    });
    return count;
}

} // namespace omq
