// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/engine.hpp"

#include "omq/error.hpp"
#include "omq/log.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

namespace omq {

using datalog::Bits;
using datalog::DAtom;
using datalog::DProgram;
using datalog::DRule;
using datalog::GroundProgram;
using datalog::HerbrandInterp;

// ---------------------------------------------------------------------------
// Stratification

namespace {

const PredInfo& pred_info(const PredTable& pt, const DAtom& a) {
    const PredInfo* info = pt.info(a.pred);
    if (!info) throw Error("predicate '" + a.pred + "' is not part of the rewriting");
    if (info->arity != a.args.size())
        throw Error("predicate '" + a.pred + "' used with arity " + std::to_string(a.args.size()) + ", expected " +
                    std::to_string(info->arity));
    return *info;
}

int rule_layer(const PredTable& pt, const DRule& r) {
    int layer = 0;
    if (!r.head.empty()) {
        for (const auto& h : r.head) {
            int l = pred_info(pt, h).layer;
            if (layer && l != layer) throw Error("rule mixes layers in its head: " + r.str());
            layer = l;
        }
        return layer;
    }
    for (const auto* group : {&r.pos, &r.neg})
        for (const auto& a : *group) layer = std::max(layer, pred_info(pt, a).layer);
    return std::max(layer, 1);
}

} // namespace

LayeredProgram stratify(const RewriteOutput& out) {
    const auto& pt = out.ctx.preds;
    LayeredProgram lp;
    std::map<std::string, std::set<std::string>> negates;
    for (const auto& r : out.program.rules) {
        int layer = rule_layer(pt, r);
        for (const auto& a : r.pos) {
            int l = pred_info(pt, a).layer;
            if (l > layer) throw Error("rule reads a higher layer: " + r.str());
        }
        for (const auto& a : r.neg) {
            int l = pred_info(pt, a).layer;
            if (l > layer || (l == layer && layer > 1)) throw Error("negation inside an upper layer: " + r.str());
        }
        DProgram& target = layer == 1 ? lp.p1 : layer == 2 ? lp.p2 : lp.p3;
        target.add(r);
        if (layer != 1) continue;
        if (r.head.size() > 1) {
            for (std::size_t i = 0; i < r.head.size(); ++i)
                for (std::size_t j = i + 1; j < r.head.size(); ++j)
                    lp.choice_pairs.insert(std::minmax(r.head[i].pred, r.head[j].pred));
        } else if (r.head.size() == 1) {
            for (const auto& n : r.neg) negates[r.head[0].pred].insert(n.pred);
        }
    }
    for (const auto& [h, ns] : negates)
        for (const auto& n : ns) {
            auto it = negates.find(n);
            if (it != negates.end() && it->second.count(h)) lp.choice_pairs.insert(std::minmax(h, n));
        }
    for (const auto& [a, b] : lp.choice_pairs) {
        lp.choice_preds.insert(a);
        lp.choice_preds.insert(b);
    }
    return lp;
}

// ---------------------------------------------------------------------------
// Stable model solver

namespace {

// Strongly connected components of the positive dependency graph.
std::vector<std::uint32_t> atom_components(const GroundProgram& g) {
    const std::size_t n = g.atom_count();
    std::vector<std::vector<std::uint32_t>> succ(n);
    for (const auto& r : g.rules)
        for (auto h : r.head)
            for (auto b : r.pos) succ[h].push_back(b);
    std::vector<std::uint32_t> comp(n, UINT32_MAX), low(n), idx(n, UINT32_MAX), stack;
    std::vector<char> on(n, 0);
    std::uint32_t counter = 0, ncomp = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> work;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (idx[s] != UINT32_MAX) continue;
        work.push_back({s, 0});
        idx[s] = low[s] = counter++;
        stack.push_back(s);
        on[s] = 1;
        while (!work.empty()) {
            auto& [v, i] = work.back();
            if (i < succ[v].size()) {
                std::uint32_t w = succ[v][i++];
                if (idx[w] == UINT32_MAX) {
                    idx[w] = low[w] = counter++;
                    stack.push_back(w);
                    on[w] = 1;
                    work.push_back({w, 0});
                } else if (on[w]) {
                    low[v] = std::min(low[v], idx[w]);
                }
                continue;
            }
            std::uint32_t done = v;
            work.pop_back();
            if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
            if (low[done] == idx[done]) {
                for (;;) {
                    std::uint32_t w = stack.back();
                    stack.pop_back();
                    on[w] = 0;
                    comp[w] = ncomp;
                    if (w == done) break;
                }
                ++ncomp;
            }
        }
    }
    return comp;
}

} // namespace

struct StableSolver::Impl {
    struct NRule {
        std::vector<std::uint32_t> head, pos, neg;
        sat::Lit body = 0;
        bool body_true = false;
    };

    const GroundProgram& g;
    sat::Solver s;
    bool hcf = true;
    std::vector<NRule> rules;
    std::vector<std::vector<std::uint32_t>> by_head;  // normal rules per head atom
    std::vector<std::vector<std::uint32_t>> by_pos;
    std::uint64_t checks = 0;

    explicit Impl(const GroundProgram& gp) : g(gp) {
        const std::size_t n = g.atom_count();
        for (std::size_t i = 0; i < n; ++i) s.new_var();
        auto comp = atom_components(g);
        for (const auto& r : g.rules)
            for (std::size_t i = 0; i < r.head.size(); ++i)
                for (std::size_t j = i + 1; j < r.head.size(); ++j)
                    if (comp[r.head[i]] == comp[r.head[j]]) hcf = false;

        // Shifting is sound for head-cycle-free programs.
        for (const auto& r : g.rules) {
            if (r.head.size() <= 1 || !hcf) {
                rules.push_back({r.head, r.pos, r.neg});
                continue;
            }
            for (auto h : r.head) {
                NRule nr{{h}, r.pos, r.neg};
                for (auto o : r.head)
                    if (o != h) nr.neg.push_back(o);
                rules.push_back(std::move(nr));
            }
        }
        by_head.resize(n);
        by_pos.resize(n);
        std::vector<std::vector<sat::Lit>> support(n);
        for (std::uint32_t ri = 0; ri < rules.size(); ++ri) {
            auto& r = rules[ri];
            std::vector<sat::Lit> lits;
            for (auto a : r.pos) lits.push_back(sat::pos(a));
            for (auto a : r.neg) lits.push_back(sat::neg(a));
            if (lits.empty()) {
                r.body_true = true;
            } else if (lits.size() == 1) {
                r.body = lits[0];
            } else {
                std::uint32_t b = s.new_var();
                r.body = sat::pos(b);
                std::vector<sat::Lit> back{sat::pos(b)};
                for (auto l : lits) {
                    s.add_clause({sat::neg(b), l});
                    back.push_back(sat::negate(l));
                }
                s.add_clause(back);
            }
            std::vector<sat::Lit> cl;
            if (!r.body_true) cl.push_back(sat::negate(r.body));
            for (auto h : r.head) cl.push_back(sat::pos(h));
            s.add_clause(cl);
            if (r.head.size() == 1) {
                by_head[r.head[0]].push_back(ri);
                for (auto a : r.pos) by_pos[a].push_back(ri);
                support[r.head[0]].push_back(r.body_true ? sat::Lit(UINT32_MAX) : r.body);
            } else {
                for (auto h : r.head) {
                    std::uint32_t v = s.new_var();
                    std::vector<sat::Lit> parts;
                    if (!r.body_true) parts.push_back(r.body);
                    for (auto o : r.head)
                        if (o != h) parts.push_back(sat::neg(o));
                    std::vector<sat::Lit> back{sat::pos(v)};
                    for (auto l : parts) {
                        s.add_clause({sat::neg(v), l});
                        back.push_back(sat::negate(l));
                    }
                    s.add_clause(back);
                    support[h].push_back(sat::pos(v));
                }
            }
        }
        for (std::uint32_t a = 0; a < n; ++a) {
            if (std::find(support[a].begin(), support[a].end(), sat::Lit(UINT32_MAX)) != support[a].end()) continue;
            std::vector<sat::Lit> cl{sat::neg(a)};
            cl.insert(cl.end(), support[a].begin(), support[a].end());
            s.add_clause(cl);
        }
    }

    // Atoms of m without well-founded support; empty when m is stable.
    std::vector<std::uint32_t> unfounded(const Bits& m) const {
        const std::size_t n = g.atom_count();
        Bits l(n, 0);
        std::vector<std::size_t> missing(rules.size(), 0);
        std::vector<std::uint32_t> queue;
        auto fire = [&](std::uint32_t ri) {
            std::uint32_t h = rules[ri].head[0];
            if (!l[h]) {
                l[h] = 1;
                queue.push_back(h);
            }
        };
        for (std::uint32_t ri = 0; ri < rules.size(); ++ri) {
            const auto& r = rules[ri];
            if (r.head.size() != 1) continue;
            if (std::any_of(r.neg.begin(), r.neg.end(), [&](std::uint32_t a) { return m[a] != 0; })) {
                missing[ri] = SIZE_MAX;
                continue;
            }
            missing[ri] = r.pos.size();
            if (r.pos.empty()) fire(ri);
        }
        for (std::size_t qi = 0; qi < queue.size(); ++qi)
            for (auto ri : by_pos[queue[qi]])
                if (missing[ri] != SIZE_MAX && --missing[ri] == 0) fire(ri);
        std::vector<std::uint32_t> u;
        for (std::uint32_t a = 0; a < n; ++a)
            if (m[a] && !l[a]) u.push_back(a);
        return u;
    }

    void add_loop_formulas(const std::vector<std::uint32_t>& u) {
        std::vector<char> in(g.atom_count(), 0);
        for (auto a : u) in[a] = 1;
        std::vector<sat::Lit> external;
        for (auto a : u)
            for (auto ri : by_head[a]) {
                const auto& r = rules[ri];
                if (std::any_of(r.pos.begin(), r.pos.end(), [&](std::uint32_t b) { return in[b] != 0; })) continue;
                if (r.body_true) return;
                external.push_back(r.body);
            }
        std::sort(external.begin(), external.end());
        external.erase(std::unique(external.begin(), external.end()), external.end());
        for (auto a : u) {
            std::vector<sat::Lit> cl{sat::neg(a)};
            cl.insert(cl.end(), external.begin(), external.end());
            s.add_clause(cl);
        }
    }

    void block(const Bits& m) {
        std::vector<sat::Lit> cl;
        for (std::uint32_t a = 0; a < m.size(); ++a) cl.push_back(sat::lit(a, !m[a]));
        s.add_clause(cl);
    }
};

StableSolver::StableSolver(const GroundProgram& g) : impl_(std::make_unique<Impl>(g)) {}
StableSolver::~StableSolver() = default;

std::optional<Bits> StableSolver::next(const std::vector<sat::Lit>& assumptions, std::uint64_t conflict_limit) {
    auto& im = *impl_;
    const std::size_t n = im.g.atom_count();
    for (;;) {
        if (!im.s.okay()) return std::nullopt;
        auto res = im.s.solve(assumptions, conflict_limit);
        if (res == sat::Result::Unsat) return std::nullopt;
        if (res == sat::Result::Unknown) throw ResourceError("solver conflict limit reached");
        Bits m(n, 0);
        for (std::uint32_t a = 0; a < n; ++a) m[a] = im.s.model_value(a) ? 1 : 0;
        ++im.checks;
        if (im.hcf) {
            auto u = im.unfounded(m);
            if (u.empty()) return m;
            im.add_loop_formulas(u);
        } else {
            if (datalog::is_stable_model(im.g, m)) return m;
            im.block(m);
        }
    }
}

bool StableSolver::add_clause(std::vector<sat::Lit> c) { return impl_->s.add_clause(std::move(c)); }
void StableSolver::block(const Bits& model) { impl_->block(model); }
void StableSolver::set_priority(std::uint32_t atom, int priority) { impl_->s.set_priority(atom, priority); }
bool StableSolver::head_cycle_free() const { return impl_->hcf; }
std::uint64_t StableSolver::stability_checks() const { return impl_->checks; }

std::vector<HerbrandInterp> enumerate_stable_models(const GroundProgram& g, std::size_t limit) {
    StableSolver s(g);
    std::vector<HerbrandInterp> out;
    while (auto m = s.next()) {
        out.push_back(datalog::from_bits(g, *m));
        if (limit && out.size() >= limit) break;
        s.block(*m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Layer evaluation

struct LayerEvaluator::Impl {
    PredTable preds;
    GroundProgram g1, g23;
    std::vector<int> layer;             // per g23 atom
    std::vector<std::int64_t> to_p1;    // g23 atom -> g1 atom or -1
    std::vector<std::uint32_t> p2_rules, p3_rules, constraints;
    std::vector<std::vector<std::uint32_t>> occ;      // same-layer positive occurrences
    std::vector<std::vector<std::uint32_t>> by_head;  // p2 rules per head
    std::vector<std::pair<std::uint32_t, std::vector<std::string>>> answers;
    std::vector<int> prio;

    struct Run {
        std::vector<char> val;
        std::vector<std::int32_t> support;
        std::int64_t violated = -1;
    };

    int layer_of(const GroundProgram& g, std::uint32_t atom) const {
        const PredInfo* info = preds.info(g.symbol_name(g.pred_of(atom)));
        if (!info) throw Error("predicate '" + g.symbol_name(g.pred_of(atom)) + "' is not part of the rewriting");
        return info->layer;
    }

    void lfp(Run& run, const std::vector<std::uint32_t>& list, int target, std::vector<std::uint32_t>& missing) const {
        std::vector<std::uint32_t> queue;
        auto fire = [&](std::uint32_t ri) {
            const auto& r = g23.rules[ri];
            if (r.head.empty()) return;
            std::uint32_t h = r.head[0];
            if (run.val[h]) return;
            run.val[h] = 1;
            run.support[h] = static_cast<std::int32_t>(ri);
            queue.push_back(h);
        };
        for (auto ri : list) {
            const auto& r = g23.rules[ri];
            bool dead = std::any_of(r.neg.begin(), r.neg.end(), [&](std::uint32_t a) { return run.val[a] != 0; });
            std::uint32_t cnt = 0;
            for (auto a : r.pos) {
                if (layer[a] == target)
                    ++cnt;
                else if (!run.val[a])
                    dead = true;
            }
            missing[ri] = dead ? UINT32_MAX : cnt;
            if (!dead && cnt == 0) fire(ri);
        }
        for (std::size_t qi = 0; qi < queue.size(); ++qi)
            for (auto ri : occ[queue[qi]])
                if (missing[ri] != UINT32_MAX && --missing[ri] == 0) fire(ri);
    }

    Run run(const Bits& m1) const {
        Run r;
        const std::size_t n = g23.atom_count();
        r.val.assign(n, 0);
        r.support.assign(n, -1);
        for (std::uint32_t a = 0; a < n; ++a)
            if (layer[a] == 1 && to_p1[a] >= 0) r.val[a] = m1[static_cast<std::size_t>(to_p1[a])];
        std::vector<std::uint32_t> missing(g23.rules.size(), 0);
        lfp(r, p2_rules, 2, missing);
        lfp(r, p3_rules, 3, missing);
        for (auto ri : constraints) {
            const auto& c = g23.rules[ri];
            if (missing[ri] == 0) {
                r.violated = ri;
                break;
            }
            (void)c;
        }
        return r;
    }

    struct Explainer {
        const Impl& im;
        const Run& run;
        std::set<sat::Lit> lits;
        std::vector<char> seen_true, seen_false;

        Explainer(const Impl& i, const Run& r)
            : im(i), run(r), seen_true(i.g23.atom_count(), 0), seen_false(i.g23.atom_count(), 0) {}

        void p1_lit(std::uint32_t a, bool value) {
            auto id = im.to_p1[a];
            if (id < 0) return;
            lits.insert(sat::lit(static_cast<std::uint32_t>(id), value));
        }

        void rule_true(std::uint32_t ri, std::vector<std::uint32_t>& stack) {
            const auto& r = im.g23.rules[ri];
            for (auto a : r.pos) {
                if (im.layer[a] == 1)
                    p1_lit(a, true);
                else if (!seen_true[a])
                    stack.push_back(a);
            }
            for (auto a : r.neg) {
                if (im.layer[a] == 1)
                    p1_lit(a, false);
                else
                    explain_false(a);
            }
        }

        void explain_true(std::uint32_t atom) {
            std::vector<std::uint32_t> stack{atom};
            while (!stack.empty()) {
                auto a = stack.back();
                stack.pop_back();
                if (seen_true[a]) continue;
                seen_true[a] = 1;
                if (im.layer[a] == 1) {
                    p1_lit(a, true);
                    continue;
                }
                rule_true(static_cast<std::uint32_t>(run.support[a]), stack);
            }
        }

        void explain_false(std::uint32_t atom) {
            if (seen_false[atom]) return;
            seen_false[atom] = 1;
            if (im.layer[atom] == 1) {
                p1_lit(atom, false);
                return;
            }
            for (auto ri : im.by_head[atom]) {
                const auto& r = im.g23.rules[ri];
                std::optional<sat::Lit> fresh;
                bool settled = false;
                std::int64_t upper = -1;
                auto consider = [&](std::uint32_t a, bool value) {
                    auto id = im.to_p1[a];
                    if (id < 0) {
                        settled = true;
                        return;
                    }
                    sat::Lit l = sat::lit(static_cast<std::uint32_t>(id), value);
                    if (lits.count(l)) settled = true;
                    else if (!fresh) fresh = l;
                };
                for (auto a : r.pos) {
                    if (settled) break;
                    if (run.val[a]) continue;
                    if (im.layer[a] == 1)
                        consider(a, false);
                    else if (upper < 0)
                        upper = a;
                }
                for (auto a : r.neg) {
                    if (settled) break;
                    if (!run.val[a]) continue;
                    if (im.layer[a] == 1) consider(a, true);
                }
                if (settled) continue;
                if (fresh)
                    lits.insert(*fresh);
                else if (upper >= 0)
                    explain_false(static_cast<std::uint32_t>(upper));
                else
                    throw Error("internal: no blocking literal for a false atom");
            }
        }
    };
};

LayerEvaluator::LayerEvaluator(const RewriteOutput& out, const std::vector<Assertion>& abox)
    : impl_(std::make_unique<Impl>()) {
    auto& im = *impl_;
    im.preds = out.ctx.preds;
    LayeredProgram lp = stratify(out);
    HerbrandInterp facts = abox_facts(out, abox);
    im.g1 = datalog::ground_program(lp.p1, facts);
    log::debug("p1 grounding: {} atoms, {} rules", im.g1.atom_count(), im.g1.rules.size());

    DProgram upper = lp.p2;
    upper.append(lp.p3);
    HerbrandInterp base;
    for (std::uint32_t a = 0; a < im.g1.atom_count(); ++a) base.insert(im.g1.to_atom(a));
    im.g23 = datalog::ground_program(upper, base);

    const std::size_t n = im.g23.atom_count();
    im.layer.resize(n);
    im.to_p1.assign(n, -1);
    for (std::uint32_t a = 0; a < n; ++a) {
        im.layer[a] = im.layer_of(im.g23, a);
        if (im.layer[a] == 1) {
            if (auto id = im.g1.find(im.g23.to_atom(a))) im.to_p1[a] = *id;
        }
    }
    std::vector<GroundProgram::Rule> kept;
    for (auto& r : im.g23.rules) {
        if (r.head.size() == 1 && im.layer[r.head[0]] == 1) continue;
        kept.push_back(std::move(r));
    }
    im.g23.rules = std::move(kept);
    im.occ.resize(n);
    im.by_head.resize(n);
    for (std::uint32_t ri = 0; ri < im.g23.rules.size(); ++ri) {
        const auto& r = im.g23.rules[ri];
        int l = 3;
        if (!r.head.empty()) l = im.layer[r.head[0]];
        if (r.head.empty()) im.constraints.push_back(ri);
        (l == 2 ? im.p2_rules : im.p3_rules).push_back(ri);
        if (l == 2) im.by_head[r.head[0]].push_back(ri);
        for (auto a : r.pos)
            if (im.layer[a] == l) im.occ[a].push_back(ri);
    }
    log::debug("upper grounding: {} atoms, {} rules", n, im.g23.rules.size());

    im.prio.assign(im.g1.atom_count(), 0);
    for (std::uint32_t a = 0; a < im.g1.atom_count(); ++a) {
        const auto& name = im.g1.symbol_name(im.g1.pred_of(a));
        const PredInfo* info = im.preds.info(name);
        if (!info) continue;
        switch (info->role) {
        case PredRole::Concept:
        case PredRole::ConceptNeg:
        case PredRole::Role:
        case PredRole::RoleNeg: im.prio[a] = 3; break;
        case PredRole::In:
        case PredRole::Out: im.prio[a] = 2; break;
        case PredRole::ConceptFringe:
        case PredRole::ConceptFringeNeg:
        case PredRole::RoleFw:
        case PredRole::RoleBw:
        case PredRole::RoleFwNeg:
        case PredRole::RoleBwNeg: im.prio[a] = 1; break;
        case PredRole::Answer: {
            std::vector<std::string> tuple;
            for (auto s : im.g1.args_of(a)) tuple.push_back(im.g1.symbol_name(s));
            im.answers.push_back({a, std::move(tuple)});
            break;
        }
        default: break;
        }
    }
}

LayerEvaluator::~LayerEvaluator() = default;

const GroundProgram& LayerEvaluator::p1() const { return impl_->g1; }
const GroundProgram& LayerEvaluator::upper() const { return impl_->g23; }
const std::vector<std::pair<std::uint32_t, std::vector<std::string>>>& LayerEvaluator::answer_atoms() const {
    return impl_->answers;
}
int LayerEvaluator::priority(std::uint32_t atom) const { return impl_->prio[atom]; }

LayerEvaluator::Verdict LayerEvaluator::evaluate(const Bits& m1, bool explain) const {
    const auto& im = *impl_;
    auto run = im.run(m1);
    Verdict v;
    if (run.violated < 0) return v;
    v.survives = false;
    if (!explain) return v;
    Impl::Explainer ex(im, run);
    std::vector<std::uint32_t> stack;
    ex.rule_true(static_cast<std::uint32_t>(run.violated), stack);
    for (auto a : stack) ex.explain_true(a);
    v.reason.assign(ex.lits.begin(), ex.lits.end());
    return v;
}

HerbrandInterp LayerEvaluator::complete(const Bits& m1) const {
    const auto& im = *impl_;
    auto run = im.run(m1);
    HerbrandInterp out = datalog::from_bits(im.g1, m1);
    for (std::uint32_t a = 0; a < im.g23.atom_count(); ++a)
        if (im.layer[a] > 1 && run.val[a]) out.insert(im.g23.to_atom(a));
    return out;
}

// ---------------------------------------------------------------------------
// Certain answers

namespace {

void prepare(StableSolver& s, const LayerEvaluator& ev) {
    for (std::uint32_t a = 0; a < ev.p1().atom_count(); ++a)
        if (int p = ev.priority(a)) s.set_priority(a, p);
}

class Search {
public:
    Search(const LayerEvaluator& ev, const EngineOptions& opts, std::atomic<std::uint64_t>& explored)
        : ev_(ev), opts_(opts), explored_(explored), solver_(ev.p1()) {
        prepare(solver_, ev);
    }

    StableSolver& solver() { return solver_; }

    // Next p1 model that survives the upper layers.
    std::optional<Bits> next(const std::vector<sat::Lit>& assumptions = {}) {
        for (;;) {
            if (explored_.load() >= opts_.branch_limit)
                throw ResourceError("branch limit of " + std::to_string(opts_.branch_limit) + " candidates reached");
            auto m = solver_.next(assumptions, opts_.conflict_limit);
            if (!m) return std::nullopt;
            ++explored_;
            auto v = ev_.evaluate(*m);
            if (v.survives) return m;
            std::vector<sat::Lit> cl;
            for (auto l : v.reason) cl.push_back(sat::negate(l));
            if (!solver_.add_clause(cl)) return std::nullopt;
        }
    }

private:
    const LayerEvaluator& ev_;
    const EngineOptions& opts_;
    std::atomic<std::uint64_t>& explored_;
    StableSolver solver_;
};

void all_tuples(const std::vector<std::string>& dom, std::size_t arity, std::vector<std::string>& cur,
                std::set<std::vector<std::string>>& out) {
    if (cur.size() == arity) {
        out.insert(cur);
        return;
    }
    for (const auto& d : dom) {
        cur.push_back(d);
        all_tuples(dom, arity, cur, out);
        cur.pop_back();
    }
}

} // namespace

AnswerReport certain_answers(const RewriteOutput& out, const std::vector<Assertion>& abox, const EngineOptions& opts) {
    LayerEvaluator ev(out, abox);
    AnswerReport rep;
    std::atomic<std::uint64_t> explored{0};
    const auto& qs = ev.answer_atoms();
    const std::size_t arity = out.omq.query.answer_vars.size();

    auto inconsistent = [&] {
        rep.inconsistent = true;
        std::vector<std::string> cur;
        if (opts.goal) {
            rep.answers.insert(*opts.goal);
        } else {
            all_tuples(kb_individuals(out, abox), arity, cur, rep.answers);
        }
        rep.models_explored = explored.load();
        return rep;
    };

    Search main(ev, opts, explored);
    if (opts.goal) {
        if (opts.goal->size() != arity) throw Error("goal tuple has the wrong arity");
        std::vector<sat::Lit> assume;
        for (const auto& [a, t] : qs)
            if (t == *opts.goal) assume.push_back(sat::neg(a));
        if (main.next(assume)) {
            rep.models_explored = explored.load();
            return rep;
        }
        if (!assume.empty() && main.next()) {
            rep.answers.insert(*opts.goal);
            rep.models_explored = explored.load();
            return rep;
        }
        return inconsistent();
    }

    auto first = main.next();
    if (!first) return inconsistent();
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < qs.size(); ++i)
        if ((*first)[qs[i].first]) cand.push_back(i);
    log::debug("first surviving model holds {} answer atoms", cand.size());

    if (opts.jobs <= 1) {
        while (!cand.empty()) {
            std::vector<sat::Lit> cl;
            for (auto i : cand) cl.push_back(sat::neg(qs[i].first));
            if (!main.solver().add_clause(cl)) break;
            auto m = main.next();
            if (!m) break;
            std::vector<std::size_t> keep;
            for (auto i : cand)
                if ((*m)[qs[i].first]) keep.push_back(i);
            cand = std::move(keep);
        }
    } else {
        std::mutex mu;
        std::vector<char> alive(qs.size(), 0);
        for (auto i : cand) alive[i] = 1;
        std::atomic<std::size_t> cursor{0};
        std::exception_ptr failure;
        auto worker = [&] {
            try {
                Search s(ev, opts, explored);
                for (;;) {
                    std::size_t k = cursor++;
                    if (k >= cand.size()) return;
                    std::size_t i = cand[k];
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (!alive[i]) continue;
                    }
                    auto m = s.next({sat::neg(qs[i].first)});
                    if (!m) continue;
                    std::lock_guard<std::mutex> lock(mu);
                    for (auto j : cand)
                        if (!(*m)[qs[j].first]) alive[j] = 0;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < opts.jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
        std::vector<std::size_t> keep;
        for (auto i : cand)
            if (alive[i]) keep.push_back(i);
        cand = std::move(keep);
    }
    for (auto i : cand) rep.answers.insert(qs[i].second);
    rep.models_explored = explored.load();
    return rep;
}

bool verify_model(const RewriteOutput& out, const std::vector<Assertion>& abox, const HerbrandInterp& model) {
    for (const auto& a : model) pred_info(out.ctx.preds, a);
    GroundProgram g = datalog::ground_program(out.program, abox_facts(out, abox));
    bool outside = false;
    Bits b = datalog::to_bits(g, model, &outside);
    if (outside) return false;
    return datalog::is_stable_model(g, b);
}

std::uint64_t enumerate_p1(const RewriteOutput& out, const std::vector<Assertion>& abox,
                           const std::function<void(const HerbrandInterp&, bool)>& visit, const EngineOptions& opts) {
    LayerEvaluator ev(out, abox);
    StableSolver s(ev.p1());
    prepare(s, ev);
    std::uint64_t count = 0;
    while (auto m = s.next({}, opts.conflict_limit)) {
        if (++count > opts.branch_limit)
            throw ResourceError("branch limit of " + std::to_string(opts.branch_limit) + " candidates reached");
        visit(datalog::from_bits(ev.p1(), *m), ev.evaluate(*m, false).survives);
        s.block(*m);
    }
    return count;
}

DProgram ground_p1(const RewriteOutput& out, const std::vector<Assertion>& abox) {
    return datalog::ground_program(stratify(out).p1, abox_facts(out, abox)).to_program();
}

Core project_core(const RewriteOutput& out, const std::vector<std::string>& individuals,
                  const datalog::HerbrandInterp& model) {
    Core core;
    core.individuals = individuals;
    for (const auto& a : model) {
        const PredInfo* pi = out.ctx.preds.info(a.pred);
        if (!pi) continue;
        std::vector<std::string> args;
        for (const auto& t : a.args) args.push_back(t.name);
        const int fringe = static_cast<int>(pi->index) - 1;
        switch (pi->role) {
        case PredRole::Concept: core.concept_ext[pi->symbol].insert({args[0], -1}); break;
        case PredRole::ConceptFringe: core.concept_ext[pi->symbol].insert({args[0], fringe}); break;
        case PredRole::Role: core.role_ext[pi->symbol].insert({{args[0], -1}, {args[1], -1}}); break;
        case PredRole::RoleFw: core.role_ext[pi->symbol].insert({{args[0], -1}, {args[0], fringe}}); break;
        case PredRole::RoleBw: core.role_ext[pi->symbol].insert({{args[0], fringe}, {args[0], -1}}); break;
        case PredRole::In: core.fringe.insert({args[0], pi->index - 1}); break;
        default: break;
        }
    }
    return core;
}

} // namespace omq
