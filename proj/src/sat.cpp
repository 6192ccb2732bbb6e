// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/sat.hpp"

#include <algorithm>
#include <limits>

namespace omq::sat {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0;
};

double luby(double y, int x) {
    int size = 1, seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    double r = 1;
    for (int i = 0; i < seq; ++i) r *= y;
    return r;
}

} // namespace

struct Solver::Impl {
    std::vector<Clause> clauses;
    std::vector<std::vector<std::uint32_t>> watches;
    std::vector<signed char> assigns;
    std::vector<char> phase;
    std::vector<std::uint32_t> reason;
    std::vector<int> level;
    std::vector<double> activity;
    std::vector<int> priority;
    std::vector<char> seen;
    std::vector<Lit> trail;
    std::vector<std::size_t> trail_lim;
    std::size_t qhead = 0;
    std::vector<std::uint32_t> heap;
    std::vector<int> heap_pos;
    std::vector<char> model;
    double var_inc = 1, cla_inc = 1;
    bool ok = true;
    std::uint64_t n_conflicts = 0, n_decisions = 0;
    std::size_t n_learnts = 0;
    double max_learnts = 0;

    int value(Lit l) const {
        int a = assigns[var_of(l)];
        return sign_of(l) ? a : -a;
    }
    int decision_level() const { return static_cast<int>(trail_lim.size()); }

    bool before(std::uint32_t a, std::uint32_t b) const {
        if (priority[a] != priority[b]) return priority[a] > priority[b];
        if (activity[a] != activity[b]) return activity[a] > activity[b];
        return a < b;
    }
    void heap_up(std::size_t i) {
        std::uint32_t v = heap[i];
        while (i > 0) {
            std::size_t p = (i - 1) / 2;
            if (!before(v, heap[p])) break;
            heap[i] = heap[p];
            heap_pos[heap[i]] = static_cast<int>(i);
            i = p;
        }
        heap[i] = v;
        heap_pos[v] = static_cast<int>(i);
    }
    void heap_down(std::size_t i) {
        std::uint32_t v = heap[i];
        for (;;) {
            std::size_t c = 2 * i + 1;
            if (c >= heap.size()) break;
            if (c + 1 < heap.size() && before(heap[c + 1], heap[c])) ++c;
            if (!before(heap[c], v)) break;
            heap[i] = heap[c];
            heap_pos[heap[i]] = static_cast<int>(i);
            i = c;
        }
        heap[i] = v;
        heap_pos[v] = static_cast<int>(i);
    }
    void heap_insert(std::uint32_t v) {
        if (heap_pos[v] >= 0) return;
        heap.push_back(v);
        heap_pos[v] = static_cast<int>(heap.size() - 1);
        heap_up(heap.size() - 1);
    }
    std::uint32_t heap_pop() {
        std::uint32_t v = heap[0];
        heap_pos[v] = -1;
        heap[0] = heap.back();
        heap.pop_back();
        if (!heap.empty()) {
            heap_pos[heap[0]] = 0;
            heap_down(0);
        }
        return v;
    }

    void bump_var(std::uint32_t v) {
        activity[v] += var_inc;
        if (activity[v] > 1e100) {
            for (auto& a : activity) a *= 1e-100;
            var_inc *= 1e-100;
        }
        if (heap_pos[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos[v]));
    }
    void bump_clause(Clause& c) {
        c.activity += cla_inc;
        if (c.activity > 1e20) {
            for (auto& cl : clauses)
                if (cl.learnt) cl.activity *= 1e-20;
            cla_inc *= 1e-20;
        }
    }

    void enqueue(Lit l, std::uint32_t from) {
        std::uint32_t v = var_of(l);
        assigns[v] = sign_of(l) ? 1 : -1;
        reason[v] = from;
        level[v] = decision_level();
        trail.push_back(l);
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl) return;
        for (std::size_t i = trail.size(); i > trail_lim[static_cast<std::size_t>(lvl)]; --i) {
            std::uint32_t v = var_of(trail[i - 1]);
            phase[v] = assigns[v] > 0;
            assigns[v] = 0;
            reason[v] = kNone;
            heap_insert(v);
        }
        trail.resize(trail_lim[static_cast<std::size_t>(lvl)]);
        trail_lim.resize(static_cast<std::size_t>(lvl));
        qhead = trail.size();
    }

    std::uint32_t attach(std::vector<Lit> lits, bool learnt) {
        Clause c;
        c.lits = std::move(lits);
        c.learnt = learnt;
        auto ci = static_cast<std::uint32_t>(clauses.size());
        watches[c.lits[0]].push_back(ci);
        watches[c.lits[1]].push_back(ci);
        clauses.push_back(std::move(c));
        if (learnt) ++n_learnts;
        return ci;
    }

    std::uint32_t propagate() {
        std::uint32_t confl = kNone;
        while (qhead < trail.size() && confl == kNone) {
            Lit p = trail[qhead++];
            Lit fl = p ^ 1u;
            auto& ws = watches[fl];
            std::size_t i = 0, j = 0;
            while (i < ws.size()) {
                std::uint32_t ci = ws[i];
                Clause& c = clauses[ci];
                if (c.deleted) {
                    ++i;
                    continue;
                }
                if (c.lits[0] == fl) std::swap(c.lits[0], c.lits[1]);
                if (value(c.lits[0]) == 1) {
                    ws[j++] = ws[i++];
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.lits.size(); ++k) {
                    if (value(c.lits[k]) != -1) {
                        std::swap(c.lits[1], c.lits[k]);
                        watches[c.lits[1]].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) {
                    ++i;
                    continue;
                }
                ws[j++] = ws[i++];
                if (value(c.lits[0]) == -1) {
                    confl = ci;
                    while (i < ws.size()) ws[j++] = ws[i++];
                } else {
                    enqueue(c.lits[0], ci);
                }
            }
            ws.resize(j);
        }
        return confl;
    }

    void analyze(std::uint32_t confl, std::vector<Lit>& out, int& bt) {
        out.assign(1, 0);
        int path = 0;
        Lit p = 0;
        bool have_p = false;
        std::size_t index = trail.size();
        for (;;) {
            Clause& c = clauses[confl];
            if (c.learnt) bump_clause(c);
            for (Lit q : c.lits) {
                if (have_p && q == p) continue;
                std::uint32_t v = var_of(q);
                if (seen[v] || level[v] == 0) continue;
                seen[v] = 1;
                bump_var(v);
                if (level[v] >= decision_level())
                    ++path;
                else
                    out.push_back(q);
            }
            while (!seen[var_of(trail[--index])]) {
            }
            p = trail[index];
            have_p = true;
            seen[var_of(p)] = 0;
            --path;
            if (path == 0) break;
            confl = reason[var_of(p)];
        }
        out[0] = p ^ 1u;
        bt = 0;
        std::size_t max_i = 1;
        for (std::size_t i = 1; i < out.size(); ++i) {
            if (level[var_of(out[i])] > bt) {
                bt = level[var_of(out[i])];
                max_i = i;
            }
        }
        if (out.size() > 1) std::swap(out[1], out[max_i]);
        for (Lit l : out) seen[var_of(l)] = 0;
    }

    void reduce_db() {
        std::vector<std::uint32_t> cand;
        for (std::uint32_t i = 0; i < clauses.size(); ++i) {
            const Clause& c = clauses[i];
            if (!c.learnt || c.deleted || c.lits.size() <= 2) continue;
            std::uint32_t v = var_of(c.lits[0]);
            if (reason[v] == i && value(c.lits[0]) == 1) continue;
            cand.push_back(i);
        }
        std::sort(cand.begin(), cand.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (clauses[a].activity != clauses[b].activity) return clauses[a].activity < clauses[b].activity;
            return a < b;
        });
        for (std::size_t i = 0; i < cand.size() / 2; ++i) {
            clauses[cand[i]].deleted = true;
            clauses[cand[i]].lits.clear();
            clauses[cand[i]].lits.shrink_to_fit();
            --n_learnts;
        }
    }
};

Solver::Solver() : impl_(new Impl) {}
Solver::~Solver() { delete impl_; }

std::uint32_t Solver::new_var() {
    auto& s = *impl_;
    auto v = static_cast<std::uint32_t>(s.assigns.size());
    s.assigns.push_back(0);
    s.phase.push_back(0);
    s.reason.push_back(kNone);
    s.level.push_back(0);
    s.activity.push_back(0);
    s.priority.push_back(0);
    s.seen.push_back(0);
    s.heap_pos.push_back(-1);
    s.watches.emplace_back();
    s.watches.emplace_back();
    s.heap_insert(v);
    return v;
}

std::uint32_t Solver::num_vars() const { return static_cast<std::uint32_t>(impl_->assigns.size()); }
bool Solver::okay() const { return impl_->ok; }

void Solver::set_priority(std::uint32_t v, int priority) {
    auto& s = *impl_;
    s.priority[v] = priority;
    if (s.heap_pos[v] >= 0) {
        s.heap_up(static_cast<std::size_t>(s.heap_pos[v]));
        s.heap_down(static_cast<std::size_t>(s.heap_pos[v]));
    }
}

bool Solver::add_clause(std::vector<Lit> lits) {
    auto& s = *impl_;
    if (!s.ok) return false;
    s.cancel_until(0);
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<Lit> keep;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        if (i + 1 < lits.size() && lits[i + 1] == (lits[i] ^ 1u)) return true;
        int val = s.value(lits[i]);
        if (val == 1) return true;
        if (val == 0) keep.push_back(lits[i]);
    }
    if (keep.empty()) return s.ok = false;
    if (keep.size() == 1) {
        s.enqueue(keep[0], kNone);
        if (s.propagate() != kNone) s.ok = false;
        return s.ok;
    }
    s.attach(std::move(keep), false);
    return true;
}

Result Solver::solve(const std::vector<Lit>& assumptions, std::uint64_t conflict_limit) {
    auto& s = *impl_;
    if (!s.ok) return Result::Unsat;
    s.cancel_until(0);
    if (s.max_learnts == 0) s.max_learnts = static_cast<double>(s.clauses.size()) / 3 + 2000;
    std::uint64_t start = s.n_conflicts;
    int restarts = 0;
    std::uint64_t restart_at = s.n_conflicts + static_cast<std::uint64_t>(luby(2, restarts) * 100);
    std::vector<Lit> learnt;
    for (;;) {
        std::uint32_t confl = s.propagate();
        if (confl != kNone) {
            ++s.n_conflicts;
            if (s.decision_level() == 0) {
                s.ok = false;
                return Result::Unsat;
            }
            int bt = 0;
            s.analyze(confl, learnt, bt);
            s.cancel_until(bt);
            if (learnt.size() == 1) {
                s.enqueue(learnt[0], kNone);
            } else {
                std::uint32_t ci = s.attach(learnt, true);
                s.bump_clause(s.clauses[ci]);
                s.enqueue(learnt[0], ci);
            }
            s.var_inc /= 0.95;
            s.cla_inc /= 0.999;
            if (conflict_limit && s.n_conflicts - start >= conflict_limit) {
                s.cancel_until(0);
                return Result::Unknown;
            }
            if (s.n_conflicts >= restart_at) {
                s.cancel_until(0);
                ++restarts;
                restart_at = s.n_conflicts + static_cast<std::uint64_t>(luby(2, restarts) * 100);
            }
            continue;
        }
        if (static_cast<double>(s.n_learnts) >= s.max_learnts + static_cast<double>(s.trail.size())) {
            s.reduce_db();
            s.max_learnts *= 1.1;
        }
        Lit next = 0;
        bool have = false;
        while (static_cast<std::size_t>(s.decision_level()) < assumptions.size()) {
            Lit a = assumptions[static_cast<std::size_t>(s.decision_level())];
            if (s.value(a) == 1) {
                s.trail_lim.push_back(s.trail.size());
            } else if (s.value(a) == -1) {
                s.cancel_until(0);
                return Result::Unsat;
            } else {
                next = a;
                have = true;
                break;
            }
        }
        if (!have) {
            while (!s.heap.empty()) {
                std::uint32_t v = s.heap_pop();
                if (s.assigns[v] == 0) {
                    next = lit(v, s.phase[v]);
                    have = true;
                    break;
                }
            }
            if (!have) {
                s.model.assign(s.assigns.size(), 0);
                for (std::size_t v = 0; v < s.assigns.size(); ++v) s.model[v] = s.assigns[v] > 0;
                s.cancel_until(0);
                return Result::Sat;
            }
        }
        ++s.n_decisions;
        s.trail_lim.push_back(s.trail.size());
        s.enqueue(next, kNone);
    }
}

bool Solver::model_value(std::uint32_t v) const { return impl_->model[v] != 0; }
const std::vector<char>& Solver::model() const { return impl_->model; }
std::uint64_t Solver::conflicts() const { return impl_->n_conflicts; }
std::uint64_t Solver::decisions() const { return impl_->n_decisions; }

} // namespace omq::sat
