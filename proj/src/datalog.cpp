// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/datalog.hpp"

#include "omq/error.hpp"
#include "omq/sat.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace omq::datalog {

namespace {

bool plain_constant(const std::string& s) {
    if (s.empty()) return false;
    bool digits = std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
    if (digits) return true;
    if (!std::islower(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

void join_atoms(std::ostringstream& os, const std::vector<DAtom>& atoms, const char* sep, bool& first,
                const char* prefix = "") {
    for (const auto& a : atoms) {
        if (!first) os << sep;
        first = false;
        os << prefix << a.str();
    }
}

} // namespace

std::string term_text(const DTerm& t) {
    if (t.is_var || plain_constant(t.name)) return t.name;
    std::string out = "\"";
    for (char c : t.name) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

bool DAtom::ground() const {
    return std::none_of(args.begin(), args.end(), [](const DTerm& t) { return t.is_var; });
}

std::string DAtom::str() const {
    if (args.empty()) return pred;
    std::string out = pred + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ",";
        out += term_text(args[i]);
    }
    return out + ")";
}

DAtom atom(std::string pred, std::vector<DTerm> args) { return DAtom{std::move(pred), std::move(args)}; }

std::string DRule::str() const {
    std::ostringstream os;
    bool first = true;
    join_atoms(os, head, " | ", first);
    if (pos.empty() && neg.empty() && neq.empty()) {
        os << ".";
        return os.str();
    }
    os << (head.empty() ? ":- " : " :- ");
    first = true;
    join_atoms(os, pos, ", ", first);
    join_atoms(os, neg, ", ", first, "not ");
    for (const auto& [a, b] : neq) {
        if (!first) os << ", ";
        first = false;
        os << term_text(a) << " != " << term_text(b);
    }
    os << ".";
    return os.str();
}

bool is_safe(const DRule& r) {
    std::set<std::string> bound;
    for (const auto& a : r.pos)
        for (const auto& t : a.args)
            if (t.is_var) bound.insert(t.name);
    auto ok = [&](const DTerm& t) { return !t.is_var || bound.count(t.name) > 0; };
    for (const auto* group : {&r.head, &r.neg})
        for (const auto& a : *group)
            if (!std::all_of(a.args.begin(), a.args.end(), ok)) return false;
    for (const auto& [a, b] : r.neq)
        if (!ok(a) || !ok(b)) return false;
    return true;
}

void DProgram::add(DRule r) {
    for (const auto* group : {&r.head, &r.pos, &r.neg}) {
        for (const auto& a : *group) {
            auto [it, fresh] = arities.emplace(a.pred, a.args.size());
            if (!fresh && it->second != a.args.size())
                throw Error("predicate '" + a.pred + "' used with arities " + std::to_string(it->second) +
                            " and " + std::to_string(a.args.size()));
        }
    }
    if (!is_safe(r)) throw Error("unsafe rule: " + r.str());
    rules.push_back(std::move(r));
}

void DProgram::append(const DProgram& other) {
    for (const auto& r : other.rules) add(r);
}

std::size_t DProgram::max_arity() const {
    std::size_t m = 0;
    for (const auto& [p, a] : arities) m = std::max(m, a);
    return m;
}

std::size_t GroundProgram::KeyHash::operator()(const std::vector<std::uint32_t>& v) const {
    std::size_t h = v.size();
    for (auto x : v) h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::uint32_t GroundProgram::symbol(const std::string& s) {
    auto it = symbol_ids_.find(s);
    if (it != symbol_ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(symbols_.size());
    symbols_.push_back(s);
    symbol_ids_.emplace(s, id);
    return id;
}

std::optional<std::uint32_t> GroundProgram::find_symbol(const std::string& s) const {
    auto it = symbol_ids_.find(s);
    if (it == symbol_ids_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t GroundProgram::intern(std::uint32_t pred, const std::vector<std::uint32_t>& args) {
    std::vector<std::uint32_t> key;
    key.reserve(args.size() + 1);
    key.push_back(pred);
    key.insert(key.end(), args.begin(), args.end());
    auto it = atom_ids_.find(key);
    if (it != atom_ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(atoms_.size());
    atoms_.push_back(GAtom{pred, args});
    atom_ids_.emplace(std::move(key), id);
    return id;
}

std::uint32_t GroundProgram::intern(const DAtom& a) {
    std::vector<std::uint32_t> args;
    for (const auto& t : a.args) {
        if (t.is_var) throw Error("non-ground atom " + a.str());
        args.push_back(symbol(t.name));
    }
    return intern(symbol(a.pred), args);
}

std::optional<std::uint32_t> GroundProgram::find(const DAtom& a) const {
    std::vector<std::uint32_t> key;
    auto p = find_symbol(a.pred);
    if (!p) return std::nullopt;
    key.push_back(*p);
    for (const auto& t : a.args) {
        if (t.is_var) return std::nullopt;
        auto s = find_symbol(t.name);
        if (!s) return std::nullopt;
        key.push_back(*s);
    }
    auto it = atom_ids_.find(key);
    if (it == atom_ids_.end()) return std::nullopt;
    return it->second;
}

DAtom GroundProgram::to_atom(std::uint32_t id) const {
    DAtom a;
    a.pred = symbols_[atoms_[id].pred];
    for (auto s : atoms_[id].args) a.args.push_back(DTerm::cst(symbols_[s]));
    return a;
}

DProgram GroundProgram::to_program() const {
    DProgram p;
    for (const auto& r : rules) {
        DRule d;
        for (auto h : r.head) d.head.push_back(to_atom(h));
        for (auto b : r.pos) d.pos.push_back(to_atom(b));
        for (auto b : r.neg) d.neg.push_back(to_atom(b));
        p.add(std::move(d));
    }
    return p;
}

void GroundProgram::compact() {
    std::vector<std::uint32_t> remap(atoms_.size(), UINT32_MAX);
    std::vector<GAtom> kept;
    auto touch = [&](std::uint32_t a) {
        if (remap[a] == UINT32_MAX) {
            remap[a] = static_cast<std::uint32_t>(kept.size());
            kept.push_back(atoms_[a]);
        }
        return remap[a];
    };
    std::vector<std::uint32_t> order;
    for (auto& r : rules)
        for (auto* v : {&r.head, &r.pos, &r.neg})
            for (auto a : *v) order.push_back(a);
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    for (auto a : order) touch(a);
    for (auto& r : rules)
        for (auto* v : {&r.head, &r.pos, &r.neg})
            for (auto& a : *v) a = remap[a];
    atoms_ = std::move(kept);
    atom_ids_.clear();
    for (std::uint32_t i = 0; i < atoms_.size(); ++i) {
        std::vector<std::uint32_t> key{atoms_[i].pred};
        key.insert(key.end(), atoms_[i].args.begin(), atoms_[i].args.end());
        atom_ids_.emplace(std::move(key), i);
    }
}

namespace {

// Compiled rule over symbol ids; variables are numbered per rule.
struct CTerm {
    bool is_var;
    std::uint32_t id;  // variable index or symbol
};
struct CAtom {
    std::uint32_t pred;
    std::vector<CTerm> args;
};
struct CRule {
    std::vector<CAtom> head, pos, neg;
    std::vector<std::pair<CTerm, CTerm>> neq;
    std::size_t nvars = 0;
    std::vector<std::vector<std::size_t>> orders;  // join order per delta position
};

class Grounder {
public:
    Grounder(const DProgram& p, const HerbrandInterp& facts) {
        for (const auto& r : p.rules) rules_.push_back(compile(r));
        for (const auto& f : facts) {
            if (!f.ground()) throw Error("non-ground fact " + f.str());
            auto id = g_.intern(f);
            g_.rules.push_back({{id}, {}, {}});
            derive(id, 0);
        }
    }

    GroundProgram run() {
        // round 0: rules with empty positive body
        for (std::size_t ri = 0; ri < rules_.size(); ++ri) {
            if (!rules_[ri].pos.empty()) continue;
            std::vector<std::uint32_t> bind(rules_[ri].nvars, UINT32_MAX);
            emit(rules_[ri], bind, 0);
        }
        std::uint32_t round = 1;
        while (true) {
            if (latest_round_ != round - 1) break;
            std::set<std::uint32_t> delta_preds;
            for (const auto& [pred, last] : pred_round_)
                if (last == round - 1) delta_preds.insert(pred);
            for (auto& r : rules_) {
                for (std::size_t j = 0; j < r.pos.size(); ++j) {
                    if (!delta_preds.count(r.pos[j].pred)) continue;
                    std::vector<std::uint32_t> bind(r.nvars, UINT32_MAX);
                    join(r, j, 0, bind, round);
                }
            }
            ++round;
        }
        // drop negated atoms that are never derivable
        for (auto& rule : g_.rules) {
            std::vector<std::uint32_t> keep;
            for (auto a : rule.neg)
                if (a < derivable_.size() && derivable_[a]) keep.push_back(a);
            rule.neg = std::move(keep);
        }
        g_.compact();
        return std::move(g_);
    }

private:
    CRule compile(const DRule& r) {
        CRule c;
        std::map<std::string, std::uint32_t> vars;
        auto term = [&](const DTerm& t) {
            if (!t.is_var) return CTerm{false, g_.symbol(t.name)};
            auto [it, fresh] = vars.emplace(t.name, static_cast<std::uint32_t>(vars.size()));
            (void)fresh;
            return CTerm{true, it->second};
        };
        auto conv = [&](const DAtom& a) {
            CAtom ca{g_.symbol(a.pred), {}};
            for (const auto& t : a.args) ca.args.push_back(term(t));
            return ca;
        };
        for (const auto& a : r.pos) c.pos.push_back(conv(a));
        for (const auto& a : r.head) c.head.push_back(conv(a));
        for (const auto& a : r.neg) c.neg.push_back(conv(a));
        for (const auto& [a, b] : r.neq) c.neq.emplace_back(term(a), term(b));
        c.nvars = vars.size();
        if (!is_safe(r)) throw Error("unsafe rule: " + r.str());
        for (std::size_t j = 0; j < c.pos.size(); ++j) c.orders.push_back(order_from(c, j));
        return c;
    }

    static std::vector<std::size_t> order_from(const CRule& c, std::size_t start) {
        std::vector<std::size_t> order{start};
        std::vector<char> used(c.pos.size(), 0), bound(c.nvars, 0);
        used[start] = 1;
        for (const auto& t : c.pos[start].args)
            if (t.is_var) bound[t.id] = 1;
        while (order.size() < c.pos.size()) {
            std::size_t best = SIZE_MAX;
            int best_score = -1;
            for (std::size_t i = 0; i < c.pos.size(); ++i) {
                if (used[i]) continue;
                int score = 0;
                for (const auto& t : c.pos[i].args)
                    if (!t.is_var || bound[t.id]) ++score;
                if (c.pos[i].args.empty()) score = 1000;
                if (score > best_score) {
                    best_score = score;
                    best = i;
                }
            }
            used[best] = 1;
            order.push_back(best);
            for (const auto& t : c.pos[best].args)
                if (t.is_var) bound[t.id] = 1;
        }
        return order;
    }

    void derive(std::uint32_t id, std::uint32_t round) {
        if (id >= derivable_.size()) {
            derivable_.resize(id + 1, 0);
            round_of_.resize(id + 1, 0);
        }
        if (derivable_[id]) return;
        derivable_[id] = 1;
        round_of_[id] = round;
        latest_round_ = round;
        std::uint32_t pred = g_.pred_of(id);
        pred_round_[pred] = round;
        by_pred_[pred].push_back(id);
        const auto& args = g_.args_of(id);
        for (std::size_t i = 0; i < args.size(); ++i) index_[key(pred, i, args[i])].push_back(id);
    }

    static std::uint64_t key(std::uint32_t pred, std::size_t pos, std::uint32_t value) {
        return (static_cast<std::uint64_t>(pred) << 40) ^ (static_cast<std::uint64_t>(pos) << 32) ^ value;
    }

    // Admissible rounds for body position `i` when position `delta` is the delta.
    static bool admissible(std::uint32_t atom_round, std::size_t i, std::size_t delta, std::uint32_t round) {
        if (i == delta) return atom_round == round - 1;
        if (i < delta) return atom_round < round - 1;
        return atom_round <= round - 1;
    }

    void join(const CRule& r, std::size_t delta, std::size_t depth, std::vector<std::uint32_t>& bind,
              std::uint32_t round) {
        const auto& order = r.orders[delta];
        if (depth == order.size()) {
            emit(r, bind, round);
            return;
        }
        std::size_t bi = order[depth];
        const CAtom& pat = r.pos[bi];
        const std::vector<std::uint32_t>* cands = nullptr;
        static const std::vector<std::uint32_t> empty;
        for (std::size_t i = 0; i < pat.args.size(); ++i) {
            const auto& t = pat.args[i];
            std::uint32_t v = t.is_var ? bind[t.id] : t.id;
            if (v == UINT32_MAX) continue;
            auto it = index_.find(key(pat.pred, i, v));
            const auto* list = it == index_.end() ? &empty : &it->second;
            if (!cands || list->size() < cands->size()) cands = list;
        }
        if (!cands) {
            auto it = by_pred_.find(pat.pred);
            cands = it == by_pred_.end() ? &empty : &it->second;
        }
        // the candidate list may grow while emitting; iterate by index over the current size
        std::size_t n = cands->size();
        for (std::size_t ci = 0; ci < n; ++ci) {
            std::uint32_t a = (*cands)[ci];
            if (g_.pred_of(a) != pat.pred) continue;
            if (!admissible(round_of_[a], bi, delta, round)) continue;
            const auto& args = g_.args_of(a);
            std::vector<std::uint32_t> newly;
            bool ok = true;
            for (std::size_t i = 0; i < args.size() && ok; ++i) {
                const auto& t = pat.args[i];
                if (!t.is_var) {
                    ok = t.id == args[i];
                } else if (bind[t.id] == UINT32_MAX) {
                    bind[t.id] = args[i];
                    newly.push_back(t.id);
                } else {
                    ok = bind[t.id] == args[i];
                }
            }
            if (ok) join(r, delta, depth + 1, bind, round);
            for (auto v : newly) bind[v] = UINT32_MAX;
        }
    }

    std::uint32_t instantiate(const CAtom& a, const std::vector<std::uint32_t>& bind) {
        std::vector<std::uint32_t> args;
        args.reserve(a.args.size());
        for (const auto& t : a.args) args.push_back(t.is_var ? bind[t.id] : t.id);
        return g_.intern(a.pred, args);
    }

    void emit(const CRule& r, const std::vector<std::uint32_t>& bind, std::uint32_t round) {
        for (const auto& [a, b] : r.neq) {
            std::uint32_t x = a.is_var ? bind[a.id] : a.id;
            std::uint32_t y = b.is_var ? bind[b.id] : b.id;
            if (x == y) return;
        }
        GroundProgram::Rule gr;
        for (const auto& a : r.pos) gr.pos.push_back(instantiate(a, bind));
        for (const auto& a : r.neg) gr.neg.push_back(instantiate(a, bind));
        for (const auto& a : r.head) gr.head.push_back(instantiate(a, bind));
        for (auto h : gr.head) derive(h, round);
        g_.rules.push_back(std::move(gr));
    }

    GroundProgram g_;
    std::vector<CRule> rules_;
    std::vector<char> derivable_;
    std::vector<std::uint32_t> round_of_;
    std::uint32_t latest_round_ = 0;
    std::unordered_map<std::uint32_t, std::uint32_t> pred_round_;
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_pred_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> index_;
};

} // namespace

GroundProgram ground_program(const DProgram& p, const HerbrandInterp& facts) {
    return Grounder(p, facts).run();
}

DProgram ground(const DProgram& p, const HerbrandInterp& facts) { return ground_program(p, facts).to_program(); }

GroundProgram intern_ground(const DProgram& p) {
    GroundProgram g;
    for (const auto& r : p.rules) {
        if (!r.neq.empty()) throw Error("built-in inequality in ground program: " + r.str());
        GroundProgram::Rule gr;
        for (const auto& a : r.head) gr.head.push_back(g.intern(a));
        for (const auto& a : r.pos) gr.pos.push_back(g.intern(a));
        for (const auto& a : r.neg) gr.neg.push_back(g.intern(a));
        g.rules.push_back(std::move(gr));
    }
    return g;
}

Bits to_bits(const GroundProgram& g, const HerbrandInterp& i, bool* outside) {
    Bits b(g.atom_count(), 0);
    if (outside) *outside = false;
    for (const auto& a : i) {
        auto id = g.find(a);
        if (id && *id < b.size())
            b[*id] = 1;
        else if (outside)
            *outside = true;
    }
    return b;
}

HerbrandInterp from_bits(const GroundProgram& g, const Bits& b) {
    HerbrandInterp out;
    for (std::uint32_t a = 0; a < b.size(); ++a)
        if (b[a]) out.insert(g.to_atom(a));
    return out;
}

GroundProgram gl_reduct(const GroundProgram& g, const Bits& i) {
    GroundProgram out = g;
    out.rules.clear();
    for (const auto& r : g.rules) {
        if (std::any_of(r.neg.begin(), r.neg.end(), [&](std::uint32_t a) { return i[a] != 0; })) continue;
        out.rules.push_back({r.head, r.pos, {}});
    }
    return out;
}

DProgram gl_reduct(const DProgram& ground, const HerbrandInterp& i) {
    DProgram out;
    for (const auto& r : ground.rules) {
        for (const auto* group : {&r.head, &r.pos, &r.neg})
            for (const auto& a : *group)
                if (!a.ground()) throw Error("gl_reduct on non-ground rule: " + r.str());
        if (!r.neq.empty()) throw Error("gl_reduct on rule with inequality: " + r.str());
        if (std::any_of(r.neg.begin(), r.neg.end(), [&](const DAtom& a) { return i.count(a) > 0; })) continue;
        DRule d = r;
        d.neg.clear();
        out.add(std::move(d));
    }
    return out;
}

Bits least_model(const GroundProgram& g, const Bits* allowed) {
    std::size_t n = g.atom_count();
    Bits m(n, 0);
    std::vector<std::vector<std::uint32_t>> watch(n);
    std::vector<std::size_t> missing(g.rules.size(), 0);
    std::vector<std::uint32_t> queue;
    auto fire = [&](std::size_t ri) {
        std::uint32_t h = g.rules[ri].head[0];
        if (m[h] || (allowed && !(*allowed)[h])) return;
        m[h] = 1;
        queue.push_back(h);
    };
    for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
        const auto& r = g.rules[ri];
        if (r.head.size() != 1 || !r.neg.empty()) continue;
        missing[ri] = r.pos.size();
        for (auto b : r.pos) watch[b].push_back(static_cast<std::uint32_t>(ri));
        if (r.pos.empty()) fire(ri);
    }
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        for (auto ri : watch[queue[qi]])
            if (--missing[ri] == 0) fire(ri);
    }
    return m;
}

bool is_model(const GroundProgram& g, const Bits& i) {
    for (const auto& r : g.rules) {
        if (!std::all_of(r.pos.begin(), r.pos.end(), [&](std::uint32_t a) { return i[a]; })) continue;
        if (std::any_of(r.neg.begin(), r.neg.end(), [&](std::uint32_t a) { return i[a]; })) continue;
        if (!std::any_of(r.head.begin(), r.head.end(), [&](std::uint32_t a) { return i[a]; })) return false;
    }
    return true;
}

bool is_stable_model(const GroundProgram& g, const Bits& i) {
    if (i.size() != g.atom_count() || !is_model(g, i)) return false;
    GroundProgram red = gl_reduct(g, i);
    bool disjunctive = std::any_of(red.rules.begin(), red.rules.end(), [](const auto& r) { return r.head.size() > 1; });
    if (!disjunctive) {
        Bits lm = least_model(red);
        for (std::size_t a = 0; a < i.size(); ++a)
            if (lm[a] != i[a]) return false;
        return true;
    }
    // Minimality: no proper subset of i models the reduct.
    sat::Solver s;
    std::vector<std::uint32_t> var(i.size(), UINT32_MAX);
    std::vector<sat::Lit> smaller;
    for (std::uint32_t a = 0; a < i.size(); ++a) {
        if (!i[a]) continue;
        var[a] = s.new_var();
        smaller.push_back(sat::neg(var[a]));
    }
    if (smaller.empty()) return true;
    for (const auto& r : red.rules) {
        if (!std::all_of(r.pos.begin(), r.pos.end(), [&](std::uint32_t a) { return i[a]; })) continue;
        std::vector<sat::Lit> cl;
        for (auto h : r.head)
            if (i[h]) cl.push_back(sat::pos(var[h]));
        for (auto b : r.pos) cl.push_back(sat::neg(var[b]));
        s.add_clause(cl);
    }
    s.add_clause(smaller);
    return s.solve() == sat::Result::Unsat;
}

bool is_stable_model(const DProgram& ground, const HerbrandInterp& i) {
    GroundProgram g = intern_ground(ground);
    bool outside = false;
    Bits b = to_bits(g, i, &outside);
    if (outside) return false;
    return is_stable_model(g, b);
}

std::vector<HerbrandInterp> stable_models_bruteforce(const GroundProgram& g, std::size_t max_atoms) {
    std::size_t n = g.atom_count();
    if (n > max_atoms)
        throw ResourceError("brute-force stable models: " + std::to_string(n) + " atoms exceed the cap of " +
                            std::to_string(max_atoms));
    std::vector<HerbrandInterp> out;
    Bits b(n, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        for (std::size_t a = 0; a < n; ++a) b[a] = (mask >> a) & 1u;
        if (is_stable_model(g, b)) out.push_back(from_bits(g, b));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<HerbrandInterp> stable_models_bruteforce(const DProgram& ground, std::size_t max_atoms) {
    return stable_models_bruteforce(intern_ground(ground), max_atoms);
}

std::string emit_text(const DProgram& p) {
    std::string out;
    for (const auto& r : p.rules) {
        out += r.str();
        out += '\n';
    }
    return out;
}

namespace {

class AtomReader {
public:
    explicit AtomReader(const std::string& s) : s_(s) {}

    DAtom read() {
        skip();
        DAtom a;
        a.pred = ident();
        skip();
        if (i_ < s_.size() && s_[i_] == '(') {
            ++i_;
            for (;;) {
                skip();
                a.args.push_back(DTerm::cst(term()));
                skip();
                if (i_ < s_.size() && s_[i_] == ',') {
                    ++i_;
                    continue;
                }
                if (i_ < s_.size() && s_[i_] == ')') {
                    ++i_;
                    break;
                }
                fail("expected ',' or ')'");
            }
        }
        return a;
    }

    bool at_end() {
        skip();
        return i_ >= s_.size();
    }

private:
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw Error("malformed atom '" + s_ + "' at offset " + std::to_string(i_) + ": " + what);
    }
    std::string ident() {
        std::size_t b = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
        if (b == i_) fail("expected a name");
        return s_.substr(b, i_ - b);
    }
    std::string term() {
        if (i_ < s_.size() && s_[i_] == '"') {
            std::string out;
            ++i_;
            while (i_ < s_.size() && s_[i_] != '"') {
                if (s_[i_] == '\\' && i_ + 1 < s_.size()) ++i_;
                out += s_[i_++];
            }
            if (i_ >= s_.size()) fail("unterminated string");
            ++i_;
            return out;
        }
        std::size_t b = i_;
        if (i_ < s_.size() && s_[i_] == '-') ++i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
        if (b == i_) fail("expected a constant");
        return s_.substr(b, i_ - b);
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

} // namespace

DAtom parse_atom(const std::string& text) {
    AtomReader r(text);
    DAtom a = r.read();
    if (!r.at_end()) throw Error("trailing input after atom '" + text + "'");
    return a;
}

std::vector<HerbrandInterp> parse_models(const std::string& text) {
    std::vector<HerbrandInterp> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '%' || line[first] == '#') continue;
        HerbrandInterp m;
        std::string cur;
        int depth = 0;
        bool quoted = false;
        auto flush = [&] {
            if (!cur.empty()) m.insert(parse_atom(cur));
            cur.clear();
        };
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            if (!quoted && c == '(') ++depth;
            if (!quoted && c == ')') --depth;
            if (!quoted && depth == 0 && std::isspace(static_cast<unsigned char>(c))) {
                flush();
                continue;
            }
            cur += c;
        }
        flush();
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace omq::datalog
