// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "support.hpp"

#include "omq/datalog.hpp"
#include "omq/error.hpp"

#include <doctest.h>

using namespace omq;
using namespace omq::datalog;
using test::interp;
using test::program;

namespace {

std::set<std::string> rule_strs(const DProgram& p) {
    std::set<std::string> out;
    for (const auto& r : p.rules) out.insert(r.str());
    return out;
}

// Textbook instantiation over every constant of the program and facts.
DProgram full_grounding(const DProgram& p, const HerbrandInterp& facts) {
    std::set<std::string> consts;
    auto collect = [&](const DAtom& a) {
        for (const auto& t : a.args)
            if (!t.is_var) consts.insert(t.name);
    };
    for (const auto& f : facts) collect(f);
    for (const auto& r : p.rules) {
        for (const auto* part : {&r.head, &r.pos, &r.neg})
            for (const auto& a : *part) collect(a);
    }
    std::vector<std::string> cs(consts.begin(), consts.end());
    DProgram out;
    for (const auto& f : facts) out.rules.push_back(DRule{{f}, {}, {}, {}});
    for (const auto& r : p.rules) {
        std::vector<std::string> vars;
        for (const auto* part : {&r.head, &r.pos, &r.neg})
            for (const auto& a : *part)
                for (const auto& t : a.args)
                    if (t.is_var && std::find(vars.begin(), vars.end(), t.name) == vars.end()) vars.push_back(t.name);
        std::vector<std::size_t> idx(vars.size(), 0);
        for (;;) {
            std::map<std::string, std::string> sub;
            for (std::size_t i = 0; i < vars.size(); ++i) sub[vars[i]] = cs[idx[i]];
            auto inst = [&](DAtom a) {
                for (auto& t : a.args)
                    if (t.is_var) t = DTerm::cst(sub[t.name]);
                return a;
            };
            auto value = [&](const DTerm& t) { return t.is_var ? sub[t.name] : t.name; };
            bool keep = true;
            for (const auto& [a, b] : r.neq) keep = keep && value(a) != value(b);
            if (keep) {
                DRule g;
                for (const auto& a : r.head) g.head.push_back(inst(a));
                for (const auto& a : r.pos) g.pos.push_back(inst(a));
                for (const auto& a : r.neg) g.neg.push_back(inst(a));
                out.rules.push_back(std::move(g));
            }
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == cs.size()) idx[i++] = 0;
            if (i == idx.size()) break;
        }
    }
    return out;
}

bool satisfies(const DProgram& g, const HerbrandInterp& i, bool reduct_of_i, const HerbrandInterp& base) {
    for (const auto& r : g.rules) {
        if (reduct_of_i && std::any_of(r.neg.begin(), r.neg.end(), [&](const DAtom& a) { return base.count(a) > 0; }))
            continue;
        bool body = std::all_of(r.pos.begin(), r.pos.end(), [&](const DAtom& a) { return i.count(a) > 0; });
        if (!reduct_of_i)
            body = body && std::none_of(r.neg.begin(), r.neg.end(), [&](const DAtom& a) { return i.count(a) > 0; });
        if (body && std::none_of(r.head.begin(), r.head.end(), [&](const DAtom& a) { return i.count(a) > 0; }))
            return false;
    }
    return true;
}

// Minimal models of the reduct, by subset enumeration.
std::set<HerbrandInterp> reference_stable_models(const DProgram& g) {
    std::set<DAtom> base;
    for (const auto& r : g.rules)
        for (const auto* part : {&r.head, &r.pos, &r.neg}) base.insert(part->begin(), part->end());
    std::vector<DAtom> atoms(base.begin(), base.end());
    REQUIRE(atoms.size() <= 16);
    std::set<HerbrandInterp> out;
    for (std::uint32_t m = 0; m < (1u << atoms.size()); ++m) {
        HerbrandInterp i;
        for (std::size_t k = 0; k < atoms.size(); ++k)
            if (m >> k & 1u) i.insert(atoms[k]);
        if (!satisfies(g, i, false, i)) continue;
        bool minimal = true;
        for (std::uint32_t s = (m - 1) & m; minimal; s = (s - 1) & m) {
            HerbrandInterp j;
            for (std::size_t k = 0; k < atoms.size(); ++k)
                if (s >> k & 1u) j.insert(atoms[k]);
            if (satisfies(g, j, true, i)) minimal = false;
            if (s == 0) break;
        }
        if (m == 0 || minimal) out.insert(i);
    }
    return out;
}

std::set<HerbrandInterp> as_set(const std::vector<HerbrandInterp>& v) { return {v.begin(), v.end()}; }

DProgram random_program(std::mt19937_64& rng) {
    const std::vector<std::string> unary{"p", "q"};
    const std::vector<std::string> vars{"X", "Y"};
    DProgram p;
    std::size_t rules = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    for (std::size_t i = 0; i < rules; ++i) {
        DRule r;
        auto term = [&] { return DTerm::var(vars[rng() % 2]); };
        auto any_atom = [&] {
            if (rng() % 3 == 0) return atom("e", {term(), term()});
            return atom(unary[rng() % 2], {term()});
        };
        r.pos.push_back(any_atom());
        if (rng() % 2) r.pos.push_back(any_atom());
        std::set<std::string> bound;
        for (const auto& a : r.pos)
            for (const auto& t : a.args) bound.insert(t.name);
        auto bound_atom = [&] {
            for (int tries = 0; tries < 20; ++tries) {
                auto a = any_atom();
                if (std::all_of(a.args.begin(), a.args.end(), [&](const DTerm& t) { return bound.count(t.name); }))
                    return std::optional<DAtom>(a);
            }
            return std::optional<DAtom>();
        };
        std::size_t heads = rng() % 5 == 0 ? 0 : rng() % 4 == 0 ? 2 : 1;
        for (std::size_t h = 0; h < heads; ++h)
            if (auto a = bound_atom()) r.head.push_back(*a);
        if (rng() % 2)
            if (auto a = bound_atom()) r.neg.push_back(*a);
        if (bound.size() == 2 && rng() % 3 == 0) r.neq.emplace_back(DTerm::var("X"), DTerm::var("Y"));
        p.add(std::move(r));
    }
    return p;
}

HerbrandInterp random_facts(std::mt19937_64& rng) {
    const std::vector<std::string> cs{"a", "b", "c"};
    HerbrandInterp f;
    for (const auto& c : cs) {
        if (rng() % 2) f.insert(atom("p", {DTerm::cst(c)}));
        if (rng() % 3 == 0) f.insert(atom("q", {DTerm::cst(c)}));
    }
    f.insert(atom("e", {DTerm::cst("a"), DTerm::cst(cs[rng() % 3])}));
    return f;
}

} // namespace

TEST_SUITE("datalog") {

TEST_CASE("grounding instantiates over derivable atoms") {
    auto g = ground(program("p(X) :- q(X)."), interp("q(a) q(b)"));
    auto rs = rule_strs(g);
    CHECK(rs.count("p(a) :- q(a)."));
    CHECK(rs.count("p(b) :- q(b)."));
    CHECK_FALSE(rs.count("p(a) :- q(b)."));
}

TEST_CASE("inequality prunes instances") {
    auto g = ground(program("r(X,Y) :- p(X), p(Y), X != Y."), interp("p(a) p(b)"));
    std::size_t r_rules = 0;
    for (const auto& r : g.rules)
        if (!r.head.empty() && r.head[0].pred == "r") {
            ++r_rules;
            CHECK(r.head[0].args[0] != r.head[0].args[1]);
            CHECK(r.neq.empty());
        }
    CHECK(r_rules == 2);
}

TEST_CASE("unsafe rules are rejected") {
    CHECK_THROWS_AS(program("p(X) :- not q(X)."), Error);
    CHECK_THROWS_AS(program("p(X) :- q(Y)."), Error);
    CHECK_THROWS_AS(program("p(X) :- q(X), X != Y."), Error);
    CHECK_THROWS_AS(program("p(a). p(a,b)."), Error);
    CHECK(is_safe(program("p(X) :- q(X), not r(X).").rules[0]));
}

TEST_CASE("reduct of an even loop") {
    auto p = program("a :- not b. b :- not a.");
    CHECK(rule_strs(gl_reduct(p, interp("a"))) == std::set<std::string>{"a."});
    CHECK(gl_reduct(p, interp("a b")).rules.empty());
    auto pos = program("a :- b. b.");
    CHECK(rule_strs(gl_reduct(pos, interp("a"))) == rule_strs(pos));
}

TEST_CASE("stable model checks") {
    auto loop = program("a :- not b. b :- not a.");
    CHECK(is_stable_model(loop, interp("a")));
    CHECK_FALSE(is_stable_model(loop, interp("a b")));
    auto disj = program("a | b.");
    CHECK(is_stable_model(disj, interp("a")));
    CHECK_FALSE(is_stable_model(disj, interp("a b")));
    auto closed = program("a | b. a :- b.");
    CHECK_FALSE(is_stable_model(closed, interp("b")));
    CHECK(is_stable_model(closed, interp("a")));
}

TEST_CASE("brute-force stable models") {
    CHECK(test::strs(stable_models_bruteforce(program("a | b."))) == std::set<std::string>{"{a}", "{b}"});
    CHECK(test::strs(stable_models_bruteforce(program(":- a. a | b."))) == std::set<std::string>{"{b}"});
    CHECK(test::strs(stable_models_bruteforce(DProgram{})) == std::set<std::string>{"{}"});
    CHECK(stable_models_bruteforce(program("a :- not a.")).empty());
}

TEST_CASE("emitted text") {
    CHECK(emit_text(program("tt(1).")) == "tt(1).\n");
    CHECK(emit_text(program("c_a1(X) :- ind(X), not nc_a1(X).")) == "c_a1(X) :- ind(X), not nc_a1(X).\n");
    CHECK(emit_text(program(":- marked(X1,X2,X3,X4,X5), fringetype(X1,X2,X3,X4,X5).")) ==
          ":- marked(X1,X2,X3,X4,X5), fringetype(X1,X2,X3,X4,X5).\n");
    CHECK(emit_text(program("a | b :- c, X != Y, d(X), e(Y).")) == "a | b :- c, d(X), e(Y), X != Y.\n");
    CHECK(term_text(DTerm::cst("c1")) == "c1");
    CHECK(term_text(DTerm::cst("Big")) != "Big");
}

TEST_CASE("models text round trip") {
    auto ms = parse_models("p(a) q(a,b)\n\nr\n");
    REQUIRE(ms.size() == 2);
    CHECK(ms[0].count(atom("q", {DTerm::cst("a"), DTerm::cst("b")})));
    CHECK(ms[1] == interp("r"));
}

TEST_CASE("least model and compaction") {
    auto g = intern_ground(program("a. b :- a. c :- b, d. e :- not a."));
    auto lm = from_bits(g, least_model(g));
    CHECK(lm == interp("a b"));
    auto before = g.atom_count();
    g.compact();
    CHECK(g.atom_count() == before);
}

TEST_CASE("property: relevance grounding matches the full grounding") {
    std::mt19937_64 rng(47);
    for (int n = 0; n < 300; ++n) {
        auto p = random_program(rng);
        auto facts = random_facts(rng);
        auto full = full_grounding(p, facts);
        auto want = reference_stable_models(full);
        auto got = as_set(stable_models_bruteforce(ground(p, facts)));
        CAPTURE(emit_text(p));
        CHECK(got == want);
        CHECK(as_set(stable_models_bruteforce(full)) == want);
    }
}

TEST_CASE("property: stable models of positive programs are the minimal models") {
    std::mt19937_64 rng(53);
    for (int n = 0; n < 300; ++n) {
        DProgram p;
        for (const auto& r : test::random_ground_program(rng, 6, 6).rules) {
            DRule q = r;
            q.neg.clear();
            p.add(q);
        }
        auto stable = as_set(stable_models_bruteforce(p));
        std::set<HerbrandInterp> minimal;
        std::vector<DAtom> atoms;
        for (int k = 0; k < 6; ++k) atoms.push_back(atom("p" + std::to_string(k)));
        std::vector<HerbrandInterp> models;
        for (std::uint32_t m = 0; m < 64; ++m) {
            HerbrandInterp i;
            for (int k = 0; k < 6; ++k)
                if (m >> k & 1u) i.insert(atoms[k]);
            if (satisfies(p, i, false, i)) models.push_back(i);
        }
        for (const auto& i : models) {
            bool min = std::none_of(models.begin(), models.end(), [&](const HerbrandInterp& j) {
                return j.size() < i.size() && std::includes(i.begin(), i.end(), j.begin(), j.end());
            });
            if (min) minimal.insert(i);
        }
        // Atoms that occur nowhere in p are never in a stable model.
        std::set<HerbrandInterp> restricted;
        std::set<DAtom> mentioned;
        for (const auto& r : p.rules)
            for (const auto* part : {&r.head, &r.pos}) mentioned.insert(part->begin(), part->end());
        for (const auto& i : minimal)
            if (std::all_of(i.begin(), i.end(), [&](const DAtom& a) { return mentioned.count(a); })) restricted.insert(i);
        CHECK(stable == restricted);
        for (const auto& m : stable) CHECK(is_stable_model(p, m));
    }
}

TEST_CASE("property: checker and enumerator agree on random ground programs") {
    std::mt19937_64 rng(59);
    for (int n = 0; n < 300; ++n) {
        auto p = test::random_ground_program(rng, 6, 7);
        auto want = reference_stable_models(p);
        CHECK(as_set(stable_models_bruteforce(p)) == want);
        for (const auto& m : want) CHECK(is_stable_model(p, m));
    }
}

}
