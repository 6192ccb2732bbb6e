// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "support.hpp"

#include "omq/engine.hpp"
#include "omq/error.hpp"
#include "omq/oracle.hpp"
#include "omq/query.hpp"
#include "omq/rewriter.hpp"

#include <doctest.h>

using namespace omq;

namespace {

using Tuples = std::set<std::vector<std::string>>;

RewriteOutput rewrite_fixture(const std::string& kb, const std::string& q) {
    return rewrite(make_omq(test::load_kb(kb), test::load_query(q)));
}

bool has_pred(const datalog::DProgram& p, const std::string& prefix) {
    for (const auto& r : p.rules)
        for (const auto& h : r.head)
            if (h.pred.rfind(prefix, 0) == 0) return true;
    return false;
}

// Certain answers read off every stable model of the whole grounding.
Tuples answers_from_models(const RewriteOutput& out, const std::vector<Assertion>& abox,
                           const std::vector<datalog::HerbrandInterp>& models) {
    auto inds = kb_individuals(out, abox);
    if (models.empty()) return test::all_tuples(inds, out.omq.query.answer_vars.size());
    std::optional<Tuples> acc;
    for (const auto& m : models) {
        Tuples here;
        for (const auto& a : m)
            if (a.pred == out.answer_pred) {
                std::vector<std::string> t;
                for (const auto& arg : a.args) t.push_back(arg.name);
                here.insert(t);
            }
        if (!acc) {
            acc = here;
        } else {
            Tuples keep;
            std::set_intersection(acc->begin(), acc->end(), here.begin(), here.end(), std::inserter(keep, keep.end()));
            acc = keep;
        }
    }
    return *acc;
}

} // namespace

TEST_SUITE("engine") {

TEST_CASE("layers of the running example") {
    auto out = rewrite_fixture("example1.kb", "q_r1.cq");
    auto lp = stratify(out);
    CHECK(has_pred(lp.p1, "in_e"));
    CHECK(has_pred(lp.p1, "out_e"));
    CHECK(has_pred(lp.p1, "c_a2"));
    CHECK(has_pred(lp.p1, "q"));
    CHECK(has_pred(lp.p3, "next"));
    CHECK(has_pred(lp.p3, "type"));
    CHECK(has_pred(lp.p3, "marked"));
    CHECK_FALSE(has_pred(lp.p1, "marked"));
    CHECK_FALSE(has_pred(lp.p1, "next"));
    CHECK(lp.p1.rules.size() + lp.p2.rules.size() + lp.p3.rules.size() == out.program.rules.size());
    CHECK(lp.choice_pairs.count({"c_a2", "nc_a2"}));
    std::set<std::string> p1_heads;
    for (const auto& r : lp.p1.rules)
        for (const auto& h : r.head) p1_heads.insert(h.pred);
    for (const auto& r : lp.p2.rules)
        for (const auto& h : r.head) CHECK_FALSE(p1_heads.count(h.pred));
}

TEST_CASE("choice atoms of the positive variant are complementary heads") {
    auto out = rewrite_positive(make_omq(test::load_kb("nominalfree.kb"), test::load_query("q_s.cq")));
    auto lp = stratify(out);
    CHECK(lp.choice_pairs.count({"c_a", "nc_a"}));
    CHECK(lp.choice_pairs.count({"nr_r", "r_r"}));
    for (const auto& [a, b] : lp.choice_pairs) CHECK(("n" + a == b || "n" + b == a));
}

TEST_CASE("foreign programs are rejected") {
    auto out = rewrite_fixture("micro.kb", "q_a.cq");
    out.program = test::program("foo(X) :- c_a(X).");
    CHECK_THROWS_AS(stratify(out), Error);
    out.program = test::program("c_a(X) :- marked(X).");
    CHECK_THROWS_AS(stratify(out), Error);
}

TEST_CASE("certain answers on the headline examples") {
    auto ex1 = test::load_kb("example1.kb");
    auto r1 = certain_answers(rewrite_fixture("example1.kb", "q_r1.cq"), ex1.abox);
    CHECK_FALSE(r1.answers.count({"a", "a"}));
    CHECK_FALSE(r1.inconsistent);

    auto closed = certain_answers(rewrite_fixture("intro.kb", "q_attends.cq"), test::load_kb("intro.kb").abox);
    CHECK(closed.answers == Tuples{{"a", "c1"}});
    auto open = certain_answers(rewrite_fixture("intro_open.kb", "q_attends.cq"), test::load_kb("intro_open.kb").abox);
    CHECK(open.answers.empty());
}

TEST_CASE("goal restriction agrees with the full answer set") {
    auto out = rewrite_fixture("intro.kb", "q_attends.cq");
    auto abox = test::load_kb("intro.kb").abox;
    for (const auto& t : test::all_tuples(kb_individuals(out, abox), 2)) {
        EngineOptions opts;
        opts.goal = t;
        bool certain = certain_answers(out, abox, opts).answers.count(t) > 0;
        CHECK(certain == (t == std::vector<std::string>{"a", "c1"}));
    }
}

TEST_CASE("inconsistent knowledge bases entail every tuple") {
    auto kb = test::load_kb("inconsistent.kb");
    auto rep = certain_answers(rewrite(make_omq(kb, test::load_query("q_a.cq"))), kb.abox);
    CHECK(rep.inconsistent);
    CHECK(rep.answers == Tuples{{"a"}});
}

TEST_CASE("Boolean queries") {
    auto q = parse_query("q() :- A(x).");
    auto yes = parse_kb("tbox { A <= exists r . B; } abox { A(a); } closed { A; }");
    CHECK(certain_answers(rewrite(make_omq(yes, q)), yes.abox).answers == Tuples{{}});
    auto no = parse_kb("tbox { A <= exists r . B; C <= C; } abox { C(a); } closed { A; }");
    CHECK(certain_answers(rewrite(make_omq(no, q)), no.abox).answers.empty());
    auto kb = test::load_kb("micro.kb");
    CHECK_THROWS_AS(rewrite(make_omq(kb, test::load_query("q_bool.cq"))), Error);
}

TEST_CASE("verified models") {
    auto kb = test::load_kb("example1_reduced.kb");
    auto out = rewrite(make_omq(kb, test::load_query("q_r1.cq")));
    LayerEvaluator ev(out, kb.abox);
    std::optional<datalog::HerbrandInterp> surviving, dying;
    enumerate_p1(out, kb.abox, [&](const datalog::HerbrandInterp& m, bool ok) {
        if (ok && !surviving) surviving = m;
        if (!ok && !dying) dying = m;
    });
    REQUIRE(surviving);
    auto full = ev.complete(datalog::to_bits(ev.p1(), *surviving));
    CHECK(verify_model(out, kb.abox, full));
    auto extra = full;
    extra.insert(datalog::parse_atom("marked(0,0,0,0)"));
    CHECK_FALSE(verify_model(out, kb.abox, extra));
    auto fewer = full;
    fewer.erase(fewer.begin());
    CHECK_FALSE(verify_model(out, kb.abox, fewer));
    CHECK_FALSE(verify_model(out, kb.abox, {}));
}

TEST_CASE("a losing fringe element kills its branch") {
    auto kb = parse_kb("tbox { A <= exists r . B; B <= exists r . C; C <= bot; D <= D; } abox { A(a); }");
    auto omq = make_omq(kb, parse_query("q(x) :- D(x)."));
    auto out = rewrite(omq);
    auto inds = kb_individuals(out, kb.abox);
    TypeContext ctx(out.omq.tbox, out.omq.sigma, inds);
    std::size_t survived = 0, died = 0;
    auto models = enumerate_p1(out, kb.abox, [&](const datalog::HerbrandInterp& m, bool ok) {
        Core core = project_core(out, inds, m);
        CHECK(validate_core(core, ctx, kb.abox).ok());
        CHECK(has_nonlosing_strategy(core, ctx) == ok);
        (ok ? survived : died)++;
    });
    CHECK(died > 0);
    CHECK(survived == 0);
    std::uint64_t cores = enumerate_cores(out.omq, kb.abox, [](const Core&, bool) {});
    CHECK(cores == models);
    CHECK(certain_answers(out, kb.abox).inconsistent);
}

TEST_CASE("closed predicates make answers non-monotone") {
    auto before = certain_answers(rewrite_fixture("intro.kb", "q_attends.cq"), test::load_kb("intro.kb").abox);
    auto after = certain_answers(rewrite_fixture("intro_c3.kb", "q_attends.cq"), test::load_kb("intro_c3.kb").abox);
    CHECK(before.answers.count({"a", "c1"}));
    CHECK_FALSE(after.answers.count({"a", "c1"}));
    CHECK_FALSE(std::includes(after.answers.begin(), after.answers.end(), before.answers.begin(), before.answers.end()));
}

TEST_CASE("property: without closed predicates answers are monotone in the ABox") {
    std::mt19937_64 rng(79);
    for (int n = 0; n < 40; ++n) {
        auto in = test::random_open(rng, false);
        auto omq = make_omq(in.kb, in.query);
        auto out = rewrite(omq);
        auto before = certain_answers(out, in.kb.abox);
        auto abox = in.kb.abox;
        auto syms = symbols_of(in.kb.tbox);
        auto inds = kb_individuals(out, abox);
        std::vector<std::string> cs(syms.concepts.begin(), syms.concepts.end());
        abox.push_back({cs[rng() % cs.size()], {inds[rng() % inds.size()]}});
        auto after = certain_answers(out, abox);
        CAPTURE(in.str());
        for (const auto& t : before.answers)
            if (!before.inconsistent) CHECK(after.answers.count(t));
    }
}

TEST_CASE("property: layered evaluation matches the monolithic stable models") {
    std::mt19937_64 rng(83);
    int small = 0;
    for (int n = 0; n < 60; ++n) {
        auto in = test::random_micro(rng);
        auto out = rewrite(make_omq(in.kb, in.query));
        auto facts = abox_facts(out, in.kb.abox);
        auto g = datalog::ground_program(out.program, facts);
        auto models = enumerate_stable_models(g);
        auto rep = certain_answers(out, in.kb.abox);
        CAPTURE(in.str());
        CHECK(rep.inconsistent == models.empty());
        CHECK(rep.answers == answers_from_models(out, in.kb.abox, models));
        if (g.atom_count() <= 24) {
            ++small;
            auto brute = datalog::stable_models_bruteforce(g);
            CHECK(test::strs(brute) == test::strs(models));
        }
    }
    std::size_t tiny = 0;
    for (const auto* t : {"tbox { r <= s; } abox { r(a, a); }", "tbox { r <= s; inv(s) <= t; } abox { r(a, b); }",
                          "tbox { A <= A; } abox { A(a); }"}) {
        auto kb = parse_kb(t);
        auto q = kb.abox[0].is_role() ? parse_query("q(x,y) :- s(x,y).") : parse_query("q(x) :- A(x).");
        auto out = rewrite(make_omq(kb, q));
        auto g = datalog::ground_program(out.program, abox_facts(out, kb.abox));
        if (g.atom_count() > 24) continue;
        ++tiny;
        auto brute = datalog::stable_models_bruteforce(g);
        CHECK(certain_answers(out, kb.abox).answers == answers_from_models(out, kb.abox, brute));
    }
    CHECK(tiny > 0);
}

TEST_CASE("property: stable solver agrees with brute force") {
    std::mt19937_64 rng(89);
    for (int n = 0; n < 300; ++n) {
        auto p = test::random_ground_program(rng, 10, std::uniform_int_distribution<std::size_t>(1, 14)(rng));
        auto g = datalog::intern_ground(p);
        CHECK(test::strs(enumerate_stable_models(g)) == test::strs(datalog::stable_models_bruteforce(g)));
    }
}

TEST_CASE("property: surviving branches are exactly the cores with a non-losing strategy") {
    std::mt19937_64 rng(97);
    for (int n = 0; n < 40; ++n) {
        auto in = test::random_micro(rng);
        auto omq = make_omq(in.kb, in.query);
        auto out = rewrite(omq);
        auto inds = kb_individuals(out, in.kb.abox);
        TypeContext ctx(out.omq.tbox, out.omq.sigma, inds);
        std::set<std::string> from_p1, from_oracle;
        std::size_t survivors_p1 = 0, survivors_oracle = 0;
        enumerate_p1(out, in.kb.abox, [&](const datalog::HerbrandInterp& m, bool ok) {
            Core core = project_core(out, inds, m);
            CHECK(validate_core(core, ctx, in.kb.abox).ok());
            CHECK(has_nonlosing_strategy(core, ctx) == ok);
            from_p1.insert(core.str());
            survivors_p1 += ok;
        });
        enumerate_cores(out.omq, in.kb.abox, [&](const Core& core, bool ok) {
            from_oracle.insert(core.str());
            survivors_oracle += ok;
        });
        CAPTURE(in.str());
        CHECK(from_p1 == from_oracle);
        CHECK(survivors_p1 == survivors_oracle);
    }
}

}
