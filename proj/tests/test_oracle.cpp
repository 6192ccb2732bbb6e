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

struct Example1 {
    KnowledgeBase kb = test::load_kb("example1.kb");
    NormalTBox nt = normalize(kb.tbox);
    TypeContext ctx{nt, kb.sigma, individuals_of(kb.abox, nt.nominals)};
    Core core(const std::string& file) const {
        return core_from_text(parse_core_text(read_file(test::fixture(file)), file), ctx);
    }
};

Goal goal(const std::string& q, std::vector<std::string> tuple) { return {parse_query(q), std::move(tuple)}; }

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("cores as plain interpretations") {
    Example1 ex;
    auto i2 = core_interp(ex.core("ic2.core"));
    CHECK(models_kb(i2, ex.kb));
    auto i1 = core_interp(ex.core("ic1.core"));
    CHECK(std::find(i1.domain.begin(), i1.domain.end(), "a^1") != i1.domain.end());
    CHECK(i1.in_concept("A2", "b^2"));
    CHECK(i1.in_role({"r1", true}, "a^1", "a"));
    CHECK_FALSE(models_kb(i1, ex.kb));
}

TEST_CASE("the empty interpretation violates assertions") {
    auto kb = parse_kb("tbox { A <= A; } abox { A(a); }");
    FiniteInterp i;
    i.domain = {"a"};
    CHECK_FALSE(models_kb(i, kb));
    i.concepts["A"].insert("a");
    CHECK(models_kb(i, kb));
}

TEST_CASE("closed predicates are interpreted exactly") {
    auto kb = test::load_kb("intro.kb");
    FiniteInterp i;
    i.domain = {"a", "c1", "c2"};
    i.concepts = {{"BScStud", {"a"}}, {"Student", {"a"}}, {"Course", {"c1", "c2"}}, {"GradCourse", {"c2"}}};
    i.roles["attends"] = {{"a", "c1"}};
    CHECK(models_kb(i, kb));
    i.domain.push_back("d");
    i.concepts["Course"].insert("d");
    CHECK_FALSE(models_kb(i, kb));
}

TEST_CASE("extensions of complex concepts") {
    FiniteInterp i;
    i.domain = {"a", "b"};
    i.concepts["A"] = {"a"};
    i.roles["r"] = {{"a", "b"}};
    CHECK(extension(ConceptExpr::exists({"r", false}, ConceptExpr::top()), i) == std::set<std::string>{"a"});
    CHECK(extension(ConceptExpr::exists({"r", true}, ConceptExpr::name("A")), i) == std::set<std::string>{"b"});
    CHECK(extension(ConceptExpr::forall({"r", false}, ConceptExpr::name("A")), i) == std::set<std::string>{"b"});
    CHECK(extension(ConceptExpr::nominal("b"), i) == std::set<std::string>{"b"});
    CHECK(extension(ConceptExpr::negation(ConceptExpr::name("A")), i) == std::set<std::string>{"b"});
}

TEST_CASE("query matches") {
    FiniteInterp i;
    i.domain = {"a", "b", "_d1"};
    i.concepts["B"] = {"_d1"};
    i.roles["r"] = {{"a", "_d1"}, {"b", "a"}};
    auto q = parse_query("q(x) :- r(x,y), B(y).");
    CHECK(satisfies_query(i, q, {"a"}));
    CHECK_FALSE(satisfies_query(i, q, {"b"}));
    CHECK(satisfies_query(i, parse_query("q() :- r(x,y), r(y,z)."), {}));
}

TEST_CASE("countermodel for the running example") {
    Example1 ex;
    BoundedOptions opts;
    opts.max_size = 6;
    auto r = bounded_model_search(ex.kb, goal("q(x,y) :- r1(x,y).", {"a", "a"}), opts);
    REQUIRE(r.model);
    CHECK(r.model->domain.size() <= 6);
    CHECK(models_kb(*r.model, ex.kb));
    CHECK_FALSE(satisfies_query(*r.model, parse_query("q(x,y) :- r1(x,y)."), {"a", "a"}));
    CHECK(r.model->str({"a", "b", "c"}).find("A1(a)") != std::string::npos);
}

TEST_CASE("inconsistent knowledge bases have no models") {
    auto kb = test::load_kb("inconsistent.kb");
    for (std::size_t bound : {1, 3, 5}) {
        BoundedOptions opts;
        opts.max_size = bound;
        auto r = bounded_model_search(kb, std::nullopt, opts);
        CHECK_FALSE(r.model);
        CHECK(r.exhausted);
    }
}

TEST_CASE("single-element countermodel") {
    auto kb = parse_kb("tbox { A <= A; B <= B; } abox { A(a); }");
    BoundedOptions opts;
    opts.max_size = 1;
    auto r = bounded_model_search(kb, goal("q(x) :- B(x).", {"a"}), opts);
    REQUIRE(r.model);
    CHECK(r.model->domain.size() == 1);
}

TEST_CASE("entailed goals have no countermodel") {
    auto kb = test::load_kb("micro.kb");
    auto r = bounded_model_search(kb, goal("q(x) :- A(x).", {"a"}));
    CHECK_FALSE(r.model);
    CHECK(r.exhausted);
    CHECK(r.bound == default_bound(kb));
}

TEST_CASE("default bound") {
    Example1 ex;
    CHECK(default_bound(ex.kb) == 3 + 3 * 3 + 2);
    CHECK(default_bound(test::load_kb("micro.kb")) == 1 + 1 + 2);
}

TEST_CASE("core enumeration decisions") {
    auto micro = test::load_kb("micro.kb");
    auto q = parse_query("q(x) :- r(x,y), B(y).");
    auto rolled = rollup(make_omq(micro, q));
    bool oracle = core_enumeration_decide(rolled, micro.abox, {"a"});
    bool engine = certain_answers(rewrite(rolled), micro.abox).answers.count({"a"}) > 0;
    CHECK(oracle == engine);
    CHECK(oracle);

    auto simple = parse_kb("tbox { A <= A; } abox { A(a); }");
    CHECK(core_enumeration_decide(make_omq(simple, parse_query("q(x) :- A(x).")), simple.abox, {"a"}));

    auto intro = test::load_kb("intro.kb");
    auto omq = make_omq(intro, test::load_query("q_attends.cq"));
    CHECK_FALSE(core_enumeration_decide(omq, intro.abox, {"a", "c2"}));
    CHECK(core_enumeration_decide(omq, intro.abox, {"a", "c1"}));
    auto all = core_enumeration_answers(omq, intro.abox);
    CHECK(all.answers == std::set<std::vector<std::string>>{{"a", "c1"}});
    CHECK_FALSE(all.inconsistent);
}

TEST_CASE("core enumeration on the running example") {
    Example1 ex;
    auto omq = make_omq(ex.kb, test::load_query("q_r1.cq"));
    CHECK_FALSE(core_enumeration_decide(omq, ex.kb.abox, {"a", "a"}));
}

TEST_CASE("resource caps are reported") {
    Example1 ex;
    auto omq = make_omq(ex.kb, test::load_query("q_r1.cq"));
    CoreSearchOptions opts;
    opts.max_free_bits = 1;
    CHECK(free_core_bits(TypeContext(omq.tbox, omq.sigma, individuals_of(ex.kb.abox, omq.tbox.nominals)), ex.kb.abox) > 1);
    CHECK_THROWS_AS(core_enumeration_decide(omq, ex.kb.abox, {"a", "a"}, opts), ResourceError);
}

TEST_CASE("inconsistency is detected by both oracles") {
    auto kb = test::load_kb("inconsistent.kb");
    auto omq = make_omq(kb, test::load_query("q_a.cq"));
    auto r = core_enumeration_answers(omq, kb.abox);
    CHECK(r.inconsistent);
    CHECK(r.answers == std::set<std::vector<std::string>>{{"a"}});
}

TEST_CASE("property: bounded search is sound") {
    std::mt19937_64 rng(101);
    for (int n = 0; n < 60; ++n) {
        auto in = test::random_micro(rng);
        auto inds = individuals_of(in.kb.abox, symbols_of(in.kb.tbox).nominals);
        for (const auto& t : test::all_tuples(inds, in.query.answer_vars.size())) {
            BoundedOptions opts;
            opts.max_size = 4;
            auto r = bounded_model_search(in.kb, Goal{in.query, t}, opts);
            if (!r.model) continue;
            CAPTURE(in.str());
            CHECK(models_kb(*r.model, in.kb));
            CHECK_FALSE(satisfies_query(*r.model, in.query, t));
        }
    }
}

TEST_CASE("property: engine, core enumeration and bounded search never contradict") {
    std::mt19937_64 rng(103);
    for (int n = 0; n < 60; ++n) {
        auto in = test::random_micro(rng);
        auto omq = make_omq(in.kb, in.query);
        auto out = rewrite(omq);
        auto engine = certain_answers(out, in.kb.abox);
        auto cores = core_enumeration_answers(omq, in.kb.abox);
        CAPTURE(in.str());
        CHECK(engine.answers == cores.answers);
        CHECK(engine.inconsistent == cores.inconsistent);
        auto inds = kb_individuals(out, in.kb.abox);
        for (const auto& t : test::all_tuples(inds, in.query.answer_vars.size())) {
            CHECK(core_enumeration_decide(omq, in.kb.abox, t) == (cores.answers.count(t) > 0));
            BoundedOptions opts;
            opts.max_size = 5;
            auto r = bounded_model_search(in.kb, Goal{in.query, t}, opts);
            if (r.model) CHECK_FALSE(engine.answers.count(t));
        }
    }
}

}
