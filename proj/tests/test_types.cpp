// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "support.hpp"

#include "omq/error.hpp"
#include "omq/oracle.hpp"
#include "omq/query.hpp"
#include "omq/types.hpp"

#include <doctest.h>

using namespace omq;

namespace {

struct Fixture {
    KnowledgeBase kb;
    TypeContext ctx;
    explicit Fixture(KnowledgeBase k)
        : kb(std::move(k)), ctx(normalize(kb.tbox), kb.sigma, individuals_of(kb.abox, symbols_of(kb.tbox).nominals)) {}
    Core core(const std::string& file) const {
        return core_from_text(parse_core_text(read_file(test::fixture(file)), file), ctx);
    }
    Core core_text(const std::string& text) const { return core_from_text(parse_core_text(text), ctx); }
    TypeVec type(const std::vector<std::string>& names) const {
        std::vector<Basic> bs;
        for (const auto& n : names) bs.push_back(n.front() == '{' ? Basic{true, n.substr(1, n.size() - 2)} : Basic{false, n});
        return {ctx.mask(bs)};
    }
};

Fixture example1() { return Fixture(test::load_kb("example1.kb")); }

} // namespace

TEST_SUITE("types") {

TEST_CASE("basis of the running example") {
    auto f = example1();
    CHECK(f.ctx.k() == 5);
    CHECK(f.ctx.index({false, "A1"}) == 0);
    CHECK(f.ctx.index({true, "c"}) == 4);
    CHECK_FALSE(f.ctx.index_of({false, "Z"}).has_value());
}

TEST_CASE("types of elements in the first core") {
    auto f = example1();
    auto core = f.core("ic1.core");
    CHECK(type_of(Element::parse("a"), core, f.ctx) == f.type({"A1", "A4"}));
    CHECK(type_of(Element::parse("a^1"), core, f.ctx) == f.type({"A2", "A3"}));
    CHECK(type_of(Element::parse("c"), core, f.ctx) == f.type({"{c}"}));
    CHECK(Element::parse("b^2").fringe == 1);
    CHECK(Element::parse("b^2").str() == "b^2");
}

TEST_CASE("c-types") {
    auto f = example1();
    CHECK(is_c_type(f.type({"A1", "A4"}), f.ctx));
    CHECK_FALSE(is_c_type(f.type({"A2", "A3"}), f.ctx));
    CHECK(is_c_type(f.type({"{c}"}), f.ctx));
    CHECK_FALSE(is_c_type(f.type({}), f.ctx));
    Fixture g(parse_kb("tbox { A <= exists r . B; } abox { A(a); } closed { r; }"));
    CHECK(is_c_type(g.type({"A"}), g.ctx));
    CHECK_FALSE(is_c_type(g.type({"B"}), g.ctx));
}

TEST_CASE("local consistency") {
    auto f = example1();
    auto core = f.core("ic1.core");
    CHECK_FALSE(lc_check(f.type({"A2"}), core, f.ctx));
    CHECK(lc_check(f.type({"A2", "A3"}), core, f.ctx));
    CHECK_FALSE(lc_check(f.type({"A1", "A2", "A4"}), core, f.ctx));
    CHECK(lc_check(f.type({"A1", "A4"}), core, f.ctx));
}

TEST_CASE("both cores of the running example are valid") {
    auto f = example1();
    auto r1 = validate_core(f.core("ic1.core"), f.ctx, f.kb.abox);
    auto r2 = validate_core(f.core("ic2.core"), f.ctx, f.kb.abox);
    CHECK(r1.ok());
    CHECK(r2.ok());
}

TEST_CASE("closed concept outside the ABox violates the core conditions") {
    auto f = example1();
    auto text = read_file(test::fixture("ic1.core"));
    text.insert(text.find("A1(b);"), "A4(b); ");
    auto rep = validate_core(f.core_text(text), f.ctx, f.kb.abox);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.violations[0].find("c2") != std::string::npos);
}

TEST_CASE("core violations are reported, not thrown") {
    auto f = example1();
    auto missing_wit = f.core_text("abox { A1(a); A4(a); A1(b); A3(b); c; }");
    CHECK_FALSE(validate_core(missing_wit, f.ctx, f.kb.abox).ok());
    auto bad_n1 = f.core_text(
        "abox { A1(a); A4(a); A1(b); A3(b); c; A2(c); a^1; A2(a^1); A3(a^1); r1(a, a^1); r2(a^1, a);"
        " b^1; A2(b^1); A3(b^1); r1(b, b^1); r2(b^1, b); b^2; A2(b^2); A3(b^2); r2(b, b^2); r2(b, c); }");
    CHECK_FALSE(validate_core(bad_n1, f.ctx, f.kb.abox).ok());
    auto shape_text = read_file(test::fixture("ic1.core"));
    shape_text.insert(shape_text.rfind('}'), "r1(a^1, b^1);\n");
    bool shape_rejected = false;
    try {
        shape_rejected = !validate_core(f.core_text(shape_text), f.ctx, f.kb.abox).ok();
    } catch (const Error&) {
        shape_rejected = true;
    }
    CHECK(shape_rejected);
    CHECK_THROWS_AS(f.core_text("abox { A1(z); }"), Error);
}

TEST_CASE("marking on the first core") {
    auto f = example1();
    auto m = mark(f.ctx, f.core("ic1.core"));
    std::set<TypeVec> unmarked(m.unmarked.begin(), m.unmarked.end());
    std::set<TypeVec> want{f.type({}), f.type({"A3"}), f.type({"A2", "A3"}), f.type({"A1", "A4"}),
                           f.type({"A1", "A3"}), f.type({"{c}"})};
    CHECK(unmarked == want);
    CHECK(m.marked.size() == 26);
    CHECK(has_nonlosing_strategy(f.core("ic1.core"), f.ctx));
    CHECK(has_nonlosing_strategy(f.core("ic2.core"), f.ctx));
    CHECK(dump_types(m, f.ctx).find("unmarked 6") != std::string::npos);
}

TEST_CASE("marking without concept names") {
    Fixture f(parse_kb("tbox { r <= s; } abox { r(a, b); }"));
    auto m = mark(f.ctx, std::set<TypeVec>{});
    CHECK(f.ctx.k() == 0);
    CHECK(m.marked.empty());
    CHECK(m.unmarked == std::vector<TypeVec>{TypeVec{}});
}

TEST_CASE("an unsatisfiable name marks every type containing it") {
    Fixture f(parse_kb("tbox { A <= bot; B <= C; } abox { B(a); }"));
    auto m = mark(f.ctx, std::set<TypeVec>{});
    for (std::uint64_t b = 0; b < (1u << f.ctx.k()); ++b)
        if (TypeVec{b}.has(f.ctx.index({false, "A"}))) CHECK(m.is_marked(TypeVec{b}));
}

TEST_CASE("a fringe element of an unsatisfiable type loses") {
    Fixture f(parse_kb("tbox { A <= exists r . B; B <= exists r . C; C <= bot; } abox { A(a); }"));
    auto core = f.core_text("abox { A(a); a^1; B(a^1); r(a, a^1); }");
    CHECK(validate_core(core, f.ctx, f.kb.abox).ok());
    CHECK_FALSE(has_nonlosing_strategy(core, f.ctx));
}

TEST_CASE("property: mark partitions all types and unmarked types are locally consistent") {
    std::mt19937_64 rng(37);
    for (int n = 0; n < 150; ++n) {
        auto in = test::random_micro(rng);
        auto omq = make_omq(in.kb, in.query);
        TypeContext ctx(omq.tbox, omq.sigma, individuals_of(in.kb.abox, omq.tbox.nominals));
        enumerate_cores(omq, in.kb.abox, [&](const Core& core, bool good) {
            auto m = mark(ctx, core);
            CHECK(m.marked.size() + m.unmarked.size() == (std::size_t{1} << ctx.k()));
            std::set<TypeVec> all(m.marked.begin(), m.marked.end());
            all.insert(m.unmarked.begin(), m.unmarked.end());
            CHECK(all.size() == (std::size_t{1} << ctx.k()));
            for (auto t : m.unmarked) CHECK(lc_check(t, core, ctx));
            CHECK(good == has_nonlosing_strategy(core, ctx, m));
            CHECK(validate_core(core, ctx, in.kb.abox).ok());
        });
    }
}

TEST_CASE("property: realizing more types never marks more") {
    std::mt19937_64 rng(41);
    for (int n = 0; n < 100; ++n) {
        auto in = test::random_micro(rng);
        auto omq = make_omq(in.kb, in.query);
        TypeContext ctx(omq.tbox, omq.sigma, individuals_of(in.kb.abox, omq.tbox.nominals));
        const std::uint64_t types = std::uint64_t{1} << ctx.k();
        std::set<TypeVec> small, large;
        for (std::uint64_t b = 0; b < types; ++b) {
            if (rng() % 3 == 0) small.insert(TypeVec{b});
            if (rng() % 2 == 0) large.insert(TypeVec{b});
        }
        large.insert(small.begin(), small.end());
        auto ms = mark(ctx, small), ml = mark(ctx, large);
        for (auto t : ml.marked) CHECK(ms.is_marked(t));
    }
}

TEST_CASE("property: strategy verdicts agree with finite extensions") {
    std::mt19937_64 rng(43);
    std::size_t cores = 0;
    for (int n = 0; n < 60; ++n) {
        auto in = test::random_micro(rng);
        auto omq = make_omq(in.kb, in.query);
        auto inds = individuals_of(in.kb.abox, omq.tbox.nominals);
        TypeContext ctx(omq.tbox, omq.sigma, inds);
        enumerate_cores(omq, in.kb.abox, [&](const Core& core, bool good) {
            if (++cores > 4000) return;
            std::size_t bound = 2 * inds.size() + core.fringe.size() + 2;
            auto r = extend_core_search(core, ctx, in.kb.abox, bound);
            CAPTURE(in.str());
            CAPTURE(core.str());
            CHECK(r.model.has_value() == good);
        });
    }
    CHECK(cores > 0);
}

}
