// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "support.hpp"

#include "omq/dl.hpp"
#include "omq/error.hpp"

#include <doctest.h>

using namespace omq;

namespace {

RoleExpr R(const std::string& n, bool inv = false) { return {n, inv}; }

// Re-applies the closure rules and reports whether anything new appears.
bool is_fixpoint(const RoleHierarchy& h, const std::vector<Axiom>& tbox) {
    auto syms = symbols_of(tbox);
    for (const auto& r : syms.roles)
        for (bool inv : {false, true})
            if (!h.pairs.count({R(r, inv), R(r, inv)})) return false;
    for (const auto& [r, s] : h.pairs)
        if (!h.pairs.count({r.inverse(), s.inverse()})) return false;
    for (const auto& ax : tbox) {
        const auto* ri = std::get_if<RoleIncl>(&ax);
        if (!ri) continue;
        for (const auto& [r, s] : h.pairs)
            if (s == ri->lhs && !h.pairs.count({r, ri->rhs})) return false;
    }
    return true;
}

} // namespace

TEST_SUITE("dl") {

TEST_CASE("inverse of an inverse role is the role") {
    RoleExpr r = R("p");
    CHECK(r.inverse().inverse() == r);
    CHECK(r.inverse().inverted);
    CHECK(r.inverse().str() != r.str());
}

TEST_CASE("role closure of the running example") {
    auto kb = test::load_kb("example1.kb");
    auto h = role_closure(kb.tbox);
    CHECK(h.pairs.count({R("r1", true), R("r2")}));
    CHECK(h.pairs.count({R("r1"), R("r2", true)}));
    CHECK(h.sub(R("r1", true), R("r2")));
    CHECK_FALSE(h.sub(R("r2"), R("r1")));
    CHECK(is_fixpoint(h, kb.tbox));
}

TEST_CASE("role closure without role inclusions is reflexive only") {
    std::vector<Axiom> t{ConceptIncl{ConceptExpr::name("A"), ConceptExpr::exists(R("p"), ConceptExpr::top())}};
    auto h = role_closure(t);
    std::set<std::pair<RoleExpr, RoleExpr>> want{{R("p"), R("p")}, {R("p", true), R("p", true)}};
    CHECK(h.pairs == want);
}

TEST_CASE("role closure chases chains") {
    std::vector<Axiom> t{RoleIncl{R("p"), R("s")}, RoleIncl{R("s"), R("t")}};
    auto h = role_closure(t);
    CHECK(h.pairs.count({R("p"), R("t")}));
    CHECK(h.pairs.count({R("p", true), R("t", true)}));
    CHECK_FALSE(h.pairs.count({R("t"), R("p")}));
    CHECK(is_fixpoint(h, t));
}

TEST_CASE("closed role subsumption") {
    auto kb = test::load_kb("example1.kb");
    auto h = role_closure(kb.tbox);
    CHECK_FALSE(subsumed_by_closed(R("r1"), h, kb.sigma));

    std::vector<Axiom> t{RoleIncl{R("p"), R("s")}};
    auto h2 = role_closure(t);
    CHECK(subsumed_by_closed(R("s"), h2, {"s"}));
    CHECK(subsumed_by_closed(R("p"), h2, {"s"}));
    CHECK(subsumed_by_closed(R("p", true), h2, {"s"}));
    CHECK_FALSE(subsumed_by_closed(R("s"), h2, {"p"}));
}

TEST_CASE("signature of the running example") {
    auto kb = test::load_kb("example1.kb");
    auto sig = signature_of(kb);
    CHECK(sig.individuals == std::vector<std::string>{"a", "b", "c"});
    CHECK(sig.concept_names == std::vector<std::string>{"A1", "A2", "A3", "A4"});
    CHECK(sig.role_names == std::vector<std::string>{"r1", "r2"});
    std::vector<Basic> basis{{false, "A1"}, {false, "A2"}, {false, "A3"}, {false, "A4"}, {true, "c"}};
    CHECK(sig.basis == basis);
}

TEST_CASE("signature of the empty knowledge base") {
    auto sig = signature_of(KnowledgeBase{});
    CHECK(sig.individuals.empty());
    CHECK(sig.concept_names.empty());
    CHECK(sig.role_names.empty());
    CHECK(sig.basis.empty());
}

TEST_CASE("individuals come from the ABox") {
    KnowledgeBase kb;
    kb.tbox.push_back(ConceptIncl{ConceptExpr::name("A"), ConceptExpr::top()});
    kb.abox.push_back({"A", {"d"}});
    CHECK(signature_of(kb).individuals == std::vector<std::string>{"d"});
}

TEST_CASE("signature orderings are deterministic") {
    auto a = signature_of(test::load_kb("example1.kb"));
    auto b = signature_of(test::load_kb("example1.kb"));
    CHECK(a.individuals == b.individuals);
    CHECK(a.basis == b.basis);
    CHECK(std::is_sorted(a.concept_names.begin(), a.concept_names.end()));
}

TEST_CASE("ABox symbols outside the TBox are rejected unless allowed") {
    auto kb = test::load_kb("micro.kb");
    kb.abox.push_back({"Z", {"a"}});
    auto copy = kb;
    CHECK_THROWS_AS(validate_kb(copy), Error);
    auto warnings = validate_kb(kb, {true});
    CHECK_FALSE(warnings.empty());
    CHECK(symbols_of(kb.tbox).concepts.count("Z"));
}

TEST_CASE("closed predicates must occur in the TBox") {
    auto kb = test::load_kb("micro.kb");
    kb.sigma.insert("Unknown");
    CHECK_THROWS_AS(validate_kb(kb), Error);
}

TEST_CASE("property: closure is a fixpoint and inversion-symmetric on random role sets") {
    std::mt19937_64 rng(7);
    std::vector<std::string> names{"p", "q", "r", "s"};
    for (int n = 0; n < 200; ++n) {
        std::vector<Axiom> t;
        int m = std::uniform_int_distribution<int>(0, 5)(rng);
        for (int i = 0; i < m; ++i) {
            auto pick = [&] { return R(names[rng() % names.size()], rng() % 2); };
            t.push_back(RoleIncl{pick(), pick()});
        }
        auto h = role_closure(t);
        CHECK(is_fixpoint(h, t));
        for (const auto& [r, s] : h.pairs) CHECK(h.pairs.count({r.inverse(), s.inverse()}));
    }
}

}
