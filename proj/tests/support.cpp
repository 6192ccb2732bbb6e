// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "support.hpp"

#include "omq/error.hpp"
#include "omq/query.hpp"

#include <cctype>
#include <sstream>

namespace omq::test {

std::string fixture(const std::string& name) { return std::string(OMQ_FIXTURES) + "/" + name; }

KnowledgeBase load_kb(const std::string& name) { return parse_kb(read_file(fixture(name)), name); }

ConjunctiveQuery load_query(const std::string& name) { return parse_query(read_file(fixture(name)), name); }

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

datalog::DTerm term(const std::string& t) {
    if (!t.empty() && std::isupper(static_cast<unsigned char>(t[0]))) return datalog::DTerm::var(t);
    return datalog::DTerm::cst(t);
}

datalog::DAtom lift(datalog::DAtom a) {
    for (auto& t : a.args) t = term(t.name);
    return a;
}

} // namespace

datalog::DProgram program(const std::string& text) {
    datalog::DProgram p;
    for (const auto& raw : split_top(text, '.')) {
        if (raw.empty()) continue;
        datalog::DRule r;
        auto arrow = raw.find(":-");
        std::string head = trim(raw.substr(0, arrow));
        std::string body = arrow == std::string::npos ? "" : raw.substr(arrow + 2);
        if (!head.empty())
            for (const auto& h : split_top(head, '|')) r.head.push_back(lift(datalog::parse_atom(h)));
        for (const auto& lit : split_top(body, ',')) {
            if (lit.rfind("not ", 0) == 0) {
                r.neg.push_back(lift(datalog::parse_atom(lit.substr(4))));
            } else if (auto ne = lit.find("!="); ne != std::string::npos) {
                r.neq.emplace_back(term(trim(lit.substr(0, ne))), term(trim(lit.substr(ne + 2))));
            } else {
                r.pos.push_back(lift(datalog::parse_atom(lit)));
            }
        }
        p.add(std::move(r));
    }
    return p;
}

datalog::HerbrandInterp interp(const std::string& text) {
    auto ms = datalog::parse_models(text);
    return ms.empty() ? datalog::HerbrandInterp{} : ms.front();
}

std::set<std::string> strs(const std::vector<datalog::HerbrandInterp>& models) {
    std::set<std::string> out;
    for (const auto& m : models) {
        std::string s = "{";
        bool first = true;
        for (const auto& a : m) {
            s += (first ? "" : " ") + a.str();
            first = false;
        }
        out.insert(s + "}");
    }
    return out;
}

std::set<std::vector<std::string>> all_tuples(const std::vector<std::string>& individuals, std::size_t arity) {
    std::set<std::vector<std::string>> out{{}};
    for (std::size_t k = 0; k < arity; ++k) {
        std::set<std::vector<std::string>> next;
        for (const auto& t : out)
            for (const auto& d : individuals) {
                auto u = t;
                u.push_back(d);
                next.insert(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

std::string Instance::str() const { return to_string(kb) + to_string(query) + "\n"; }

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

struct Shape {
    std::vector<std::string> individuals, concepts, roles;
    std::size_t max_axioms;
    double nominal_rate;
};

NormalAxiom random_axiom(std::mt19937_64& rng, const Shape& s) {
    auto basic = [&]() -> Basic {
        if (s.nominal_rate > 0 && coin(rng, s.nominal_rate)) return {true, pick(rng, s.individuals)};
        return {false, pick(rng, s.concepts)};
    };
    auto role = [&]() -> RoleExpr { return {pick(rng, s.roles), coin(rng, 0.3)}; };
    int kind = std::uniform_int_distribution<int>(0, s.roles.empty() ? 0 : 3)(rng);
    if (kind == 0 || (kind == 3 && coin(rng, 0.5))) {
        N1 a;
        std::set<Basic> l, r;
        std::size_t nl = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
        std::size_t nr = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
        for (std::size_t i = 0; i < nl; ++i) l.insert(basic());
        for (std::size_t i = 0; i < nr; ++i) r.insert(basic());
        a.lhs.assign(l.begin(), l.end());
        a.rhs.assign(r.begin(), r.end());
        return a;
    }
    if (kind == 1) return N2{pick(rng, s.concepts), role(), basic()};
    if (kind == 2) return N3{pick(rng, s.concepts), role(), pick(rng, s.concepts)};
    return N4{role(), {pick(rng, s.roles), false}};
}

KnowledgeBase random_kb(std::mt19937_64& rng, const Shape& s, double sigma_rate) {
    KnowledgeBase kb;
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, s.max_axioms)(rng);
    for (std::size_t i = 0; i < n; ++i) kb.tbox.push_back(to_axiom(random_axiom(rng, s)));
    auto syms = symbols_of(kb.tbox);
    std::vector<std::string> cs(syms.concepts.begin(), syms.concepts.end());
    std::vector<std::string> rs(syms.roles.begin(), syms.roles.end());
    for (const auto& d : s.individuals) {
        for (const auto& c : cs)
            if (coin(rng, 0.3)) kb.abox.push_back({c, {d}});
        for (const auto& r : rs)
            for (const auto& e : s.individuals)
                if (coin(rng, 0.2)) kb.abox.push_back({r, {d, e}});
    }
    if (kb.abox.empty() && !(cs.empty() && rs.empty())) {
        if (!cs.empty())
            kb.abox.push_back({pick(rng, cs), {s.individuals.front()}});
        else
            kb.abox.push_back({pick(rng, rs), {s.individuals.front(), s.individuals.back()}});
    }
    for (const auto& c : cs)
        if (coin(rng, sigma_rate)) kb.sigma.insert(c);
    return kb;
}

std::vector<std::string> prefix(const std::vector<std::string>& v, std::size_t n) { return {v.begin(), v.begin() + n}; }

} // namespace

Instance random_micro(std::mt19937_64& rng) {
    for (;;) {
        Shape s;
        s.individuals = prefix({"a", "b"}, std::uniform_int_distribution<std::size_t>(1, 2)(rng));
        s.concepts = prefix({"A", "B", "C"}, std::uniform_int_distribution<std::size_t>(1, 3)(rng));
        if (coin(rng, 0.8)) s.roles = {"r"};
        s.max_axioms = 4;
        s.nominal_rate = 0.1;
        Instance in;
        in.kb = random_kb(rng, s, 0.4);
        auto syms = symbols_of(in.kb.tbox);
        std::vector<std::string> cs(syms.concepts.begin(), syms.concepts.end());
        std::vector<std::string> rs(syms.roles.begin(), syms.roles.end());
        if (cs.empty() && rs.empty()) continue;
        if (!rs.empty() && (cs.empty() || coin(rng, 0.4))) {
            in.query.atoms = {{pick(rng, rs), {"x", "y"}}};
            in.query.answer_vars = {"x", "y"};
        } else {
            const std::string& a = pick(rng, cs);
            in.query.atoms = {{a, {"x"}}};
            if (!in.kb.sigma.count(a) || coin(rng, 0.7)) in.query.answer_vars = {"x"};
        }
        if (!std::holds_alternative<CSafe>(classify(make_omq(in.kb, in.query)))) continue;
        return in;
    }
}

Instance random_open(std::mt19937_64& rng, bool nominals) {
    for (;;) {
        Shape s;
        s.individuals = prefix({"a", "b", "c"}, std::uniform_int_distribution<std::size_t>(1, 3)(rng));
        s.concepts = {"A", "B", "C", "D"};
        s.roles = {"r", "s"};
        s.max_axioms = 5;
        s.nominal_rate = nominals ? 0.2 : 0.0;
        Instance in;
        in.kb = random_kb(rng, s, 0.0);
        auto syms = symbols_of(in.kb.tbox);
        if (nominals && syms.nominals.empty()) continue;
        std::vector<std::string> cs(syms.concepts.begin(), syms.concepts.end());
        std::vector<std::string> rs(syms.roles.begin(), syms.roles.end());
        if (cs.empty() || rs.empty()) continue;
        int shape = std::uniform_int_distribution<int>(0, 2)(rng);
        if (shape == 0) {
            in.query.atoms = {{pick(rng, cs), {"x"}}};
            in.query.answer_vars = {"x"};
        } else if (shape == 1) {
            in.query.atoms = {{pick(rng, rs), {"x", "y"}}};
            in.query.answer_vars = {"x", "y"};
        } else {
            in.query.atoms = {{pick(rng, rs), {"x", "y"}}, {pick(rng, cs), {"y"}}};
            std::sort(in.query.atoms.begin(), in.query.atoms.end());
            in.query.answer_vars = {"x"};
        }
        if (std::holds_alternative<Unsupported>(classify(make_omq(in.kb, in.query)))) continue;
        return in;
    }
}

datalog::DProgram random_ground_program(std::mt19937_64& rng, std::size_t atoms, std::size_t rules) {
    datalog::DProgram p;
    auto a = [&] { return datalog::atom("p" + std::to_string(std::uniform_int_distribution<std::size_t>(0, atoms - 1)(rng))); };
    for (std::size_t i = 0; i < rules; ++i) {
        datalog::DRule r;
        std::size_t nh = coin(rng, 0.1) ? 0 : coin(rng, 0.25) ? 2 : 1;
        for (std::size_t k = 0; k < nh; ++k) r.head.push_back(a());
        std::size_t np = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
        std::size_t nn = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
        for (std::size_t k = 0; k < np; ++k) r.pos.push_back(a());
        for (std::size_t k = 0; k < nn; ++k) r.neg.push_back(a());
        p.add(std::move(r));
    }
    return p;
}

std::vector<Axiom> tbox_family(std::size_t k) {
    auto name = [&](std::size_t i) { return ConceptExpr::name("A" + std::to_string(i % k + 1)); };
    std::vector<Axiom> t;
    for (std::size_t i = 0; i < k; ++i) {
        t.push_back(ConceptIncl{name(i), ConceptExpr::exists({"r", false}, name(i + 1))});
        t.push_back(ConceptIncl{name(i), ConceptExpr::forall({"s", false}, name(i + 2))});
        t.push_back(ConceptIncl{ConceptExpr::conj(name(i), name(i + 1)), name(i + 3)});
    }
    t.push_back(RoleIncl{{"r", false}, {"s", false}});
    return t;
}

} // namespace omq::test
