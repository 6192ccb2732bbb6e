// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/query.hpp"

#include "omq/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace omq {

OMQ make_omq(const KnowledgeBase& kb, const ConjunctiveQuery& q) {
    OMQ omq;
    omq.tbox = normalize(kb.tbox);
    omq.sigma = kb.sigma;
    omq.query = q;
    for (const auto& a : q.atoms) {
        if (a.is_role()) {
            if (omq.tbox.concept_names.count(a.predicate))
                throw Error("query uses concept '" + a.predicate + "' as a role");
            declare_role(omq.tbox, a.predicate);
        } else {
            if (omq.tbox.role_names.count(a.predicate))
                throw Error("query uses role '" + a.predicate + "' as a concept");
            declare_concept(omq.tbox, a.predicate);
        }
    }
    return omq;
}

std::string to_string(const QueryClass& c) {
    if (std::holds_alternative<CSafe>(c)) return "c-safe";
    if (std::holds_alternative<CAcyclic>(c)) return "c-acyclic";
    return "unsupported: " + std::get<Unsupported>(c).reason;
}

std::set<std::string> c_variables(const OMQ& omq) {
    std::set<std::string> cv(omq.query.answer_vars.begin(), omq.query.answer_vars.end());
    for (const auto& a : omq.query.atoms) {
        if (a.is_role()) {
            if (subsumed_by_closed({a.predicate, false}, omq.tbox.hierarchy, omq.sigma))
                cv.insert(a.vars.begin(), a.vars.end());
        } else if (omq.sigma.count(a.predicate)) {
            cv.insert(a.vars[0]);
        }
    }
    return cv;
}

namespace {

struct Components {
    std::vector<std::vector<std::string>> groups;  // each sorted; groups ordered by first element
};

std::string find(std::map<std::string, std::string>& uf, const std::string& x) {
    std::string r = x;
    while (uf[r] != r) r = uf[r];
    return r;
}

// Acyclicity and component structure of the role-atom graph over `atoms`.
std::variant<Components, std::string> analyse(const std::vector<QueryAtom>& atoms) {
    std::map<std::string, std::string> uf;
    for (const auto& a : atoms)
        for (const auto& v : a.vars) uf.emplace(v, v);
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& a : atoms) {
        if (!a.is_role()) continue;
        const auto& x = a.vars[0];
        const auto& y = a.vars[1];
        if (x == y) return "self-loop on variable " + x;
        auto e = std::minmax(x, y);
        if (!edges.insert({e.first, e.second}).second)
            return "more than one role atom between " + e.first + " and " + e.second;
        auto rx = find(uf, x), ry = find(uf, y);
        if (rx == ry) return "cycle through " + x + " and " + y;
        uf[rx] = ry;
    }
    std::map<std::string, std::vector<std::string>> by_root;
    for (const auto& [v, _] : uf) by_root[find(uf, v)].push_back(v);
    Components c;
    for (auto& [_, g] : by_root) c.groups.push_back(g);
    std::sort(c.groups.begin(), c.groups.end());
    return c;
}

std::vector<QueryAtom> reduced_atoms(const ConjunctiveQuery& q, const std::set<std::string>& cv,
                                     std::vector<QueryAtom>* dropped) {
    std::vector<QueryAtom> out;
    for (const auto& a : q.atoms) {
        if (a.is_role() && cv.count(a.vars[0]) && cv.count(a.vars[1])) {
            if (dropped) dropped->push_back(a);
        } else {
            out.push_back(a);
        }
    }
    return out;
}

} // namespace

QueryClass classify(const OMQ& omq) {
    auto cv = c_variables(omq);
    auto vars = omq.query.variables();
    if (std::all_of(vars.begin(), vars.end(), [&](const std::string& v) { return cv.count(v) > 0; }))
        return CSafe{};
    auto res = analyse(reduced_atoms(omq.query, cv, nullptr));
    if (auto* why = std::get_if<std::string>(&res)) return Unsupported{*why};
    for (const auto& g : std::get<Components>(res).groups) {
        auto n = std::count_if(g.begin(), g.end(), [&](const std::string& v) { return cv.count(v) > 0; });
        if (n != 1) {
            std::string names;
            for (const auto& v : g) names += (names.empty() ? "" : ",") + v;
            return Unsupported{"component {" + names + "} has " + std::to_string(n) + " c-variables, expected one"};
        }
    }
    return CAcyclic{};
}

ConceptExpr query_concept(const ConjunctiveQuery& q, const std::string& root) {
    auto vars = q.variables();
    if (!vars.count(root)) throw Error("root variable '" + root + "' does not occur in the query");
    auto res = analyse(q.atoms);
    if (auto* why = std::get_if<std::string>(&res)) throw Error("query is not acyclic: " + *why);
    if (std::get<Components>(res).groups.size() != 1) throw Error("query is not connected");

    std::function<ConceptExpr(const std::string&, const std::string&)> build =
        [&](const std::string& x, const std::string& parent) {
            std::vector<ConceptExpr> parts;
            for (const auto& a : q.atoms)
                if (!a.is_role() && a.vars[0] == x) parts.push_back(ConceptExpr::name(a.predicate));
            for (const auto& a : q.atoms) {
                if (!a.is_role()) continue;
                if (a.vars[0] == x && a.vars[1] != parent)
                    parts.push_back(ConceptExpr::exists({a.predicate, false}, build(a.vars[1], x)));
                else if (a.vars[1] == x && a.vars[0] != parent)
                    parts.push_back(ConceptExpr::exists({a.predicate, true}, build(a.vars[0], x)));
            }
            if (parts.empty()) return ConceptExpr::top();
            ConceptExpr c = parts[0];
            for (std::size_t i = 1; i < parts.size(); ++i) c = ConceptExpr::conj(c, parts[i]);
            return c;
        };
    return build(root, "");
}

OMQ rollup(const OMQ& omq) {
    auto cls = classify(omq);
    if (std::holds_alternative<CSafe>(cls)) return omq;
    if (auto* u = std::get_if<Unsupported>(&cls)) throw Error("unsupported query: " + u->reason);

    auto cv = c_variables(omq);
    std::vector<QueryAtom> dropped;
    auto rest = reduced_atoms(omq.query, cv, &dropped);
    auto comps = std::get<Components>(analyse(rest)).groups;

    OMQ out = omq;
    std::set<QueryAtom> atoms(dropped.begin(), dropped.end());
    std::vector<Axiom> extra;
    std::size_t n = 0;
    for (const auto& g : comps) {
        std::string root = *std::find_if(g.begin(), g.end(), [&](const std::string& v) { return cv.count(v) > 0; });
        ConjunctiveQuery sub;
        for (const auto& a : rest)
            if (std::find(g.begin(), g.end(), a.vars[0]) != g.end()) sub.atoms.push_back(a);
        std::string name;
        do {
            name = "_QT" + std::to_string(++n);
        } while (out.tbox.concept_names.count(name));
        extra.push_back(ConceptIncl{query_concept(sub, root), ConceptExpr::name(name)});
        atoms.insert({name, {root}});
        for (const auto& a : sub.atoms)
            if (!a.is_role() && a.vars[0] == root && omq.sigma.count(a.predicate)) atoms.insert(a);
    }
    normalize_into(out.tbox, extra);
    out.query.atoms.assign(atoms.begin(), atoms.end());
    if (!std::holds_alternative<CSafe>(classify(out))) throw Error("internal: rolled-up query is not c-safe");
    return out;
}

} // namespace omq
