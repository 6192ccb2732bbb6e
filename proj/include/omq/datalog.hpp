// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Disjunctive Datalog with stable negation and built-in inequality.
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace omq::datalog {

struct DTerm {
    bool is_var = false;
    std::string name;

    static DTerm var(std::string n) { return {true, std::move(n)}; }
    static DTerm cst(std::string n) { return {false, std::move(n)}; }
    auto operator<=>(const DTerm&) const = default;
    bool operator==(const DTerm&) const = default;
};

struct DAtom {
    std::string pred;
    std::vector<DTerm> args;

    bool ground() const;
    std::string str() const;
    auto operator<=>(const DAtom&) const = default;
    bool operator==(const DAtom&) const = default;
};

DAtom atom(std::string pred, std::vector<DTerm> args = {});

struct DRule {
    std::vector<DAtom> head;  // empty: constraint
    std::vector<DAtom> pos;
    std::vector<DAtom> neg;
    std::vector<std::pair<DTerm, DTerm>> neq;

    bool is_fact() const { return head.size() == 1 && pos.empty() && neg.empty() && neq.empty(); }
    std::string str() const;
    bool operator==(const DRule&) const = default;
};

// Every variable of the rule occurs in a positive body atom.
bool is_safe(const DRule& r);

struct DProgram {
    std::vector<DRule> rules;
    std::map<std::string, std::size_t> arities;

    // Appends a rule; throws on arity clash or unsafe rule.
    void add(DRule r);
    void append(const DProgram& other);
    std::size_t max_arity() const;
};

using HerbrandInterp = std::set<DAtom>;

// Interned ground program; atom ids are dense in [0, atoms.size()).
class GroundProgram {
public:
    struct Rule {
        std::vector<std::uint32_t> head, pos, neg;
    };

    std::uint32_t symbol(const std::string& s);
    const std::string& symbol_name(std::uint32_t id) const { return symbols_[id]; }
    std::optional<std::uint32_t> find_symbol(const std::string& s) const;

    std::uint32_t intern(std::uint32_t pred, const std::vector<std::uint32_t>& args);
    std::uint32_t intern(const DAtom& a);
    std::optional<std::uint32_t> find(const DAtom& a) const;

    std::size_t atom_count() const { return atoms_.size(); }
    std::uint32_t pred_of(std::uint32_t atom) const { return atoms_[atom].pred; }
    const std::vector<std::uint32_t>& args_of(std::uint32_t atom) const { return atoms_[atom].args; }
    DAtom to_atom(std::uint32_t id) const;
    std::string atom_str(std::uint32_t id) const { return to_atom(id).str(); }

    std::vector<Rule> rules;

    DProgram to_program() const;
    // Drops atoms no rule mentions and renumbers the rest.
    void compact();

private:
    struct GAtom {
        std::uint32_t pred;
        std::vector<std::uint32_t> args;
    };
    struct KeyHash {
        std::size_t operator()(const std::vector<std::uint32_t>& v) const;
    };
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, std::uint32_t> symbol_ids_;
    std::vector<GAtom> atoms_;
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, KeyHash> atom_ids_;
};

// Relevance-driven instantiation: rule instances are produced by joining
// over atoms derivable when negation is ignored. Negated atoms that can
// never be derived are dropped from the instances.
GroundProgram ground_program(const DProgram& p, const HerbrandInterp& facts);
DProgram ground(const DProgram& p, const HerbrandInterp& facts);

// Builds a ground program from ground rules as given, without simplification.
GroundProgram intern_ground(const DProgram& p);

using Bits = std::vector<char>;

Bits to_bits(const GroundProgram& g, const HerbrandInterp& i, bool* outside = nullptr);
HerbrandInterp from_bits(const GroundProgram& g, const Bits& b);

GroundProgram gl_reduct(const GroundProgram& g, const Bits& i);
DProgram gl_reduct(const DProgram& ground, const HerbrandInterp& i);

// Least model of the definite part (constraints ignored); `allowed`
// restricts derivations to a subset of atoms when given.
Bits least_model(const GroundProgram& g, const Bits* allowed = nullptr);

bool is_model(const GroundProgram& g, const Bits& i);
bool is_stable_model(const GroundProgram& g, const Bits& i);
bool is_stable_model(const DProgram& ground, const HerbrandInterp& i);

std::vector<HerbrandInterp> stable_models_bruteforce(const GroundProgram& g, std::size_t max_atoms = 24);
std::vector<HerbrandInterp> stable_models_bruteforce(const DProgram& ground, std::size_t max_atoms = 24);

std::string emit_text(const DProgram& p);
std::string term_text(const DTerm& t);

DAtom parse_atom(const std::string& text);
// One interpretation per non-empty line, atoms separated by whitespace.
std::vector<HerbrandInterp> parse_models(const std::string& text);

} // namespace omq::datalog
