// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Types, cores and the type elimination that decides whether a core
// extends to a model.
#pragma once

#include "omq/normalizer.hpp"
#include "omq/parser.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace omq {

// Bit i set iff basis element i is in the type.
struct TypeVec {
    std::uint64_t bits = 0;

    bool has(std::size_t i) const { return (bits >> i) & 1u; }
    void set(std::size_t i) { bits |= std::uint64_t{1} << i; }
    auto operator<=>(const TypeVec&) const = default;
    bool operator==(const TypeVec&) const = default;
};

class TypeContext {
public:
    TypeContext(NormalTBox tbox, std::set<std::string> sigma, std::vector<std::string> individuals);

    const NormalTBox& tbox() const { return tbox_; }
    const std::set<std::string>& sigma() const { return sigma_; }
    const std::vector<std::string>& individuals() const { return individuals_; }
    const std::vector<Basic>& basis() const { return basis_; }
    std::size_t k() const { return basis_.size(); }
    std::optional<std::size_t> index_of(const Basic& b) const;
    std::size_t index(const Basic& b) const;

    bool closed_role(const RoleExpr& r) const;
    bool closed_concept(const std::string& a) const { return sigma_.count(a) > 0; }

    std::uint64_t mask(const std::vector<Basic>& bs) const;
    bool satisfies_n1(TypeVec t) const;
    bool is_c_type(TypeVec t) const;
    std::string str(TypeVec t) const;  // comma-separated basis names

private:
    NormalTBox tbox_;
    std::set<std::string> sigma_;
    std::vector<std::string> individuals_;
    std::vector<Basic> basis_;
    std::map<Basic, std::size_t> index_;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> n1_masks_;
    std::uint64_t c_mask_ = 0;
};

// An individual, or the fringe element parent^(fringe+1).
struct Element {
    std::string ind;
    int fringe = -1;

    bool is_fringe() const { return fringe >= 0; }
    std::string str() const;
    static Element parse(const std::string& s);
    auto operator<=>(const Element&) const = default;
    bool operator==(const Element&) const = default;
};

struct FringeId {
    std::string parent;
    std::size_t axiom = 0;

    Element element() const { return {parent, static_cast<int>(axiom)}; }
    auto operator<=>(const FringeId&) const = default;
    bool operator==(const FringeId&) const = default;
};

struct Core {
    std::vector<std::string> individuals;
    std::set<FringeId> fringe;
    std::map<std::string, std::set<Element>> concept_ext;
    std::map<std::string, std::set<std::pair<Element, Element>>> role_ext;

    std::vector<Element> domain() const;
    bool has(const Element& e) const;
    bool in_concept(const std::string& a, const Element& e) const;
    bool in_role(const RoleExpr& r, const Element& d, const Element& e) const;
    std::string str() const;  // canonical text
    bool operator==(const Core&) const = default;
};

Core core_from_text(const CoreText& text, const TypeContext& ctx);

struct MarkResult {
    std::vector<TypeVec> marked;
    std::vector<TypeVec> unmarked;
    std::size_t iterations = 0;

    bool is_marked(TypeVec t) const;
};

struct CoreReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

TypeVec type_of(const Element& e, const Core& core, const TypeContext& ctx);
bool is_c_type(TypeVec t, const TypeContext& ctx);
bool lc_check(TypeVec t, const Core& core, const TypeContext& ctx);
CoreReport validate_core(const Core& core, const TypeContext& ctx, const std::vector<Assertion>& abox);

// Type elimination over the realized types of the core's individuals.
MarkResult mark(const TypeContext& ctx, const std::set<TypeVec>& realized);
MarkResult mark(const TypeContext& ctx, const Core& core);
bool has_nonlosing_strategy(const Core& core, const TypeContext& ctx);
bool has_nonlosing_strategy(const Core& core, const TypeContext& ctx, const MarkResult& m);

std::string dump_types(const MarkResult& m, const TypeContext& ctx);

} // namespace omq
