// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// A small conflict-driven clause-learning SAT solver. Deterministic:
// ties in the variable order are broken by variable index, initial
// phases are false.
#pragma once

#include <cstdint>
#include <vector>

namespace omq::sat {

// Literal encoding: 2*var for the positive literal, 2*var+1 for the negative.
using Lit = std::uint32_t;
inline Lit pos(std::uint32_t v) { return 2 * v; }
inline Lit neg(std::uint32_t v) { return 2 * v + 1; }
inline Lit lit(std::uint32_t v, bool value) { return value ? pos(v) : neg(v); }
inline Lit negate(Lit l) { return l ^ 1u; }
inline std::uint32_t var_of(Lit l) { return l >> 1; }
inline bool sign_of(Lit l) { return (l & 1u) == 0; }  // true for positive literals

enum class Result { Sat, Unsat, Unknown };

class Solver {
public:
    Solver();
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    std::uint32_t new_var();
    std::uint32_t num_vars() const;

    // Returns false once the clause set is unsatisfiable at the root.
    bool add_clause(std::vector<Lit> lits);
    bool okay() const;

    // conflict_limit == 0 means unlimited.
    Result solve(const std::vector<Lit>& assumptions = {}, std::uint64_t conflict_limit = 0);

    // Model of the last Sat answer.
    bool model_value(std::uint32_t v) const;
    const std::vector<char>& model() const;

    // Variables with higher priority are always decided before lower ones;
    // activity orders variables of equal priority.
    void set_priority(std::uint32_t v, int priority);

    std::uint64_t conflicts() const;
    std::uint64_t decisions() const;

private:
    struct Impl;
    Impl* impl_;
};

} // namespace omq::sat
