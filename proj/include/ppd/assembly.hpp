#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "ppd/parallelogram.hpp"

// Joining perfect parallelograms into edge-matched non-oblique candidate
// triples, the four integer body-diagonal conditions, and the exact
// realizability decision.

namespace ppd {

// Three edges with a chosen minor face diagonal per edge pair. Canonical
// ordering x1 >= x2 >= x3 >= 1; each face (xi, xj, dij) is a perfect
// parallelogram with its minor diagonal, which makes every face cosine lie
// in [0, 1) (non-oblique vertex).
struct CandidateTriple {
    std::int64_t x1, x2, x3;
    std::int64_t d12, d13, d23;

    bool operator==(const CandidateTriple&) const = default;
    auto operator<=>(const CandidateTriple&) const = default;
};

// The four body-diagonal lengths; m_i is the diagonal in which edge i
// contributes negatively, m4 the all-positive one.
struct BodyDiagonals {
    std::int64_t m1, m2, m3, m4;

    bool operator==(const BodyDiagonals&) const = default;
};

// Face cosine as the exact rational q_ij / (2 x_i x_j) with
// q_ij = x_i^2 + x_j^2 - d_ij^2. Filters never reduce this to floating point.
struct ExactCosine {
    std::int64_t num;
    std::int64_t den;

    bool operator==(const ExactCosine&) const = default;
};

enum class Realizability { realizable, degenerate, non_realizable };

struct RealizabilityResult {
    Realizability decision;
    Int128 det; // determinant of M = 2 * Gram, the audit witness
};

// The squared body-diagonal lengths (may be non-positive for junk triples;
// callers filter). Order: m1^2, m2^2, m3^2, m4^2.
inline std::array<std::int64_t, 4> body_diagonal_squares(const CandidateTriple& t) {
    const std::int64_t e1 = t.x1 * t.x1, e2 = t.x2 * t.x2, e3 = t.x3 * t.x3;
    const std::int64_t f12 = t.d12 * t.d12, f13 = t.d13 * t.d13, f23 = t.d23 * t.d23;
    return {-e1 + e2 + e3 + f12 + f13 - f23,
            e1 - e2 + e3 + f12 - f13 + f23,
            e1 + e2 - e3 - f12 + f13 + f23,
            3 * (e1 + e2 + e3) - (f12 + f13 + f23)};
}

// The four roots when every squared body diagonal is strictly positive and a
// perfect square; nullopt is the filtered outcome.
inline std::optional<BodyDiagonals> body_diagonals(const CandidateTriple& t) {
    const auto sq = body_diagonal_squares(t);
    BodyDiagonals b{};
    std::int64_t* out[4] = {&b.m1, &b.m2, &b.m3, &b.m4};
    for (int i = 0; i < 4; ++i) {
        if (sq[static_cast<std::size_t>(i)] <= 0) return std::nullopt;
        const auto root = is_perfect_square(sq[static_cast<std::size_t>(i)]);
        if (!root) return std::nullopt;
        *out[i] = *root;
    }
    return b;
}

inline std::array<ExactCosine, 3> face_cosines(const CandidateTriple& t) {
    return {{{t.x1 * t.x1 + t.x2 * t.x2 - t.d12 * t.d12, 2 * t.x1 * t.x2},
             {t.x1 * t.x1 + t.x3 * t.x3 - t.d13 * t.d13, 2 * t.x1 * t.x3},
             {t.x2 * t.x2 + t.x3 * t.x3 - t.d23 * t.d23, 2 * t.x2 * t.x3}}};
}

// Exact realizability in R^3. Forms the integer matrix M = 2 * Gram with
// diagonal (2x1^2, 2x2^2, 2x3^2) and off-diagonals q_ij and decides by the
// sign of det M. Under the non-oblique invariants the two leading minors of
// M are automatically positive, so det M > 0 is equivalent to positive
// definiteness.
RealizabilityResult realizability(const CandidateTriple& t);

// Coordinates (u, v, w) realizing a triple that passed realizability:
// u along the x-axis, v in the upper half plane, w with positive z. All 13
// lengths are reproduced within 1e-9 relative tolerance. Throws UsageError
// when the triple is not realizable.
std::array<std::array<double, 3>, 3> embed(const CandidateTriple& t);

// Streams every canonical candidate triple with largest edge exactly x1, in
// ascending (x2, x3, d12, d13, d23) order. The index must cover all edges
// <= x1. The visitor is invoked as visit(const CandidateTriple&).
template <class Visitor>
void assemble(const ParallelogramIndex& idx, std::int64_t x1, Visitor&& visit) {
    if (x1 < 1 || x1 > idx.max_edge())
        throw UsageError("assemble requires an index covering x1");
    for (std::uint32_t x2 : idx.partners(x1)) {
        const auto list12 = idx.diagonals(x1, x2);
        for (std::uint32_t x3 : idx.partners(x2)) {
            const auto list13 = idx.diagonals(x1, x3);
            if (list13.empty()) continue;
            const auto list23 = idx.diagonals(x2, x3);
            for (std::uint32_t d12 : list12)
                for (std::uint32_t d13 : list13)
                    for (std::uint32_t d23 : list23)
                        visit(CandidateTriple{x1, x2, x3, d12, d13, d23});
        }
    }
}

// Convenience collector for tests and small bounds.
std::vector<CandidateTriple> assemble_collect(const ParallelogramIndex& idx,
                                              std::int64_t x1);

} // namespace ppd
