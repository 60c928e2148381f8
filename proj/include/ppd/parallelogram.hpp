#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppd/exact_arith.hpp"

// Enumeration of perfect parallelograms (integer edges, integer minor and
// major diagonals) with bounded edges, and a pair-keyed index used by the
// triple assembly join.

namespace ppd {

struct PerfectParallelogram {
    std::int64_t x1;      // longer edge, x1 >= x2 >= 1
    std::int64_t x2;      // shorter edge
    std::int64_t d_minor; // x1 - x2 < d_minor, d_minor^2 <= x1^2 + x2^2
    std::int64_t d_major; // d_major^2 = 2*x1^2 + 2*x2^2 - d_minor^2

    bool operator==(const PerfectParallelogram&) const = default;
};

// All perfect parallelograms on the ordered edge pair (x1, x2), ascending by
// minor diagonal. A rectangle contributes a single entry with
// d_minor == d_major. Throws UsageError unless 1 <= x2 <= x1, BudgetError
// beyond the arithmetic budget.
std::vector<PerfectParallelogram> enumerate_pair(std::int64_t x1, std::int64_t x2);

// Immutable index from unordered edge pair to the ascending list of minor
// diagonals admitting a perfect parallelogram. Rows are keyed canonically by
// (a, b) with a >= b. Storage is a flat CSR layout over the triangular pair
// space so lookups in the assembly join are O(1).
class ParallelogramIndex {
public:
    std::int64_t max_edge() const { return max_edge_; }
    std::int64_t min_edge() const { return min_edge_; }

    // Minor diagonals for the unordered pair {a, b}; empty when none.
    std::span<const std::uint32_t> diagonals(std::int64_t a, std::int64_t b) const {
        if (a < b) std::swap(a, b);
        const std::size_t id = pair_id(a, b);
        return {diagonals_.data() + offsets_[id], offsets_[id + 1] - offsets_[id]};
    }

    // Edges b <= a such that {a, b} admits at least one perfect
    // parallelogram, ascending.
    std::span<const std::uint32_t> partners(std::int64_t a) const {
        return {partners_.data() + partner_offsets_[static_cast<std::size_t>(a)],
                partner_offsets_[static_cast<std::size_t>(a) + 1] -
                    partner_offsets_[static_cast<std::size_t>(a)]};
    }

    std::uint64_t total_parallelograms() const { return diagonals_.size(); }

    // Approximate resident size of the index arrays.
    std::uint64_t footprint_bytes() const {
        return offsets_.size() * sizeof(std::uint32_t) +
               diagonals_.size() * sizeof(std::uint32_t) +
               partner_offsets_.size() * sizeof(std::uint32_t) +
               partners_.size() * sizeof(std::uint32_t);
    }

    // Visits every indexed parallelogram in ascending (x1, x2, d_minor)
    // order, the canonical dump order.
    template <class Visitor>
    void for_each(Visitor&& visit) const {
        for (std::int64_t a = min_edge_; a <= max_edge_; ++a) {
            for (std::uint32_t b : partners(a)) {
                for (std::uint32_t d : diagonals(a, b)) {
                    const std::int64_t dd = static_cast<std::int64_t>(d);
                    const std::int64_t major_sq = 2 * a * a + 2 * b * b - dd * dd;
                    visit(PerfectParallelogram{
                        a, b, dd, static_cast<std::int64_t>(isqrt(major_sq))});
                }
            }
        }
    }

    bool operator==(const ParallelogramIndex&) const = default;

private:
    friend ParallelogramIndex enumerate_range(std::int64_t, std::int64_t, int);

    // Triangular row id for a >= b >= 1.
    static std::size_t pair_id(std::int64_t a, std::int64_t b) {
        return static_cast<std::size_t>(a - 1) * a / 2 + static_cast<std::size_t>(b - 1);
    }

    std::int64_t max_edge_ = 0;
    std::int64_t min_edge_ = 1;
    std::vector<std::uint32_t> offsets_;         // pair_id -> range in diagonals_
    std::vector<std::uint32_t> diagonals_;       // concatenated ascending d lists
    std::vector<std::uint32_t> partner_offsets_; // edge -> range in partners_
    std::vector<std::uint32_t> partners_;        // concatenated ascending b lists
};

// Builds the index over all pairs min_edge <= x2 <= x1 <= max_edge. The x1
// range may be partitioned across workers; content is identical to a serial
// build. Throws UsageError for an invalid range, BudgetError beyond the
// arithmetic budget.
ParallelogramIndex enumerate_range(std::int64_t max_edge, std::int64_t min_edge = 1,
                                   int workers = 1);

} // namespace ppd
