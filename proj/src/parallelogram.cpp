#include "ppd/parallelogram.hpp"

#include <atomic>
#include <thread>

namespace ppd {

namespace {

void check_pair_args(std::int64_t x1, std::int64_t x2) {
    if (x2 < 1 || x2 > x1)
        throw UsageError("enumerate_pair requires 1 <= x2 <= x1");
    if (x1 > kMaxEdgeBudget)
        throw BudgetError("edge length exceeds the arithmetic budget of " +
                          std::to_string(kMaxEdgeBudget));
}

// Core scan shared by enumerate_pair and the index build: minor diagonals d
// in (x1-x2, isqrt(x1^2+x2^2)] with 2*x1^2+2*x2^2-d^2 a perfect square.
// The strict lower bound excludes the collinear case; the upper bound picks
// the minor diagonal of each parallelogram exactly once (a rectangle hits
// d^2 == x1^2+x2^2 and appears once with equal diagonals).
template <class Sink>
void scan_minor_diagonals(std::int64_t x1, std::int64_t x2, Sink&& sink) {
    const std::int64_t two_sq = 2 * x1 * x1 + 2 * x2 * x2;
    const std::int64_t d_hi = static_cast<std::int64_t>(
        isqrt(static_cast<std::uint64_t>(x1 * x1 + x2 * x2)));
    for (std::int64_t d = x1 - x2 + 1; d <= d_hi; ++d) {
        if (auto major = is_perfect_square(two_sq - d * d))
            sink(d, *major);
    }
}

struct IndexRow {
    std::vector<std::uint32_t> partners;        // b values with nonempty lists
    std::vector<std::uint32_t> pair_sizes;      // list length per partner
    std::vector<std::uint32_t> diagonals;       // concatenated d lists
};

} // namespace

std::vector<PerfectParallelogram> enumerate_pair(std::int64_t x1, std::int64_t x2) {
    check_pair_args(x1, x2);
    std::vector<PerfectParallelogram> out;
    scan_minor_diagonals(x1, x2, [&](std::int64_t d, std::int64_t major) {
        out.push_back({x1, x2, d, major});
    });
    return out;
}

ParallelogramIndex enumerate_range(std::int64_t max_edge, std::int64_t min_edge,
                                   int workers) {
    if (min_edge < 1 || min_edge > max_edge)
        throw UsageError("enumerate_range requires 1 <= min_edge <= max_edge");
    if (max_edge > kMaxEdgeBudget)
        throw BudgetError("max_edge exceeds the arithmetic budget of " +
                          std::to_string(kMaxEdgeBudget));
    if (workers < 1) throw UsageError("workers must be >= 1");

    // per-x1 rows are independent, so any partition of the x1 range yields
    // the same index
    const auto n_rows = static_cast<std::size_t>(max_edge);
    std::vector<IndexRow> rows(n_rows + 1);

    auto build_row = [&](std::int64_t a) {
        IndexRow& row = rows[static_cast<std::size_t>(a)];
        for (std::int64_t b = min_edge; b <= a; ++b) {
            const std::size_t before = row.diagonals.size();
            scan_minor_diagonals(a, b, [&](std::int64_t d, std::int64_t) {
                row.diagonals.push_back(static_cast<std::uint32_t>(d));
            });
            if (row.diagonals.size() != before) {
                row.partners.push_back(static_cast<std::uint32_t>(b));
                row.pair_sizes.push_back(
                    static_cast<std::uint32_t>(row.diagonals.size() - before));
            }
        }
    };

    if (workers == 1) {
        for (std::int64_t a = min_edge; a <= max_edge; ++a) build_row(a);
    } else {
        std::atomic<std::int64_t> next{min_edge};
        auto drain = [&] {
            for (;;) {
                const std::int64_t a = next.fetch_add(1);
                if (a > max_edge) break;
                build_row(a);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
        drain();
        for (auto& t : pool) t.join();
    }

    ParallelogramIndex idx;
    idx.max_edge_ = max_edge;
    idx.min_edge_ = min_edge;
    const std::size_t n_pairs = ParallelogramIndex::pair_id(max_edge, max_edge) + 1;
    idx.offsets_.assign(n_pairs + 1, 0);
    idx.partner_offsets_.assign(n_rows + 2, 0);

    std::uint64_t total_d = 0, total_b = 0;
    for (std::int64_t a = min_edge; a <= max_edge; ++a) {
        total_d += rows[static_cast<std::size_t>(a)].diagonals.size();
        total_b += rows[static_cast<std::size_t>(a)].partners.size();
    }
    if (total_d + 1 > 0xFFFFFFFFull)
        throw BudgetError("parallelogram index exceeds 32-bit offset capacity");
    idx.diagonals_.reserve(total_d);
    idx.partners_.reserve(total_b);

    for (std::int64_t a = 1; a <= max_edge; ++a) {
        const IndexRow& row = rows[static_cast<std::size_t>(a)];
        idx.partner_offsets_[static_cast<std::size_t>(a)] =
            static_cast<std::uint32_t>(idx.partners_.size());
        std::size_t pos = 0;
        for (std::size_t i = 0; i < row.partners.size(); ++i) {
            const std::uint32_t b = row.partners[i];
            const std::uint32_t len = row.pair_sizes[i];
            idx.partners_.push_back(b);
            const std::size_t id = ParallelogramIndex::pair_id(a, b);
            idx.offsets_[id] = static_cast<std::uint32_t>(idx.diagonals_.size());
            idx.offsets_[id + 1] = static_cast<std::uint32_t>(idx.diagonals_.size() + len);
            idx.diagonals_.insert(idx.diagonals_.end(), row.diagonals.begin() + pos,
                                  row.diagonals.begin() + pos + len);
            pos += len;
        }
        idx.partner_offsets_[static_cast<std::size_t>(a) + 1] =
            static_cast<std::uint32_t>(idx.partners_.size());
    }

    // fill offset gaps of empty pairs so every lookup sees a valid range
    std::uint32_t run = 0;
    for (std::size_t id = 0; id <= n_pairs; ++id) {
        if (idx.offsets_[id] < run) idx.offsets_[id] = run;
        run = idx.offsets_[id];
    }
    return idx;
}

} // namespace ppd
