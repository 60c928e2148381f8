#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ppd/certificate.hpp"

// Orchestration of the full funnel: enumerate, assemble, filter, decide,
// certify. Work is partitioned by x1 across a worker pool; output is
// deterministic for any worker count and any interrupt/resume split.

namespace ppd {

// Survivor counters per funnel stage. pass_geK counts candidate triples
// satisfying at least K of the four body-diagonal conditions (positivity
// plus squareness, evaluated independently); realizable counts certificates
// actually emitted.
struct FunnelStats {
    std::uint64_t configs_tested = 0;
    std::uint64_t pass_ge1 = 0;
    std::uint64_t pass_ge2 = 0;
    std::uint64_t pass_ge3 = 0;
    std::uint64_t pass_all4 = 0;
    std::uint64_t realizable = 0;

    FunnelStats& operator+=(const FunnelStats& o) {
        configs_tested += o.configs_tested;
        pass_ge1 += o.pass_ge1;
        pass_ge2 += o.pass_ge2;
        pass_ge3 += o.pass_ge3;
        pass_all4 += o.pass_all4;
        realizable += o.realizable;
        return *this;
    }

    bool monotone() const {
        return configs_tested >= pass_ge1 && pass_ge1 >= pass_ge2 &&
               pass_ge2 >= pass_ge3 && pass_ge3 >= pass_all4 &&
               pass_all4 >= realizable;
    }

    bool operator==(const FunnelStats&) const = default;
};

std::string stats_to_json(const FunnelStats& s);
FunnelStats stats_from_json(std::string_view text); // throws CheckpointError

struct SearchOptions {
    std::int64_t max_edge = 0;
    std::int64_t min_edge = 1;
    bool primitive_only = false;
    int workers = 1;

    // When set, progress is flushed atomically after every completed x1 and
    // a run can be resumed from the file.
    std::string checkpoint_path;

    // Stop scheduling new x1 units after this many have completed in this
    // invocation (< 0: run to completion). The deterministic interrupt used
    // by resume tests and time-boxed runs.
    std::int64_t halt_after = -1;

    // Ordered incremental sink: invoked in final output order as soon as a
    // contiguous prefix of x1 values has completed.
    std::function<void(const Certificate&)> sink;

    // Observer for triples passing all four body-diagonal conditions. May be
    // invoked concurrently from worker threads.
    std::function<void(const CandidateTriple&, const BodyDiagonals&)> on_pass_all4;

    // Progress line per completed x1 plus summary; nullptr silences.
    std::ostream* diagnostics = nullptr;
};

struct SearchResult {
    std::vector<Certificate> certificates; // ascending (x1, x2, x3, d12, d13, d23)
    FunnelStats stats;
    bool complete = true; // false when halt_after stopped the run early
};

// Persistent progress of one search run.
struct Checkpoint {
    int version = 1;
    std::int64_t max_edge = 0;
    std::int64_t min_edge = 1;
    bool primitive_only = false;
    std::vector<std::int64_t> completed_x1; // sorted
    FunnelStats stats;
    std::uint64_t emitted = 0;              // == certificates.size()
    std::vector<Certificate> certificates;  // for completed x1, sorted
};

Checkpoint load_checkpoint(const std::string& path); // throws CheckpointError
void save_checkpoint(const Checkpoint& cp, const std::string& path); // atomic

// Fresh run over max edges in [min_edge, max_edge]. Certificates and stats
// are independent of worker count. An existing checkpoint file at
// checkpoint_path is overwritten; use resume_search to continue one.
SearchResult run_search(const SearchOptions& opts);

// Continues a checkpointed run. The stored parameters must match the
// requested ones exactly (CheckpointError::mismatch otherwise); the merged
// result is identical to an uninterrupted run. Resuming a completed
// checkpoint re-emits its certificates and final stats.
SearchResult resume_search(const SearchOptions& opts);

} // namespace ppd
