#include "ppd/search.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

namespace ppd {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json stats_to_json_obj(const FunnelStats& s) {
    ordered_json j;
    j["configs_tested"] = s.configs_tested;
    j["pass_ge1"] = s.pass_ge1;
    j["pass_ge2"] = s.pass_ge2;
    j["pass_ge3"] = s.pass_ge3;
    j["pass_all4"] = s.pass_all4;
    j["realizable"] = s.realizable;
    return j;
}

FunnelStats stats_from_json_obj(const ordered_json& j) {
    FunnelStats s;
    const char* keys[6] = {"configs_tested", "pass_ge1", "pass_ge2",
                           "pass_ge3",      "pass_all4", "realizable"};
    std::uint64_t* out[6] = {&s.configs_tested, &s.pass_ge1, &s.pass_ge2,
                             &s.pass_ge3,       &s.pass_all4, &s.realizable};
    for (int i = 0; i < 6; ++i) {
        if (!j.contains(keys[i]) || !j.at(keys[i]).is_number_unsigned())
            throw CheckpointError(CheckpointError::Kind::corrupt,
                                  std::string("stats field '") + keys[i] +
                                      "' missing or not a count");
        *out[i] = j.at(keys[i]).get<std::uint64_t>();
    }
    return s;
}

// Funnel evaluation of every candidate triple with largest edge x1.
struct X1Result {
    std::int64_t x1 = 0;
    FunnelStats stats;
    std::vector<Certificate> certificates;
};

X1Result process_x1(const ParallelogramIndex& idx, std::int64_t x1,
                    const SearchOptions& opts) {
    X1Result res;
    res.x1 = x1;
    FunnelStats& st = res.stats;
    assemble(idx, x1, [&](const CandidateTriple& t) {
        ++st.configs_tested;
        const auto msq = body_diagonal_squares(t);
        int conds = 0;
        for (const std::int64_t v : msq)
            if (v > 0 && is_perfect_square(v)) ++conds;
        if (conds == 0) return;
        ++st.pass_ge1;
        if (conds >= 2) ++st.pass_ge2;
        if (conds >= 3) ++st.pass_ge3;
        if (conds < 4) return;
        ++st.pass_all4;
        const auto body = body_diagonals(t);
        if (opts.on_pass_all4) opts.on_pass_all4(t, *body);
        if (realizability(t).decision != Realizability::realizable) return;
        Certificate cert = build(t, *body);
        if (opts.primitive_only && !cert.primitive) return;
        ++st.realizable;
        res.certificates.push_back(std::move(cert));
    });
    return res;
}

void validate_options(const SearchOptions& opts) {
    if (opts.max_edge < 1)
        throw UsageError("max_edge must be >= 1");
    if (opts.min_edge < 1 || opts.min_edge > opts.max_edge)
        throw UsageError("min_edge must satisfy 1 <= min_edge <= max_edge");
    if (opts.workers < 1)
        throw UsageError("workers must be >= 1");
    if (opts.max_edge > kMaxEdgeBudget)
        throw BudgetError("max_edge exceeds the arithmetic budget of " +
                          std::to_string(kMaxEdgeBudget));
}

Checkpoint make_checkpoint(const SearchOptions& opts,
                           const std::map<std::int64_t, std::vector<Certificate>>& done,
                           const FunnelStats& stats) {
    Checkpoint cp;
    cp.max_edge = opts.max_edge;
    cp.min_edge = opts.min_edge;
    cp.primitive_only = opts.primitive_only;
    cp.stats = stats;
    for (const auto& [x1, certs] : done) {
        cp.completed_x1.push_back(x1);
        for (const auto& c : certs) cp.certificates.push_back(c);
    }
    cp.emitted = cp.certificates.size();
    return cp;
}

SearchResult execute(const SearchOptions& opts,
                     std::map<std::int64_t, std::vector<Certificate>> done,
                     FunnelStats stats) {
    const ParallelogramIndex idx = enumerate_range(opts.max_edge, 1, opts.workers);

    std::vector<std::int64_t> worklist;
    for (std::int64_t x1 = opts.min_edge; x1 <= opts.max_edge; ++x1)
        if (!done.count(x1)) worklist.push_back(x1);

    const std::uint64_t quota =
        opts.halt_after < 0 ? worklist.size()
                            : std::min<std::uint64_t>(
                                  static_cast<std::uint64_t>(opts.halt_after),
                                  worklist.size());

    std::mutex mu;
    std::condition_variable cv;
    std::deque<X1Result> inbox;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr worker_error;

    auto worker = [&] {
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= worklist.size()) return;
            try {
                X1Result r = process_x1(idx, worklist[i], opts);
                std::lock_guard lock(mu);
                inbox.push_back(std::move(r));
                cv.notify_all();
            } catch (...) {
                std::lock_guard lock(mu);
                if (!worker_error) worker_error = std::current_exception();
                stop.store(true);
                cv.notify_all();
                return;
            }
        }
    };

    const int pool_size =
        static_cast<int>(std::min<std::uint64_t>(
            static_cast<std::uint64_t>(opts.workers), std::max<std::uint64_t>(quota, 1)));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(pool_size));
    if (quota > 0)
        for (int w = 0; w < pool_size; ++w) pool.emplace_back(worker);

    SearchResult result;
    std::int64_t emit_front = opts.min_edge;
    auto advance_frontier = [&] {
        for (auto it = done.find(emit_front); it != done.end();
             it = done.find(++emit_front)) {
            for (const auto& c : it->second) {
                result.certificates.push_back(c);
                if (opts.sink) opts.sink(c);
            }
        }
    };
    advance_frontier(); // restored prefix, if any

    auto shut_down = [&] {
        stop.store(true);
        cv.notify_all();
        for (auto& t : pool)
            if (t.joinable()) t.join();
    };

    std::uint64_t completed_now = 0;
    try {
        std::unique_lock lock(mu);
        while (completed_now < quota) {
            cv.wait(lock, [&] { return !inbox.empty() || worker_error; });
            if (worker_error) break;
            X1Result r = std::move(inbox.front());
            inbox.pop_front();
            lock.unlock();

            stats += r.stats;
            done.emplace(r.x1, std::move(r.certificates));
            ++completed_now;
            if (completed_now >= quota) stop.store(true);
            advance_frontier();
            if (opts.diagnostics) {
                *opts.diagnostics << "# x1 " << r.x1 << " done | configs "
                                  << stats.configs_tested << " | ge1 " << stats.pass_ge1
                                  << " | ge2 " << stats.pass_ge2 << " | ge3 "
                                  << stats.pass_ge3 << " | all4 " << stats.pass_all4
                                  << " | realizable " << stats.realizable << "\n";
            }
            if (!opts.checkpoint_path.empty()) {
                const Checkpoint cp = make_checkpoint(opts, done, stats);
                if (!cp.stats.monotone())
                    throw CheckpointError(CheckpointError::Kind::corrupt,
                                          "funnel counters lost monotonicity");
                save_checkpoint(cp, opts.checkpoint_path);
            }

            lock.lock();
        }
    } catch (...) {
        shut_down();
        throw;
    }
    shut_down();
    if (worker_error) std::rethrow_exception(worker_error);

    result.stats = stats;
    result.complete =
        done.size() == static_cast<std::size_t>(opts.max_edge - opts.min_edge + 1);
    return result;
}

void validate_against_options(const Checkpoint& cp, const SearchOptions& opts) {
    if (cp.max_edge != opts.max_edge || cp.min_edge != opts.min_edge ||
        cp.primitive_only != opts.primitive_only) {
        throw CheckpointError(
            CheckpointError::Kind::mismatch,
            "checkpoint parameters (max_edge " + std::to_string(cp.max_edge) +
                ", min_edge " + std::to_string(cp.min_edge) + ", primitive_only " +
                (cp.primitive_only ? "true" : "false") +
                ") do not match the requested run");
    }
}

} // namespace

std::string stats_to_json(const FunnelStats& s) { return stats_to_json_obj(s).dump(); }

FunnelStats stats_from_json(std::string_view text) {
    const auto j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw CheckpointError(CheckpointError::Kind::corrupt, "malformed stats JSON");
    return stats_from_json_obj(j);
}

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
    ordered_json j;
    j["version"] = cp.version;
    j["max_edge"] = cp.max_edge;
    j["min_edge"] = cp.min_edge;
    j["primitive_only"] = cp.primitive_only;
    j["completed_x1"] = cp.completed_x1;
    j["stats"] = stats_to_json_obj(cp.stats);
    j["emitted"] = cp.emitted;
    ordered_json certs = ordered_json::array();
    for (const auto& c : cp.certificates)
        certs.push_back(ordered_json::parse(to_json_line(c)));
    j["certificates"] = std::move(certs);

    const std::filesystem::path target(path);
    const std::filesystem::path tmp(path + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot write checkpoint file " + tmp.string());
        out << j.dump() << "\n";
        out.flush();
        if (!out) throw IoError("short write to checkpoint file " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw IoError("cannot replace checkpoint file " + path + ": " + ec.message());
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw CheckpointError(CheckpointError::Kind::corrupt,
                              "cannot read checkpoint file " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    const auto j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw CheckpointError(CheckpointError::Kind::corrupt,
                              "checkpoint is not valid JSON: " + path);

    auto corrupt = [&](const std::string& why) {
        return CheckpointError(CheckpointError::Kind::corrupt,
                               "corrupt checkpoint " + path + ": " + why);
    };

    Checkpoint cp;
    if (!j.contains("version") || !j["version"].is_number_integer())
        throw corrupt("missing version");
    cp.version = j["version"].get<int>();
    if (cp.version != 1)
        throw corrupt("unsupported version " + std::to_string(cp.version));
    for (const char* key : {"max_edge", "min_edge"})
        if (!j.contains(key) || !j[key].is_number_integer())
            throw corrupt(std::string("missing field '") + key + "'");
    cp.max_edge = j["max_edge"].get<std::int64_t>();
    cp.min_edge = j["min_edge"].get<std::int64_t>();
    if (!j.contains("primitive_only") || !j["primitive_only"].is_boolean())
        throw corrupt("missing field 'primitive_only'");
    cp.primitive_only = j["primitive_only"].get<bool>();
    if (!j.contains("completed_x1") || !j["completed_x1"].is_array())
        throw corrupt("missing field 'completed_x1'");
    for (const auto& v : j["completed_x1"]) {
        if (!v.is_number_integer()) throw corrupt("completed_x1 must hold integers");
        cp.completed_x1.push_back(v.get<std::int64_t>());
    }
    if (!j.contains("stats") || !j["stats"].is_object()) throw corrupt("missing stats");
    try {
        cp.stats = stats_from_json_obj(j["stats"]);
    } catch (const CheckpointError& e) {
        throw corrupt(e.what());
    }
    if (!cp.stats.monotone()) throw corrupt("funnel counters are not monotone");
    if (!j.contains("emitted") || !j["emitted"].is_number_unsigned())
        throw corrupt("missing field 'emitted'");
    cp.emitted = j["emitted"].get<std::uint64_t>();
    if (!j.contains("certificates") || !j["certificates"].is_array())
        throw corrupt("missing field 'certificates'");
    for (const auto& cj : j["certificates"]) {
        const auto rec = parse_record(cj.dump());
        if (!rec.cert) throw corrupt("bad certificate record: " + rec.error);
        const auto verdict = verify(*rec.cert);
        if (!verdict.valid)
            throw corrupt("stored certificate fails verification: " + verdict.reason);
        cp.certificates.push_back(*rec.cert);
    }
    if (cp.emitted != cp.certificates.size())
        throw corrupt("emitted count disagrees with stored certificates");

    std::set<std::int64_t> seen;
    for (const std::int64_t x1 : cp.completed_x1) {
        if (x1 < cp.min_edge || x1 > cp.max_edge) throw corrupt("completed_x1 out of range");
        if (!seen.insert(x1).second) throw corrupt("duplicate completed_x1 entry");
    }
    for (const auto& c : cp.certificates)
        if (!seen.count(c.edges[0]))
            throw corrupt("certificate for an x1 not marked complete");
    return cp;
}

SearchResult run_search(const SearchOptions& opts) {
    validate_options(opts);
    return execute(opts, {}, {});
}

SearchResult resume_search(const SearchOptions& opts) {
    validate_options(opts);
    if (opts.checkpoint_path.empty())
        throw UsageError("resume requires a checkpoint path");
    const Checkpoint cp = load_checkpoint(opts.checkpoint_path);
    validate_against_options(cp, opts);

    std::map<std::int64_t, std::vector<Certificate>> done;
    for (const std::int64_t x1 : cp.completed_x1) done[x1];
    for (const auto& c : cp.certificates) done[c.edges[0]].push_back(c);
    return execute(opts, std::move(done), cp.stats);
}

} // namespace ppd
