#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>

#include "oracle.hpp"

#include "ppd/search.hpp"

using namespace ppd;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ppd-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const char* name) const { return (path / name).string(); }
};

std::string serialize_all(const SearchResult& r) {
    std::string s;
    for (const auto& c : r.certificates) s += to_json_line(c) + "\n";
    s += stats_to_json(r.stats);
    return s;
}

SearchOptions base_options(std::int64_t max_edge) {
    SearchOptions o;
    o.max_edge = max_edge;
    return o;
}

} // namespace

TEST_CASE("funnel stats at bound 115 match the frozen oracle values") {
    SearchOptions opts = base_options(115);
    std::mutex mu;
    std::set<std::array<std::int64_t, 6>> all4;
    opts.on_pass_all4 = [&](const CandidateTriple& t, const BodyDiagonals& b) {
        std::lock_guard lock(mu);
        all4.insert({t.x1, t.x2, t.x3, t.d12, t.d13, t.d23});
        CHECK(b.m1 > 0);
    };
    const auto res = run_search(opts);
    CHECK(res.complete);
    CHECK(res.stats ==
          FunnelStats{63521, 5625, 940, 75, 2, 0});
    CHECK(res.certificates.empty());
    // the two survivors of all four body-diagonal conditions at this bound;
    // neither is realizable
    CHECK(all4 == std::set<std::array<std::int64_t, 6>>{
                      {96, 72, 35, 120, 79, 47}, {115, 106, 83, 31, 58, 75}});
}

TEST_CASE("funnel stats at bounds 60 and 90 match the frozen oracle values") {
    CHECK(run_search(base_options(60)).stats == FunnelStats{5172, 694, 151, 16, 0, 0});
    CHECK(run_search(base_options(90)).stats == FunnelStats{24622, 2609, 500, 48, 0, 0});
}

TEST_CASE("oracle equivalence at bound 120") {
    SearchOptions opts = base_options(120);
    opts.workers = 2;
    std::mutex mu;
    std::vector<std::array<std::int64_t, 6>> all4;
    opts.on_pass_all4 = [&](const CandidateTriple& t, const BodyDiagonals&) {
        std::lock_guard lock(mu);
        all4.push_back({t.x1, t.x2, t.x3, t.d12, t.d13, t.d23});
    };
    const auto res = run_search(opts);
    const auto want = oracle::naive_search(120);
    CHECK(res.stats.configs_tested == want.configs);
    CHECK(res.stats.pass_ge1 == want.ge1);
    CHECK(res.stats.pass_ge2 == want.ge2);
    CHECK(res.stats.pass_ge3 == want.ge3);
    CHECK(res.stats.pass_all4 == want.all4);
    CHECK(res.stats.realizable == want.realizable);
    std::sort(all4.begin(), all4.end());
    CHECK(all4 == want.all4_triples);
    std::vector<std::array<std::int64_t, 13>> certs;
    for (const auto& c : res.certificates) certs.push_back(lengths_of(c));
    CHECK(certs == want.certificates);
}

TEST_CASE("search at 271 finds exactly the golden certificate") {
    const auto res = run_search(base_options(271));
    REQUIRE(res.certificates.size() == 1);
    const auto& c = res.certificates[0];
    CHECK(c.edges == std::array<std::int64_t, 3>{271, 106, 103});
    CHECK(c.minor_diagonals == std::array<std::int64_t, 3>{255, 266, 101});
    CHECK(c.major_diagonals == std::array<std::int64_t, 3>{323, 312, 183});
    CHECK(c.body_diagonals == std::array<std::int64_t, 4>{272, 278, 300, 374});
    CHECK(c.primitive);
    CHECK(verify(c).valid);
    CHECK(res.stats.realizable == 1);
    CHECK(res.stats.pass_all4 >= 1);
    CHECK(res.stats.monotone());
}

TEST_CASE("min_edge restricts emitted x1 but not the join space") {
    SearchOptions opts = base_options(120);
    opts.min_edge = 97; // excludes the x1 = 96 survivor, keeps 115
    const auto res = run_search(opts);
    const auto want = oracle::naive_search(120, 97);
    CHECK(res.stats.configs_tested == want.configs);
    CHECK(res.stats.pass_all4 == want.all4);
    CHECK(res.stats.pass_all4 == 1);
}

TEST_CASE("deterministic output across worker counts") {
    std::string first;
    for (const int workers : {1, 2, 8}) {
        SearchOptions opts = base_options(150);
        opts.workers = workers;
        const auto res = run_search(opts);
        const std::string s = serialize_all(res);
        if (first.empty())
            first = s;
        else
            CHECK(first == s);
    }
}

TEST_CASE("sink streams certificates in final order") {
    SearchOptions opts = base_options(271);
    opts.workers = 2;
    std::vector<Certificate> streamed;
    opts.sink = [&](const Certificate& c) { streamed.push_back(c); };
    const auto res = run_search(opts);
    CHECK(streamed == res.certificates);
}

TEST_CASE("option validation") {
    CHECK_THROWS_AS(run_search(base_options(0)), UsageError);
    {
        SearchOptions o = base_options(10);
        o.min_edge = 11;
        CHECK_THROWS_AS(run_search(o), UsageError);
    }
    {
        SearchOptions o = base_options(10);
        o.workers = 0;
        CHECK_THROWS_AS(run_search(o), UsageError);
    }
    {
        SearchOptions o = base_options(kMaxEdgeBudget + 1);
        CHECK_THROWS_AS(run_search(o), BudgetError);
    }
    CHECK_THROWS_AS(resume_search(base_options(10)), UsageError); // no path
}

TEST_CASE("halt and resume reproduce the one-shot run") {
    TempDir tmp;
    const auto oneshot = run_search(base_options(271));

    SearchOptions halted = base_options(271);
    halted.checkpoint_path = tmp.file("ck.json");
    halted.halt_after = 135;
    halted.workers = 2;
    const auto partial = run_search(halted);
    CHECK_FALSE(partial.complete);

    const Checkpoint mid = load_checkpoint(halted.checkpoint_path);
    CHECK(mid.stats.monotone());
    CHECK(mid.completed_x1.size() >= 135);
    CHECK(std::is_sorted(mid.completed_x1.begin(), mid.completed_x1.end()));

    SearchOptions resume_opts = base_options(271);
    resume_opts.checkpoint_path = tmp.file("ck.json");
    resume_opts.workers = 2;
    const auto resumed = resume_search(resume_opts);
    CHECK(resumed.complete);
    CHECK(serialize_all(resumed) == serialize_all(oneshot));

    // resuming the now-complete checkpoint is a no-op with the same output
    const auto again = resume_search(resume_opts);
    CHECK(again.complete);
    CHECK(serialize_all(again) == serialize_all(oneshot));

    const Checkpoint done = load_checkpoint(resume_opts.checkpoint_path);
    CHECK(done.completed_x1.size() == 271);
    CHECK(done.emitted == 1);
    CHECK(done.stats == oneshot.stats);
}

TEST_CASE("resume refuses mismatched parameters") {
    TempDir tmp;
    SearchOptions opts = base_options(60);
    opts.checkpoint_path = tmp.file("ck.json");
    (void)run_search(opts);

    SearchOptions other = opts;
    other.max_edge = 61;
    CHECK_THROWS_AS(resume_search(other), CheckpointError);
    try {
        resume_search(other);
    } catch (const CheckpointError& e) {
        CHECK(e.kind == CheckpointError::Kind::mismatch);
    }

    SearchOptions prim = opts;
    prim.primitive_only = true;
    CHECK_THROWS_AS(resume_search(prim), CheckpointError);
}

TEST_CASE("corrupt checkpoints are refused loudly") {
    TempDir tmp;
    SearchOptions opts = base_options(60);
    opts.checkpoint_path = tmp.file("ck.json");
    (void)run_search(opts);

    // truncate the file halfway
    std::string text;
    {
        std::ifstream in(opts.checkpoint_path);
        std::getline(in, text);
    }
    {
        std::ofstream out(opts.checkpoint_path, std::ios::trunc);
        out << text.substr(0, text.size() / 2);
    }
    CHECK_THROWS_AS(resume_search(opts), CheckpointError);
    try {
        resume_search(opts);
    } catch (const CheckpointError& e) {
        CHECK(e.kind == CheckpointError::Kind::corrupt);
    }

    CHECK_THROWS_AS(load_checkpoint(tmp.file("missing.json")), CheckpointError);
}

TEST_CASE("checkpoint files survive a load/save cycle") {
    TempDir tmp;
    SearchOptions opts = base_options(271);
    opts.checkpoint_path = tmp.file("ck.json");
    const auto res = run_search(opts);
    const Checkpoint cp = load_checkpoint(opts.checkpoint_path);
    CHECK(cp.stats == res.stats);
    CHECK(cp.certificates.size() == 1);
    CHECK(cp.certificates[0] == res.certificates[0]);

    save_checkpoint(cp, tmp.file("copy.json"));
    const Checkpoint cp2 = load_checkpoint(tmp.file("copy.json"));
    CHECK(cp2.stats == cp.stats);
    CHECK(cp2.completed_x1 == cp.completed_x1);
    CHECK(cp2.certificates == cp.certificates);
}

TEST_CASE("primitive_only filters emission") {
    // at bound 542 the doubled golden parallelepiped exists and is filtered
    SearchOptions all = base_options(542);
    const auto everything = run_search(all);
    REQUIRE(everything.certificates.size() >= 2);
    std::uint64_t primitive_count = 0;
    for (const auto& c : everything.certificates)
        if (c.primitive) ++primitive_count;
    REQUIRE(primitive_count < everything.certificates.size());

    SearchOptions prim = base_options(542);
    prim.primitive_only = true;
    const auto filtered = run_search(prim);
    CHECK(filtered.certificates.size() == primitive_count);
    CHECK(filtered.stats.realizable == primitive_count);
    for (const auto& c : filtered.certificates) CHECK(c.primitive);
    CHECK(filtered.stats.pass_all4 == everything.stats.pass_all4);
}

TEST_CASE("stats JSON round trip") {
    const FunnelStats s{100, 50, 20, 5, 2, 1};
    CHECK(stats_from_json(stats_to_json(s)) == s);
    CHECK_THROWS_AS(stats_from_json("{}"), CheckpointError);
    CHECK_THROWS_AS(stats_from_json("junk"), CheckpointError);
}
