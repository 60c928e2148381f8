#include <array>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ppd/search.hpp"

// Command-line surface: search, verify, parallelograms, stats.
// Exit codes: 0 success / all records valid, 1 verification failure,
// 2 usage error, 3 I/O or arithmetic-budget failure.

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct OutputStream {
    std::ofstream file;
    std::ostream* os = nullptr;

    // "-" selects stdout
    explicit OutputStream(const std::string& path) {
        if (path == "-") {
            os = &std::cout;
            return;
        }
        file.open(path, std::ios::trunc);
        if (!file) throw ppd::IoError("cannot open output path " + path);
        os = &file;
    }
};

void print_stats_table(std::ostream& os, const ppd::FunnelStats& s) {
    os << "configurations tested           : " << s.configs_tested << "\n"
       << "satisfied >=1 condition         : " << s.pass_ge1 << "\n"
       << "satisfied >=2 conditions        : " << s.pass_ge2 << "\n"
       << "satisfied >=3 conditions        : " << s.pass_ge3 << "\n"
       << "satisfied all four conditions   : " << s.pass_all4 << "\n"
       << "realizable certificates emitted : " << s.realizable << "\n";
}

struct SearchArgs {
    std::int64_t max_edge = 0;
    std::int64_t min_edge = 1;
    std::string output = "-";
    std::string format = "line";
    int workers = 0;
    std::string checkpoint;
    bool resume = false;
    bool primitive_only = false;
    std::int64_t halt_after = -1;
};

int cmd_search(const SearchArgs& args) {
    OutputStream out(args.output);
    const bool csv = args.format == "csv";

    ppd::SearchOptions opts;
    opts.max_edge = args.max_edge;
    opts.min_edge = args.min_edge;
    opts.primitive_only = args.primitive_only;
    opts.workers = args.workers > 0
                       ? args.workers
                       : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    opts.checkpoint_path = args.checkpoint;
    opts.halt_after = args.halt_after;
    opts.diagnostics = &std::cerr;
    opts.sink = [&](const ppd::Certificate& c) {
        *out.os << (csv ? ppd::to_csv_line(c) : ppd::to_json_line(c)) << "\n";
        out.os->flush();
    };

    const ppd::SearchResult res =
        args.resume ? ppd::resume_search(opts) : ppd::run_search(opts);

    if (!res.complete)
        std::cerr << "# halted before completion; resume with --resume --checkpoint "
                  << (args.checkpoint.empty() ? std::string("<path>") : args.checkpoint)
                  << "\n";
    print_stats_table(std::cerr, res.stats);
    std::cerr << "STATS " << ppd::stats_to_json(res.stats) << std::endl;
    return kExitOk;
}

int cmd_parallelograms(std::int64_t max_edge, std::int64_t min_edge,
                       const std::string& output, int workers) {
    OutputStream out(output);
    const auto idx = ppd::enumerate_range(
        max_edge, min_edge,
        workers > 0 ? workers
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
    idx.for_each([&](const ppd::PerfectParallelogram& p) {
        *out.os << p.x1 << ' ' << p.x2 << ' ' << p.d_minor << ' ' << p.d_major << "\n";
    });
    out.os->flush();
    return kExitOk;
}

int verify_stream(std::istream& in) {
    std::string line;
    std::uint64_t record = 0, invalid = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++record;
        const auto verdict = ppd::verify_record(line);
        if (verdict.valid) {
            std::cout << record << ": valid\n";
        } else {
            std::cout << record << ": invalid (" << verdict.reason << ")\n";
            ++invalid;
        }
    }
    std::cout << record << " record(s), " << (record - invalid) << " valid, " << invalid
              << " invalid\n";
    return invalid == 0 ? kExitOk : kExitInvalid;
}

int cmd_verify(const std::string& input, const std::vector<std::int64_t>& edges,
               const std::vector<std::int64_t>& minors) {
    if (!edges.empty() || !minors.empty()) {
        if (edges.size() != 3 || minors.size() != 3)
            throw ppd::UsageError("--edges and --minors each require three values");
        const std::array<std::int64_t, 3> e{edges[0], edges[1], edges[2]};
        const std::array<std::int64_t, 3> d{minors[0], minors[1], minors[2]};
        std::cout << "edges:           " << e[0] << ' ' << e[1] << ' ' << e[2] << "\n"
                  << "minor diagonals: " << d[0] << ' ' << d[1] << ' ' << d[2] << "\n";
        const auto rec = ppd::reconstruct(e, d);
        if (!rec.cert) {
            std::cout << "verdict: invalid (" << rec.failure << ")\n";
            return kExitInvalid;
        }
        const auto& c = *rec.cert;
        std::cout << "major diagonals: " << c.major_diagonals[0] << ' '
                  << c.major_diagonals[1] << ' ' << c.major_diagonals[2] << "\n"
                  << "body diagonals:  " << c.body_diagonals[0] << ' '
                  << c.body_diagonals[1] << ' ' << c.body_diagonals[2] << ' '
                  << c.body_diagonals[3] << "\n"
                  << "gram det:        " << ppd::int128_to_string(c.gram_det) << "\n"
                  << "primitive:       " << (c.primitive ? "yes" : "no") << "\n"
                  << "certificate:     " << ppd::to_json_line(c) << "\n"
                  << "verdict: valid\n";
        return kExitOk;
    }

    if (input == "-") return verify_stream(std::cin);
    std::ifstream in(input);
    if (!in) throw ppd::IoError("cannot read input path " + input);
    return verify_stream(in);
}

int cmd_stats(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ppd::IoError("cannot read stats path " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::optional<ppd::FunnelStats> stats;
    std::string context;
    try {
        const ppd::Checkpoint cp = ppd::load_checkpoint(path);
        stats = cp.stats;
        std::ostringstream ctx;
        ctx << "checkpoint for max_edge " << cp.max_edge << " (min_edge " << cp.min_edge
            << "), " << cp.completed_x1.size() << " x1 value(s) complete, " << cp.emitted
            << " certificate(s)";
        context = ctx.str();
    } catch (const ppd::CheckpointError&) {
        // not a checkpoint; try a STATS diagnostic line, then a bare record
        std::istringstream lines(text);
        std::string line, last_stats;
        while (std::getline(lines, line))
            if (line.rfind("STATS ", 0) == 0) last_stats = line.substr(6);
        try {
            if (!last_stats.empty()) {
                stats = ppd::stats_from_json(last_stats);
                context = "STATS record";
            } else {
                stats = ppd::stats_from_json(text);
                context = "stats record";
            }
        } catch (const ppd::CheckpointError&) {
            throw ppd::IoError("no readable funnel stats in " + path);
        }
    }

    std::cout << "# " << context << "\n";
    print_stats_table(std::cout, *stats);
    std::cout << "STATS " << ppd::stats_to_json(*stats) << std::endl;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact search and verification of perfect parallelepipeds"};
    app.require_subcommand(1);

    SearchArgs sargs;
    auto* search = app.add_subcommand("search", "run the search funnel and emit certificates");
    search->add_option("--max-edge", sargs.max_edge, "largest edge length (required)")
        ->required();
    search->add_option("--min-edge", sargs.min_edge, "smallest x1 to report (default 1)");
    search->add_option("-o,--output", sargs.output, "certificate output path, - for stdout");
    search->add_option("--format", sargs.format, "certificate format: line (JSON) or csv")
        ->check(CLI::IsMember({"line", "csv"}));
    search->add_option("-j,--workers", sargs.workers, "worker threads (default: hardware)");
    auto* ckpt = search->add_option("--checkpoint", sargs.checkpoint,
                                    "checkpoint file, flushed after every completed x1");
    search->add_flag("--resume", sargs.resume, "continue from the checkpoint file")
        ->needs(ckpt);
    search->add_flag("--primitive-only", sargs.primitive_only,
                     "emit only certificates with gcd(edges) == 1");
    search->add_option("--halt-after", sargs.halt_after,
                       "stop after this many completed x1 units (testing/time-boxing)");

    std::string vinput = "-";
    std::vector<std::int64_t> vedges, vminors;
    auto* verify = app.add_subcommand("verify", "verify certificates or inline lengths");
    verify->add_option("input", vinput, "certificate file (JSON lines or CSV), - for stdin");
    auto* eopt = verify->add_option("--edges", vedges, "three edge lengths a,b,c")
                     ->delimiter(',');
    verify->add_option("--minors", vminors, "three minor diagonals d12,d13,d23")
        ->delimiter(',')
        ->needs(eopt);

    std::int64_t pmax = 0, pmin = 1;
    std::string poutput = "-";
    int pworkers = 0;
    auto* pgram = app.add_subcommand("parallelograms",
                                     "dump perfect parallelograms as 'x1 x2 d_minor d_major'");
    pgram->add_option("--max-edge", pmax, "largest edge length (required)")->required();
    pgram->add_option("--min-edge", pmin, "smallest edge length (default 1)");
    pgram->add_option("-o,--output", poutput, "output path, - for stdout");
    pgram->add_option("-j,--workers", pworkers, "worker threads (default: hardware)");

    std::string spath;
    auto* stats = app.add_subcommand("stats", "print the funnel table from a checkpoint "
                                              "or a saved STATS record");
    stats->add_option("path", spath, "checkpoint or diagnostics file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*search) return cmd_search(sargs);
        if (*verify) {
            if ((!vedges.empty() || !vminors.empty()) && verify->count("input"))
                throw ppd::UsageError("give either an input file or --edges/--minors, not both");
            return cmd_verify(vinput, vedges, vminors);
        }
        if (*pgram) return cmd_parallelograms(pmax, pmin, poutput, pworkers);
        if (*stats) return cmd_stats(spath);
    } catch (const ppd::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ppd::CheckpointError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind == ppd::CheckpointError::Kind::mismatch ? kExitUsage : kExitIo;
    } catch (const ppd::BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ppd::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory (try a smaller --max-edge)\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
