#include "ppd/certificate.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <vector>

#include <json.hpp>

namespace ppd {

namespace {

using ordered_json = nlohmann::ordered_json;

// Derived lengths (majors, body diagonals) of any in-budget parallelepiped
// stay below this, so untrusted records beyond it are rejected before any
// arithmetic that could overflow int64.
constexpr std::int64_t kMaxLengthBudget = 10 * kMaxEdgeBudget;

// Face index -> edge indices: faces 12, 13, 23.
constexpr int kFaceEdge[3][2] = {{0, 1}, {0, 2}, {1, 2}};
constexpr const char* kFaceName[3] = {"12", "13", "23"};

double round_to_15_digits(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return std::strtod(buf, nullptr);
}

double norm3(const std::array<double, 3>& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

std::array<double, 3> combine(const std::array<std::array<double, 3>, 3>& uvw,
                              double su, double sv, double sw) {
    return {su * uvw[0][0] + sv * uvw[1][0] + sw * uvw[2][0],
            su * uvw[0][1] + sv * uvw[1][1] + sw * uvw[2][1],
            su * uvw[0][2] + sv * uvw[1][2] + sw * uvw[2][2]};
}

// All 13 lengths as reconstructed from coordinate vectors, in documented
// order (edges, minors, majors, body diagonals).
std::array<double, 13> lengths_from_coords(const std::array<std::array<double, 3>, 3>& uvw) {
    return {norm3(combine(uvw, 1, 0, 0)),
            norm3(combine(uvw, 0, 1, 0)),
            norm3(combine(uvw, 0, 0, 1)),
            norm3(combine(uvw, 1, -1, 0)),
            norm3(combine(uvw, 1, 0, -1)),
            norm3(combine(uvw, 0, 1, -1)),
            norm3(combine(uvw, 1, 1, 0)),
            norm3(combine(uvw, 1, 0, 1)),
            norm3(combine(uvw, 0, 1, 1)),
            norm3(combine(uvw, -1, 1, 1)),
            norm3(combine(uvw, 1, -1, 1)),
            norm3(combine(uvw, 1, 1, -1)),
            norm3(combine(uvw, 1, 1, 1))};
}

const char* kLengthName[13] = {"x1", "x2", "x3", "d12", "d13", "d23",
                               "D12", "D13", "D23", "m1", "m2", "m3", "m4"};

// The trusted kernel shared by all verify paths: from edges and minor
// diagonals alone, check face ranges, recompute majors / body diagonals /
// Gram determinant, and compare with the claimed lengths. Returns the first
// failed identity, plus the determinant for callers that report witnesses.
struct KernelResult {
    bool ok = false;
    std::string reason;
    std::array<std::int64_t, 3> q{};
    Int128 det = 0;
};

KernelResult length_kernel(const std::array<std::int64_t, 13>& v) {
    KernelResult r;
    for (int i = 0; i < 13; ++i) {
        if (v[static_cast<std::size_t>(i)] <= 0) {
            r.reason = std::string("nonpositive length (") + kLengthName[i] + ")";
            return r;
        }
    }
    for (int i = 0; i < 3; ++i) {
        if (v[static_cast<std::size_t>(i)] > kMaxEdgeBudget) {
            r.reason = std::string("magnitude budget: edge ") + kLengthName[i] +
                       " exceeds " + std::to_string(kMaxEdgeBudget);
            return r;
        }
    }
    for (int i = 3; i < 13; ++i) {
        if (v[static_cast<std::size_t>(i)] > kMaxLengthBudget) {
            r.reason = std::string("magnitude budget: length ") + kLengthName[i] +
                       " exceeds " + std::to_string(kMaxLengthBudget);
            return r;
        }
    }

    const std::array<std::int64_t, 3> e{v[0], v[1], v[2]};
    const std::array<std::int64_t, 3> d{v[3], v[4], v[5]};
    const std::array<std::int64_t, 3> maj{v[6], v[7], v[8]};
    const std::array<std::int64_t, 4> m{v[9], v[10], v[11], v[12]};

    std::array<std::int64_t, 3> dsq{}, esq{e[0] * e[0], e[1] * e[1], e[2] * e[2]};
    for (int f = 0; f < 3; ++f) {
        const std::int64_t xi = e[kFaceEdge[f][0]], xj = e[kFaceEdge[f][1]];
        const std::int64_t dij = d[static_cast<std::size_t>(f)];
        dsq[static_cast<std::size_t>(f)] = dij * dij;
        const std::int64_t q = xi * xi + xj * xj - dij * dij;
        // 0 <= q enforces the minor-diagonal choice, q < 2*xi*xj excludes
        // the collinear face; together the face cosine lies in [0, 1)
        if (q < 0 || q >= 2 * xi * xj) {
            r.reason = std::string("minor-diagonal range (d") + kFaceName[f] + ")";
            return r;
        }
        r.q[static_cast<std::size_t>(f)] = q;
        const std::int64_t major_sq = 2 * xi * xi + 2 * xj * xj - dij * dij;
        const std::int64_t M = maj[static_cast<std::size_t>(f)];
        if (M * M != major_sq) {
            r.reason = std::string("major-diagonal identity (D") + kFaceName[f] + ")";
            return r;
        }
    }

    const std::array<std::int64_t, 4> msq{
        -esq[0] + esq[1] + esq[2] + dsq[0] + dsq[1] - dsq[2],
        esq[0] - esq[1] + esq[2] + dsq[0] - dsq[1] + dsq[2],
        esq[0] + esq[1] - esq[2] - dsq[0] + dsq[1] + dsq[2],
        3 * (esq[0] + esq[1] + esq[2]) - (dsq[0] + dsq[1] + dsq[2])};
    for (int i = 0; i < 4; ++i) {
        const std::int64_t mi = m[static_cast<std::size_t>(i)];
        if (mi * mi != msq[static_cast<std::size_t>(i)]) {
            r.reason = "body-diagonal identity (m" + std::to_string(i + 1) + ")";
            return r;
        }
    }

    r.det = sym3_det(2 * esq[0], 2 * esq[1], 2 * esq[2], r.q[0], r.q[1], r.q[2]);
    if (r.det <= 0) {
        r.reason = "not realizable (gram_det " + int128_to_string(r.det) + " <= 0)";
        return r;
    }
    r.ok = true;
    return r;
}

bool gcd_is_one(const std::array<std::int64_t, 3>& e) {
    return std::gcd(std::gcd(e[0], e[1]), e[2]) == 1;
}

} // namespace

std::array<std::int64_t, 13> lengths_of(const Certificate& c) {
    return {c.edges[0],           c.edges[1],           c.edges[2],
            c.minor_diagonals[0], c.minor_diagonals[1], c.minor_diagonals[2],
            c.major_diagonals[0], c.major_diagonals[1], c.major_diagonals[2],
            c.body_diagonals[0],  c.body_diagonals[1],  c.body_diagonals[2],
            c.body_diagonals[3]};
}

Certificate build(const CandidateTriple& t, const BodyDiagonals& b) {
    const auto real = realizability(t);
    if (real.decision != Realizability::realizable)
        throw UsageError("build requires a realizable triple");
    const auto expect = body_diagonals(t);
    if (!expect || !(*expect == b))
        throw UsageError("build requires the triple's own body diagonals");

    Certificate c;
    c.edges = {t.x1, t.x2, t.x3};
    c.minor_diagonals = {t.d12, t.d13, t.d23};
    for (int f = 0; f < 3; ++f) {
        const std::int64_t xi = c.edges[kFaceEdge[f][0]], xj = c.edges[kFaceEdge[f][1]];
        const std::int64_t dij = c.minor_diagonals[static_cast<std::size_t>(f)];
        c.major_diagonals[static_cast<std::size_t>(f)] = static_cast<std::int64_t>(
            isqrt(static_cast<std::uint64_t>(2 * xi * xi + 2 * xj * xj - dij * dij)));
    }
    c.body_diagonals = {b.m1, b.m2, b.m3, b.m4};
    c.cosines = face_cosines(t);
    c.gram_det = real.det;
    c.primitive = gcd_is_one(c.edges);
    c.coords_approx = embed(t);
    for (auto& vec : c.coords_approx)
        for (auto& x : vec) x = round_to_15_digits(x);
    return c;
}

Verdict verify_lengths(const std::array<std::int64_t, 13>& lengths) {
    const auto k = length_kernel(lengths);
    return {k.ok, k.reason};
}

Verdict verify(const Certificate& c) {
    const auto k = length_kernel(lengths_of(c));
    if (!k.ok) return {false, k.reason};

    if (k.det != c.gram_det)
        return {false, "gram_det mismatch (recomputed " + int128_to_string(k.det) + ")"};

    for (int f = 0; f < 3; ++f) {
        const std::int64_t xi = c.edges[kFaceEdge[f][0]], xj = c.edges[kFaceEdge[f][1]];
        const auto& cf = c.cosines[static_cast<std::size_t>(f)];
        if (cf.num != k.q[static_cast<std::size_t>(f)] || cf.den != 2 * xi * xj)
            return {false, std::string("cosine mismatch (c") + kFaceName[f] + ")"};
    }

    if (c.primitive != gcd_is_one(c.edges))
        return {false, "primitive flag mismatch"};

    const auto got = lengths_from_coords(c.coords_approx);
    const auto want = lengths_of(c);
    for (int i = 0; i < 13; ++i) {
        const double w = static_cast<double>(want[static_cast<std::size_t>(i)]);
        if (std::abs(got[static_cast<std::size_t>(i)] - w) > 1e-9 * w)
            return {false,
                    std::string("coordinate reconstruction (") + kLengthName[i] + ")"};
    }
    return {true, ""};
}

bool is_primitive(const Certificate& c) { return gcd_is_one(c.edges); }

Reconstruction reconstruct(const std::array<std::int64_t, 3>& edges,
                           const std::array<std::int64_t, 3>& minors) {
    Reconstruction out;
    for (int i = 0; i < 3; ++i) {
        if (edges[static_cast<std::size_t>(i)] <= 0 ||
            minors[static_cast<std::size_t>(i)] <= 0) {
            out.failure = "lengths must be positive";
            return out;
        }
        if (edges[static_cast<std::size_t>(i)] > kMaxEdgeBudget) {
            out.failure = "edge exceeds the arithmetic budget of " +
                          std::to_string(kMaxEdgeBudget);
            return out;
        }
        if (minors[static_cast<std::size_t>(i)] > kMaxLengthBudget) {
            out.failure = "diagonal exceeds the magnitude budget";
            return out;
        }
    }

    const CandidateTriple t{edges[0], edges[1], edges[2],
                            minors[0], minors[1], minors[2]};
    for (int f = 0; f < 3; ++f) {
        const std::int64_t xi = edges[kFaceEdge[f][0]], xj = edges[kFaceEdge[f][1]];
        const std::int64_t dij = minors[static_cast<std::size_t>(f)];
        const std::int64_t q = xi * xi + xj * xj - dij * dij;
        if (q < 0 || q >= 2 * xi * xj) {
            out.failure = std::string("d") + kFaceName[f] +
                          " is not a minor diagonal of a nondegenerate face";
            return out;
        }
        const std::int64_t major_sq = 2 * xi * xi + 2 * xj * xj - dij * dij;
        if (!is_perfect_square(major_sq)) {
            out.failure = std::string("face ") + kFaceName[f] + " is not perfect (2x" +
                          std::to_string(kFaceEdge[f][0] + 1) + "^2+2x" +
                          std::to_string(kFaceEdge[f][1] + 1) + "^2-d" + kFaceName[f] +
                          "^2 = " + std::to_string(major_sq) + " is not a square)";
            return out;
        }
    }

    const auto msq = body_diagonal_squares(t);
    for (int i = 0; i < 4; ++i) {
        const std::int64_t v = msq[static_cast<std::size_t>(i)];
        if (v <= 0 || !is_perfect_square(v)) {
            out.failure = "body diagonal m" + std::to_string(i + 1) + "^2 = " +
                          std::to_string(v) + " is not a positive perfect square";
            return out;
        }
    }

    const auto real = realizability(t);
    out.det = real.det;
    if (real.decision != Realizability::realizable) {
        out.failure = "not realizable (gram_det = " + int128_to_string(real.det) + ")";
        return out;
    }
    out.cert = build(t, *body_diagonals(t));
    return out;
}

std::string to_csv_line(const Certificate& c) {
    std::string s;
    const auto v = lengths_of(c);
    for (int i = 0; i < 13; ++i) {
        if (i) s.push_back(',');
        s += std::to_string(v[static_cast<std::size_t>(i)]);
    }
    return s;
}

std::string to_json_line(const Certificate& c) {
    ordered_json j;
    j["edges"] = c.edges;
    j["minor_diagonals"] = c.minor_diagonals;
    j["major_diagonals"] = c.major_diagonals;
    j["body_diagonals"] = c.body_diagonals;
    ordered_json cosines = ordered_json::array();
    for (const auto& cf : c.cosines)
        cosines.push_back(ordered_json{{"num", cf.num}, {"den", cf.den}});
    j["cosines"] = std::move(cosines);
    j["gram_det"] = int128_to_string(c.gram_det);
    j["primitive"] = c.primitive;
    j["coords_approx"] = c.coords_approx;
    return j.dump();
}

namespace {

bool read_i64_array(const ordered_json& j, const char* key, std::size_t n,
                    std::int64_t* out, std::string& err) {
    if (!j.contains(key)) {
        err = std::string("missing field '") + key + "'";
        return false;
    }
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != n) {
        err = std::string("field '") + key + "' must be an array of " +
              std::to_string(n) + " integers";
        return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!a[i].is_number_integer()) {
            err = std::string("field '") + key + "' must contain integers";
            return false;
        }
        out[i] = a[i].get<std::int64_t>();
    }
    return true;
}

} // namespace

ParsedRecord parse_record(std::string_view line) {
    ParsedRecord out;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        out.error = "empty record";
        return out;
    }

    if (line[first] == '{') {
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            out.error = "malformed JSON";
            return out;
        }
        Certificate c;
        std::string err;
        if (!read_i64_array(j, "edges", 3, c.edges.data(), err) ||
            !read_i64_array(j, "minor_diagonals", 3, c.minor_diagonals.data(), err) ||
            !read_i64_array(j, "major_diagonals", 3, c.major_diagonals.data(), err) ||
            !read_i64_array(j, "body_diagonals", 4, c.body_diagonals.data(), err)) {
            out.error = err;
            return out;
        }
        if (!j.contains("cosines") || !j["cosines"].is_array() ||
            j["cosines"].size() != 3) {
            out.error = "field 'cosines' must be an array of 3 num/den pairs";
            return out;
        }
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& cf = j["cosines"][i];
            if (!cf.is_object() || !cf.contains("num") || !cf.contains("den") ||
                !cf["num"].is_number_integer() || !cf["den"].is_number_integer()) {
                out.error = "field 'cosines' must be an array of 3 num/den pairs";
                return out;
            }
            c.cosines[i] = {cf["num"].get<std::int64_t>(), cf["den"].get<std::int64_t>()};
        }
        if (!j.contains("gram_det")) {
            out.error = "missing field 'gram_det'";
            return out;
        }
        if (j["gram_det"].is_string()) {
            const auto parsed = int128_from_string(j["gram_det"].get<std::string>());
            if (!parsed) {
                out.error = "field 'gram_det' is not a valid integer";
                return out;
            }
            c.gram_det = *parsed;
        } else if (j["gram_det"].is_number_integer()) {
            c.gram_det = j["gram_det"].get<std::int64_t>();
        } else {
            out.error = "field 'gram_det' is not a valid integer";
            return out;
        }
        if (!j.contains("primitive") || !j["primitive"].is_boolean()) {
            out.error = "missing or non-boolean field 'primitive'";
            return out;
        }
        c.primitive = j["primitive"].get<bool>();
        if (!j.contains("coords_approx") || !j["coords_approx"].is_array() ||
            j["coords_approx"].size() != 3) {
            out.error = "field 'coords_approx' must be an array of 3 vectors";
            return out;
        }
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& vec = j["coords_approx"][i];
            if (!vec.is_array() || vec.size() != 3) {
                out.error = "field 'coords_approx' must be an array of 3 vectors";
                return out;
            }
            for (std::size_t k = 0; k < 3; ++k) {
                if (!vec[k].is_number()) {
                    out.error = "field 'coords_approx' must contain numbers";
                    return out;
                }
                c.coords_approx[i][k] = vec[k].get<double>();
            }
        }
        out.cert = c;
        return out;
    }

    // flat 13-length comma-separated form
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t comma = line.find(',', pos);
        const auto raw = line.substr(pos, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - pos);
        const auto lo = raw.find_first_not_of(" \t\r");
        const auto hi = raw.find_last_not_of(" \t\r");
        tokens.emplace_back(lo == std::string_view::npos ? std::string_view{}
                                                         : raw.substr(lo, hi - lo + 1));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (tokens.size() != 13) {
        out.error = "expected 13 comma-separated lengths, got " +
                    std::to_string(tokens.size());
        return out;
    }
    std::array<std::int64_t, 13> v{};
    for (std::size_t i = 0; i < 13; ++i) {
        char* end = nullptr;
        errno = 0;
        const long long parsed = std::strtoll(tokens[i].c_str(), &end, 10);
        if (tokens[i].empty() || end != tokens[i].c_str() + tokens[i].size() ||
            errno != 0) {
            out.error = "field " + std::to_string(i + 1) + " is not an integer";
            return out;
        }
        v[i] = parsed;
    }
    out.lengths = v;
    return out;
}

Verdict verify_record(std::string_view line) {
    const auto rec = parse_record(line);
    if (rec.cert) return verify(*rec.cert);
    if (rec.lengths) return verify_lengths(*rec.lengths);
    return {false, "parse: " + rec.error};
}

} // namespace ppd
