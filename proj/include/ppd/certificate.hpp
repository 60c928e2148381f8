#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ppd/assembly.hpp"

// The verified perfect-parallelepiped data model: construction from a
// surviving triple, exact independent re-verification from edges and minor
// diagonals alone, primitivity, and canonical serialization.

namespace ppd {

struct Certificate {
    std::array<std::int64_t, 3> edges;           // x1, x2, x3
    std::array<std::int64_t, 3> minor_diagonals; // d12, d13, d23
    std::array<std::int64_t, 3> major_diagonals; // D12, D13, D23
    std::array<std::int64_t, 4> body_diagonals;  // m1, m2, m3, m4
    std::array<ExactCosine, 3> cosines;          // c12, c13, c23
    Int128 gram_det = 0;                         // det M witness, > 0
    bool primitive = false;                      // gcd(x1, x2, x3) == 1
    std::array<std::array<double, 3>, 3> coords_approx{}; // u, v, w (advisory)

    bool operator==(const Certificate&) const = default;
};

struct Verdict {
    bool valid;
    std::string reason; // first failed identity; empty when valid
};

// Fully populated certificate for a triple that passed every filter.
// Preconditions (realizable, b == body_diagonals(t)) are re-checked; a
// violation throws UsageError.
Certificate build(const CandidateTriple& t, const BodyDiagonals& b);

// Recomputes every invariant from (edges, minor_diagonals) as the trusted
// kernel and treats all other fields as claims to be checked. Handles
// arbitrary untrusted values without overflowing.
Verdict verify(const Certificate& c);

// Same trusted kernel over the flat 13-length form
// (x1,x2,x3, d12,d13,d23, D12,D13,D23, m1,m2,m3,m4); no claim fields.
Verdict verify_lengths(const std::array<std::int64_t, 13>& lengths);

bool is_primitive(const Certificate& c);

// The 13 lengths in documented (CSV) order.
std::array<std::int64_t, 13> lengths_of(const Certificate& c);

// One self-describing JSON record, single line.
std::string to_json_line(const Certificate& c);
// Flat comma-separated form of the 13 lengths in documented order.
std::string to_csv_line(const Certificate& c);

// Result of parsing one untrusted record line. Exactly one of cert/lengths
// is set on success; otherwise error holds the parse failure.
struct ParsedRecord {
    std::optional<Certificate> cert;
    std::optional<std::array<std::int64_t, 13>> lengths;
    std::string error;
};

// Auto-detects the record format: '{' starts a JSON record, anything else is
// tried as the flat 13-length form.
ParsedRecord parse_record(std::string_view line);

// parse_record + the matching verify; parse failures yield
// invalid("parse: ...").
Verdict verify_record(std::string_view line);

// Trusted-kernel reconstruction from inline edges and minor diagonals:
// derives majors, body diagonals and the Gram determinant, and builds the
// full certificate when everything passes. On failure, `failure` names the
// first failed condition (with its witness value) and `det` carries the
// Gram determinant when the failure is non-realizability.
struct Reconstruction {
    std::optional<Certificate> cert;
    std::string failure;
    std::optional<Int128> det;
};
Reconstruction reconstruct(const std::array<std::int64_t, 3>& edges,
                           const std::array<std::int64_t, 3>& minors);

} // namespace ppd
