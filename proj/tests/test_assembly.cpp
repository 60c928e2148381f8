#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracle.hpp"

#include "ppd/assembly.hpp"

using namespace ppd;

namespace {

const CandidateTriple kGolden{271, 106, 103, 255, 266, 101};
const CandidateTriple kFalsePositive{115, 106, 83, 31, 58, 75};
const CandidateTriple kTwoRect{1120, 1035, 840, 1525, 1400, 969};

std::array<std::int64_t, 6> as_array(const CandidateTriple& t) {
    return {t.x1, t.x2, t.x3, t.d12, t.d13, t.d23};
}

} // namespace

TEST_CASE("assemble streams exactly the oracle triples, in order") {
    const auto idx = enumerate_range(70);
    std::vector<std::array<std::int64_t, 6>> got;
    for (std::int64_t x1 = 1; x1 <= 70; ++x1) {
        std::vector<std::array<std::int64_t, 6>> batch;
        assemble(idx, x1, [&](const CandidateTriple& t) {
            CHECK(t.x1 == x1);
            CHECK(t.x1 >= t.x2);
            CHECK(t.x2 >= t.x3);
            CHECK(t.x3 >= 1);
            batch.push_back(as_array(t));
        });
        CHECK(std::is_sorted(batch.begin(), batch.end()));
        got.insert(got.end(), batch.begin(), batch.end());
    }
    CHECK(got == oracle::naive_triples(70));
    CHECK_FALSE(got.empty());
}

TEST_CASE("assemble edge cases") {
    const auto idx = enumerate_range(115);
    CHECK(assemble_collect(idx, 1).empty());
    CHECK(assemble_collect(idx, 4).empty()); // matches the naive oracle at 4
    CHECK(oracle::naive_triples(4).empty());
    CHECK_THROWS_AS(assemble_collect(idx, 116), UsageError); // index too small
    CHECK_THROWS_AS(assemble_collect(idx, 0), UsageError);

    const auto at115 = assemble_collect(idx, 115);
    CHECK(std::find(at115.begin(), at115.end(), kFalsePositive) != at115.end());
}

TEST_CASE("assembled faces are non-oblique by construction") {
    const auto idx = enumerate_range(90);
    for (std::int64_t x1 = 1; x1 <= 90; ++x1) {
        assemble(idx, x1, [&](const CandidateTriple& t) {
            for (const auto& c : face_cosines(t)) {
                CHECK(c.num >= 0);
                CHECK(c.num < c.den);
            }
        });
    }
}

TEST_CASE("body diagonals of the known triples") {
    const auto false_pos = body_diagonals(kFalsePositive);
    REQUIRE(false_pos.has_value());
    CHECK(*false_pos == BodyDiagonals{60, 110, 160, 290});

    const auto golden = body_diagonals(kGolden);
    REQUIRE(golden.has_value());
    CHECK(*golden == BodyDiagonals{272, 278, 300, 374});

    const auto two_rect = body_diagonals(kTwoRect);
    REQUIRE(two_rect.has_value());
    CHECK(*two_rect == BodyDiagonals{1967, 1481, 1481, 1967});

    // equilateral junk triple: squares (50, 50, 50, 150), none perfect
    const CandidateTriple rhomb{5, 5, 5, 5, 5, 5};
    CHECK(body_diagonal_squares(rhomb) == std::array<std::int64_t, 4>{50, 50, 50, 150});
    CHECK_FALSE(body_diagonals(rhomb).has_value());
}

TEST_CASE("body-diagonal sum and pairing identities") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::int64_t> edge(1, 3000);
    for (int i = 0; i < 50000; ++i) {
        std::int64_t e[3] = {edge(rng), edge(rng), edge(rng)};
        std::sort(e, e + 3, std::greater<>());
        // any diagonals in the open triangle range, perfect faces or not:
        // the identities are algebraic
        auto pick_d = [&](std::int64_t a, std::int64_t b) {
            const auto hi = static_cast<std::int64_t>(
                isqrt(static_cast<std::uint64_t>(a * a + b * b)));
            std::uniform_int_distribution<std::int64_t> d(a - b + 1, hi);
            return d(rng);
        };
        const CandidateTriple t{e[0], e[1], e[2], pick_d(e[0], e[1]),
                                pick_d(e[0], e[2]), pick_d(e[1], e[2])};
        const auto m = body_diagonal_squares(t);
        CHECK(m[0] + m[1] + m[2] + m[3] ==
              4 * (t.x1 * t.x1 + t.x2 * t.x2 + t.x3 * t.x3));
        CHECK(m[1] + m[2] == 2 * t.x1 * t.x1 + 2 * t.d23 * t.d23);
        const std::int64_t major23_sq =
            2 * t.x2 * t.x2 + 2 * t.x3 * t.x3 - t.d23 * t.d23;
        CHECK(m[0] + m[3] == 2 * t.x1 * t.x1 + 2 * major23_sq);
    }
}

TEST_CASE("realizability of the known triples") {
    const auto golden = realizability(kGolden);
    CHECK(golden.decision == Realizability::realizable);
    CHECK(int128_to_string(golden.det) == "44038449100800");

    const auto false_pos = realizability(kFalsePositive);
    CHECK(false_pos.decision == Realizability::non_realizable);
    CHECK(int128_to_string(false_pos.det) == "-16460236800");

    const auto two_rect = realizability(kTwoRect);
    CHECK(two_rect.decision == Realizability::realizable);
    CHECK(int128_to_string(two_rect.det) == "5823951796106035200");

    // unit rhombohedron with cosine 1/2 everywhere: det [[2,1,1],[1,2,1],[1,1,2]]
    const auto rhomb = realizability(CandidateTriple{1, 1, 1, 1, 1, 1});
    CHECK(rhomb.decision == Realizability::realizable);
    CHECK(rhomb.det == 4);
}

TEST_CASE("realizability matches the arbitrary-precision oracle on assembled triples") {
    const auto idx = enumerate_range(120);
    for (std::int64_t x1 = 1; x1 <= 120; ++x1) {
        assemble(idx, x1, [&](const CandidateTriple& t) {
            const auto r = realizability(t);
            const auto want = oracle::det_m_slow(t.x1, t.x2, t.x3, t.d12, t.d13, t.d23);
            CHECK(int128_to_string(r.det) == want.str());
        });
    }
}

TEST_CASE("exact decision agrees with the floating-point cosine determinant") {
    const auto idx = enumerate_range(150);
    std::uint64_t compared = 0;
    for (std::int64_t x1 = 1; x1 <= 150; ++x1) {
        assemble(idx, x1, [&](const CandidateTriple& t) {
            const auto cs = face_cosines(t);
            const double c12 = double(cs[0].num) / double(cs[0].den);
            const double c13 = double(cs[1].num) / double(cs[1].den);
            const double c23 = double(cs[2].num) / double(cs[2].den);
            const double det_c = 1.0 + 2.0 * c12 * c13 * c23 - c12 * c12 -
                                 c13 * c13 - c23 * c23;
            if (std::abs(det_c) <= 1e-6) return;
            ++compared;
            const auto exact = realizability(t).decision;
            CHECK(exact == (det_c > 0 ? Realizability::realizable
                                      : Realizability::non_realizable));
        });
    }
    CHECK(compared > 1000);
}

TEST_CASE("filters are scale equivariant") {
    const auto idx = enumerate_range(80);
    std::vector<CandidateTriple> base;
    for (std::int64_t x1 = 1; x1 <= 80; ++x1)
        assemble(idx, x1, [&](const CandidateTriple& t) { base.push_back(t); });
    REQUIRE_FALSE(base.empty());

    for (const std::int64_t k : {2, 3, 5}) {
        for (const auto& t : base) {
            const CandidateTriple kt{k * t.x1, k * t.x2, k * t.x3,
                                     k * t.d12, k * t.d13, k * t.d23};
            const auto b = body_diagonals(t);
            const auto kb = body_diagonals(kt);
            CHECK(b.has_value() == kb.has_value());
            if (b && kb)
                CHECK(*kb == BodyDiagonals{k * b->m1, k * b->m2, k * b->m3, k * b->m4});
            const auto r = realizability(t);
            const auto kr = realizability(kt);
            CHECK(r.decision == kr.decision);
            Int128 k6 = 1;
            for (int i = 0; i < 6; ++i) k6 *= k;
            CHECK(kr.det == r.det * k6);
        }
    }
}

TEST_CASE("embed reproduces the golden coordinates") {
    const auto uvw = embed(kGolden);
    CHECK(uvw[0][0] == 271.0);
    CHECK(uvw[0][1] == 0.0);
    CHECK(uvw[0][2] == 0.0);
    CHECK(uvw[1][0] == doctest::Approx(36.258302583).epsilon(1e-9));
    CHECK(uvw[1][1] == doctest::Approx(99.605900898).epsilon(1e-9));
    CHECK(uvw[1][2] == 0.0);
    CHECK(uvw[2][0] == doctest::Approx(24.527675277).epsilon(1e-9));
    CHECK(uvw[2][1] == doctest::Approx(49.521846433).epsilon(1e-9));
    CHECK(uvw[2][2] == doctest::Approx(86.919387201).epsilon(1e-9));

    const double v_norm = std::hypot(uvw[1][0], uvw[1][1], uvw[1][2]);
    const double w_norm = std::hypot(uvw[2][0], uvw[2][1], uvw[2][2]);
    CHECK(v_norm == doctest::Approx(106.0).epsilon(1e-12));
    CHECK(w_norm == doctest::Approx(103.0).epsilon(1e-12));
}

TEST_CASE("embed corner cases") {
    // nondegenerate: the third coordinate of w is strictly positive
    const auto rhomb = embed(CandidateTriple{1, 1, 1, 1, 1, 1});
    CHECK(rhomb[2][2] > 0.0);

    // two rectangular faces: cos12 = cos13 = 0, so v and w have zero first
    // coordinate
    const auto tworect = embed(kTwoRect);
    CHECK(tworect[1][0] == 0.0);
    CHECK(tworect[2][0] == 0.0);
    CHECK(tworect[1][1] == 1035.0);

    CHECK_THROWS_AS(embed(kFalsePositive), UsageError);
}

TEST_CASE("every realizable assembled triple embeds within tolerance") {
    const auto idx = enumerate_range(150);
    std::uint64_t embedded = 0;
    for (std::int64_t x1 = 1; x1 <= 150; ++x1) {
        assemble(idx, x1, [&](const CandidateTriple& t) {
            if (realizability(t).decision != Realizability::realizable) return;
            // realizable candidate triples (integer body diagonals not
            // required here) must still embed with exact edges and minors
            const auto uvw = embed(t);
            auto norm_diff = [&](int a, int b, double want) {
                std::array<double, 3> diff{uvw[a][0] - uvw[b][0], uvw[a][1] - uvw[b][1],
                                           uvw[a][2] - uvw[b][2]};
                const double got = std::hypot(diff[0], diff[1], diff[2]);
                CHECK(std::abs(got - want) <= 1e-9 * want);
            };
            CHECK(std::abs(std::hypot(uvw[0][0], uvw[0][1], uvw[0][2]) - double(t.x1)) <=
                  1e-9 * double(t.x1));
            CHECK(std::abs(std::hypot(uvw[1][0], uvw[1][1], uvw[1][2]) - double(t.x2)) <=
                  1e-9 * double(t.x2));
            CHECK(std::abs(std::hypot(uvw[2][0], uvw[2][1], uvw[2][2]) - double(t.x3)) <=
                  1e-9 * double(t.x3));
            norm_diff(0, 1, double(t.d12));
            norm_diff(0, 2, double(t.d13));
            norm_diff(1, 2, double(t.d23));
            ++embedded;
        });
    }
    CHECK(embedded > 100);
}
