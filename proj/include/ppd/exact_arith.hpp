#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ppd/errors.hpp"

// Overflow-safe integer primitives: integer square root, perfect-square
// detection, and the exact signed determinant of a symmetric 3x3 integer
// matrix. Everything here is pure and thread-safe.

namespace ppd {

#if defined(__SIZEOF_INT128__)
using Int128 = __int128;
using UInt128 = unsigned __int128;
#else
#error "a 128-bit integer type is required"
#endif

// Largest edge length the exact pipeline accepts. The realizability
// determinant is bounded by 8*N^6, which for N = 10^5 is ~8e30 and fits
// comfortably in a signed 128-bit integer.
inline constexpr std::int64_t kMaxEdgeBudget = 100000;

inline Int128 checked_add(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_add_overflow(a, b, &r))
        throw BudgetError("128-bit addition overflow");
    return r;
}

inline Int128 checked_sub(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_sub_overflow(a, b, &r))
        throw BudgetError("128-bit subtraction overflow");
    return r;
}

inline Int128 checked_mul(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw BudgetError("128-bit multiplication overflow");
    return r;
}

std::string int128_to_string(Int128 v);
std::optional<Int128> int128_from_string(std::string_view s);

// Floor square root, exact for all uint64 inputs. Seeds from the FPU and
// corrects with integer comparisons only.
inline std::uint64_t isqrt(std::uint64_t n) {
    if (n == 0) return 0;
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    if (r > 0xFFFFFFFFull) r = 0xFFFFFFFFull;
    while (r * r > n) --r;
    while (r < 0xFFFFFFFFull && (r + 1) * (r + 1) <= n) ++r;
    return r;
}

namespace detail {

// Bitmask of quadratic residues modulo m (m <= 64).
constexpr std::uint64_t square_residue_mask(unsigned m) {
    std::uint64_t mask = 0;
    for (unsigned i = 0; i < m; ++i)
        mask |= std::uint64_t{1} << ((i * i) % m);
    return mask;
}

inline constexpr std::uint64_t kSqMask64 = square_residue_mask(64);
inline constexpr std::uint64_t kSqMask63 = square_residue_mask(63);
inline constexpr std::uint64_t kSqMask55 = square_residue_mask(55);
inline constexpr std::uint64_t kSqMask17 = square_residue_mask(17);

} // namespace detail

// Returns sqrt(n) when n is a nonnegative perfect square, nullopt otherwise.
// A residue prefilter (mod 64/63/55/17, pairwise coprime) rejects ~99% of
// non-squares before the isqrt confirmation; the prefilter can only reject,
// never accept.
inline std::optional<std::int64_t> is_perfect_square(std::int64_t n) {
    if (n < 0) return std::nullopt;
    const auto u = static_cast<std::uint64_t>(n);
    if (!((detail::kSqMask64 >> (u & 63)) & 1)) return std::nullopt;
    if (!((detail::kSqMask63 >> (u % 63)) & 1)) return std::nullopt;
    if (!((detail::kSqMask55 >> (u % 55)) & 1)) return std::nullopt;
    if (!((detail::kSqMask17 >> (u % 17)) & 1)) return std::nullopt;
    const std::uint64_t r = isqrt(u);
    if (r * r != u) return std::nullopt;
    return static_cast<std::int64_t>(r);
}

// Exact determinant of the symmetric matrix
//   [ m11 m12 m13 ]
//   [ m12 m22 m23 ]
//   [ m13 m23 m33 ]
// computed in checked 128-bit arithmetic. Throws BudgetError on overflow.
inline Int128 sym3_det(std::int64_t m11, std::int64_t m22, std::int64_t m33,
                       std::int64_t m12, std::int64_t m13, std::int64_t m23) {
    const Int128 a(m11), b(m22), c(m33), p(m12), q(m13), r(m23);
    // cofactor expansion along the first row; int64*int64 never overflows
    // 128 bits, the checked ops guard the outer products and sums
    const Int128 minor1 = checked_sub(b * c, r * r);
    const Int128 minor2 = checked_sub(p * c, r * q);
    const Int128 minor3 = checked_sub(p * r, b * q);
    return checked_add(checked_sub(checked_mul(a, minor1), checked_mul(p, minor2)),
                       checked_mul(q, minor3));
}

} // namespace ppd
