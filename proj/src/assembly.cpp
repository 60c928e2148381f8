#include "ppd/assembly.hpp"

#include <cmath>

namespace ppd {

RealizabilityResult realizability(const CandidateTriple& t) {
    const std::int64_t q12 = t.x1 * t.x1 + t.x2 * t.x2 - t.d12 * t.d12;
    const std::int64_t q13 = t.x1 * t.x1 + t.x3 * t.x3 - t.d13 * t.d13;
    const std::int64_t q23 = t.x2 * t.x2 + t.x3 * t.x3 - t.d23 * t.d23;
    const Int128 det = sym3_det(2 * t.x1 * t.x1, 2 * t.x2 * t.x2, 2 * t.x3 * t.x3,
                                q12, q13, q23);
    const Realizability decision = det > 0   ? Realizability::realizable
                                   : det < 0 ? Realizability::non_realizable
                                             : Realizability::degenerate;
    return {decision, det};
}

std::array<std::array<double, 3>, 3> embed(const CandidateTriple& t) {
    if (realizability(t).decision != Realizability::realizable)
        throw UsageError("embed called on a non-realizable triple");

    const auto cos = face_cosines(t);
    const double c12 = static_cast<double>(cos[0].num) / static_cast<double>(cos[0].den);
    const double c13 = static_cast<double>(cos[1].num) / static_cast<double>(cos[1].den);
    const double c23 = static_cast<double>(cos[2].num) / static_cast<double>(cos[2].den);
    const double s12 = std::sqrt(1.0 - c12 * c12);
    const double s13 = std::sqrt(1.0 - c13 * c13);
    const double rho = (c23 - c12 * c13) / (s12 * s13);

    const double x1 = static_cast<double>(t.x1);
    const double x2 = static_cast<double>(t.x2);
    const double x3 = static_cast<double>(t.x3);
    return {{{x1, 0.0, 0.0},
             {x2 * c12, x2 * s12, 0.0},
             {x3 * c13, x3 * rho * s13, x3 * std::sqrt(1.0 - rho * rho) * s13}}};
}

std::vector<CandidateTriple> assemble_collect(const ParallelogramIndex& idx,
                                              std::int64_t x1) {
    std::vector<CandidateTriple> out;
    assemble(idx, x1, [&](const CandidateTriple& t) { out.push_back(t); });
    return out;
}

} // namespace ppd
