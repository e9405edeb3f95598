#pragma once

// Library-level acceptance criteria, shared by the selftest subcommand and the
// acceptance test binary. Every criterion compares a production path against
// an independent oracle (stencil marching, quadrature, closed forms).

#include <cstdint>
#include <string>
#include <vector>

#include "relwave/lattice.hpp"

namespace relwave::acceptance {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

inline constexpr int kLibraryCriteria = 12;

// tolerance_scale multiplies every pinned tolerance.
CriterionResult run_criterion(int id, double tolerance_scale = 1.0);
std::vector<CriterionResult> run_library_criteria(double tolerance_scale = 1.0);

// "PASS  5  title  detail  (0.12 s)"
std::string format_result(const CriterionResult& r);

// Coefficients uniform in [-1, 1] + i[-1, 1] on every blade; deterministic in seed.
lattice::LatticeField random_field(const lattice::GridSpec& grid, std::uint64_t seed);
clifford::Multivector random_multivector(clifford::Signature sig, std::uint64_t seed);

}  // namespace relwave::acceptance
