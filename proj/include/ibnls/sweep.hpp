#pragma once

#include "ibnls/certify.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ibnls {

struct SweepItem {
    ParamSet params;
    bool verified = false;
    std::string theta;
    std::string detail;  // failure labels or exception text when not verified
};

struct SweepResult {
    int n = 0;
    std::uint64_t seed = 0;
    int verified_count = 0;
    std::vector<SweepItem> items;

    std::string to_json() const;
    std::string table() const;
};

/// Samples n parameter tuples from the lattice d in {1..8}, s,b in {k/8},
/// sigma in {k/4, k <= 40}, rejection-sampled against the well-posedness gate,
/// then certifies and re-verifies each. Identical seeds give identical tuples
/// on every platform (mt19937_64 with modular reduction).
SweepResult run_sweep(int n, std::uint64_t seed);

}  // namespace ibnls
