#pragma once

#include <string>
#include <vector>

#include "jacobimax/ensemble.hpp"

namespace jacobimax {

struct VerifyCheck {
    std::string name;
    double max_error = 0;
    double tolerance = 0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Cross-checks the recursion against independent ground truth on fixed seeds:
/// small-minor determinants vs dense LU, the zero-noise closed forms, the
/// eigenvalue log-potential identity, sign counts and the spectral sanity of
/// the sampler.
VerifyReport run_verification(std::uint64_t master_seed);

}  // namespace jacobimax
