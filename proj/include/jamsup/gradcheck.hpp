#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>

namespace jamsup {

struct GradCheckOptions {
    std::size_t trials = 20;
    std::uint64_t seed = 12345;
    double tolerance = 1e-5;
    double fd_step = 1e-5;
};

// Central-finite-difference verification of every analytic gradient (conv,
// ReLU off the kink, batch norm, end-to-end loss) at double precision.
// Returns true when every check is within tolerance; prints one line per
// category to `os`.
bool run_gradcheck(std::ostream& os, const GradCheckOptions& opts = {});

}  // namespace jamsup
