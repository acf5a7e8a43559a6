#pragma once

#include <cstddef>
#include <cstdint>

#include "mnl/data.hpp"

namespace mnl {

/// GARCH(1,1) return generator used as a stand-in for index histories:
///   r_t = drift + sqrt(h_t)·e_t,   h_t = omega + alpha·(r_{t-1} - drift)² + beta·h_{t-1}
/// with e_t standardized Student-t (dof > 2) or standard normal (dof == 0).
/// Defaults are in the range of daily large-cap equity index estimates.
struct GarchSpec {
    double omega = 1.0e-6;
    double alpha = 0.08;
    double beta = 0.91;
    double drift = 3.0e-4;
    unsigned dof = 6;
    double initial_price = 100.0;
    std::uint64_t seed = 20180104;
};

/// `n_prices` business-day sessions from 1950-01-03 (weekends skipped).
PriceSeries synthetic_garch_prices(const GarchSpec& spec, std::size_t n_prices);

}  // namespace mnl
