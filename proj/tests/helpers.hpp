#pragma once

#include <cstddef>

#include "mnl/agent.hpp"
#include "mnl/cells.hpp"
#include "mnl/numerics.hpp"
#include "mnl/unit.hpp"

namespace testing {

/// Unit with every parameter drawn uniformly from [-scale, scale].
inline mnl::Unit random_unit(mnl::Arch arch, std::size_t d, mnl::Activation act, mnl::Rng& rng,
                             double scale = 1.0) {
    mnl::Unit u = mnl::make_zero_unit(arch, d, act);
    mnl::Vec64 flat = mnl::flatten(u);
    for (double& v : flat) v = rng.uniform(-scale, scale);
    mnl::assign_flat(u, flat);
    return u;
}

inline mnl::Vec64 random_window(std::size_t w, mnl::Rng& rng, double scale = 1.0) {
    mnl::Vec64 x(w);
    for (double& v : x) v = rng.uniform(-scale, scale);
    return x;
}

inline mnl::Agent random_agent(mnl::Arch arch, std::size_t w, std::size_t d, mnl::Rng& rng, double scale = 1.0) {
    mnl::Agent a;
    a.arch = arch;
    a.window = w;
    a.mpu = random_unit(arch, d, mnl::Activation::tanh, rng, scale);
    a.dpu = random_unit(arch, d, mnl::Activation::relu, rng, scale);
    return a;
}

}  // namespace testing
