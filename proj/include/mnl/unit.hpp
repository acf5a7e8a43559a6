#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mnl/cells.hpp"
#include "mnl/numerics.hpp"

namespace mnl {

/// All-zero unit of the given shape.
Unit make_zero_unit(Arch arch, std::size_t d, Activation head_activation);

/// Glorot-uniform weights, zero peepholes and biases. Blocks are drawn in
/// canonical order (cell blocks, then head.W). Input weight vectors use
/// fan_in = 1, fan_out = d; recurrent matrices fan_in = fan_out = d; the
/// head fan_in = d, fan_out = 1.
Unit init_unit(Arch arch, std::size_t d, Activation head_activation, Rng& rng);

struct BlockSpan {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
    bool regularized = false;
};

/// Flat view of a unit's parameters: cell blocks in canonical order followed
/// by head.W and head.b.
struct ParamLayout {
    std::vector<BlockSpan> blocks;
    std::size_t total = 0;

    /// 1.0 for elements that receive the L2 penalty, 0.0 elsewhere.
    [[nodiscard]] Vec64 l2_mask() const;
};

ParamLayout layout_of(const Unit& unit);
Vec64 flatten(const Unit& unit);
/// Overwrites every parameter of `unit` from `flat` (layout_of order).
void assign_flat(Unit& unit, std::span<const double> flat);

}  // namespace mnl
