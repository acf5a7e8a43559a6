#include "mnl/unit.hpp"

#include <algorithm>

#include "mnl/errors.hpp"

namespace mnl {

namespace {

template <class F>
void visit_blocks(Unit& unit, F&& f) {
    std::visit([&](auto& p) { std::decay_t<decltype(p)>::visit(p, f); }, unit.cell);
    f(BlockInfo{"head.W", true}, std::span(unit.head.W));
    f(BlockInfo{"head.b", false}, std::span(&unit.head.b, 1));
}

template <class F>
void visit_blocks(const Unit& unit, F&& f) {
    std::visit([&](const auto& p) { std::decay_t<decltype(p)>::visit(p, f); }, unit.cell);
    f(BlockInfo{"head.W", true}, std::span<const double>(unit.head.W));
    f(BlockInfo{"head.b", false}, std::span<const double>(&unit.head.b, 1));
}

void fill_vector(Vec64& v, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const Mat64 m = glorot_uniform(fan_in, fan_out, rng);
    v.assign(m.values().begin(), m.values().end());
}

}  // namespace

Unit make_zero_unit(Arch arch, std::size_t d, Activation head_activation) {
    if (d == 0) {
        throw ParameterError("hidden width must be >= 1");
    }
    Unit unit;
    if (arch == Arch::lstm) {
        unit.cell = LstmParams(d);
    } else {
        unit.cell = GruParams(d);
    }
    unit.head.W.assign(d, 0.0);
    unit.head.b = 0.0;
    unit.head.activation = head_activation;
    return unit;
}

Unit init_unit(Arch arch, std::size_t d, Activation head_activation, Rng& rng) {
    Unit unit = make_zero_unit(arch, d, head_activation);
    if (auto* p = std::get_if<LstmParams>(&unit.cell)) {
        for (Vec64* w : {&p->W_z, &p->W_in, &p->W_f, &p->W_o}) {
            fill_vector(*w, 1, d, rng);
        }
        for (Mat64* r : {&p->R_z, &p->R_in, &p->R_f, &p->R_o}) {
            *r = glorot_uniform(d, d, rng);
        }
    } else {
        auto& g = std::get<GruParams>(unit.cell);
        for (Vec64* w : {&g.W_h, &g.W_u, &g.W_r}) {
            fill_vector(*w, 1, d, rng);
        }
        for (Mat64* r : {&g.R_h, &g.R_u, &g.R_r}) {
            *r = glorot_uniform(d, d, rng);
        }
    }
    fill_vector(unit.head.W, d, 1, rng);
    return unit;
}

Vec64 ParamLayout::l2_mask() const {
    Vec64 mask(total, 0.0);
    for (const auto& b : blocks) {
        if (b.regularized) {
            std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(b.offset), b.size, 1.0);
        }
    }
    return mask;
}

ParamLayout layout_of(const Unit& unit) {
    ParamLayout layout;
    visit_blocks(unit, [&](BlockInfo info, std::span<const double> values) {
        layout.blocks.push_back({std::string(info.name), layout.total, values.size(), info.regularized});
        layout.total += values.size();
    });
    return layout;
}

Vec64 flatten(const Unit& unit) {
    Vec64 flat;
    visit_blocks(unit, [&](BlockInfo, std::span<const double> values) {
        flat.insert(flat.end(), values.begin(), values.end());
    });
    return flat;
}

void assign_flat(Unit& unit, std::span<const double> flat) {
    std::size_t pos = 0;
    visit_blocks(unit, [&](BlockInfo info, std::span<double> values) {
        if (pos + values.size() > flat.size()) {
            throw DimensionError("assign_flat: flat vector too short at block " + std::string(info.name));
        }
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), values.size(), values.begin());
        pos += values.size();
    });
    if (pos != flat.size()) {
        throw DimensionError("assign_flat: flat vector has " + std::to_string(flat.size()) + " elements, unit has " +
                             std::to_string(pos));
    }
}

}  // namespace mnl
