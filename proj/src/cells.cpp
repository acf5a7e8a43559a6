#include "mnl/cells.hpp"

#include <cmath>
#include <string>

#include "mnl/errors.hpp"

namespace mnl {

namespace {

// out = x·W + R·h (+ bias)
void affine(Vec64& out, double x, const Vec64& W, const Mat64& R, const Vec64& h) {
    const std::size_t d = W.size();
    for (std::size_t r = 0; r < d; ++r) {
        double acc = x * W[r];
        for (std::size_t c = 0; c < d; ++c) {
            acc += R(r, c) * h[c];
        }
        out[r] = acc;
    }
}

void require_state(std::size_t d, const CellState& s, bool needs_cells) {
    if (s.h.size() != d || (needs_cells && s.c.size() != d)) {
        throw DimensionError("cell state width does not match parameter width " + std::to_string(d));
    }
}

// Accumulates outer(delta, v) into G.
void add_outer(Mat64& G, const Vec64& delta, const Vec64& v) {
    for (std::size_t r = 0; r < G.rows(); ++r) {
        for (std::size_t c = 0; c < G.cols(); ++c) {
            G(r, c) += delta[r] * v[c];
        }
    }
}

void add_scaled(Vec64& acc, double s, const Vec64& v) {
    for (std::size_t j = 0; j < acc.size(); ++j) {
        acc[j] += s * v[j];
    }
}

void add_transposed(Vec64& acc, const Mat64& R, const Vec64& delta) {
    for (std::size_t r = 0; r < R.rows(); ++r) {
        for (std::size_t c = 0; c < R.cols(); ++c) {
            acc[c] += R(r, c) * delta[r];
        }
    }
}

double activation_derivative(Activation act, double pre, double out) noexcept {
    switch (act) {
        case Activation::tanh: return 1.0 - out * out;
        case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

void check_unit(const Unit& unit) {
    const std::size_t d = unit.hidden();
    if (unit.head.W.size() != d) {
        throw DimensionError("output head width " + std::to_string(unit.head.W.size()) +
                             " does not match hidden width " + std::to_string(d));
    }
}

}  // namespace

std::string_view to_string(Arch arch) noexcept { return arch == Arch::lstm ? "lstm" : "gru"; }

std::string_view to_string(Activation act) noexcept { return act == Activation::tanh ? "tanh" : "relu"; }

Arch parse_arch(std::string_view text) {
    if (text == "lstm") return Arch::lstm;
    if (text == "gru") return Arch::gru;
    throw ParameterError("unknown architecture '" + std::string(text) + "' (expected lstm or gru)");
}

Activation parse_activation(std::string_view text) {
    if (text == "tanh") return Activation::tanh;
    if (text == "relu") return Activation::relu;
    throw ParameterError("unknown activation '" + std::string(text) + "' (expected tanh or relu)");
}

LstmParams::LstmParams(std::size_t width)
    : d(width),
      W_z(width, 0.0), W_in(width, 0.0), W_f(width, 0.0), W_o(width, 0.0),
      R_z(width, width), R_in(width, width), R_f(width, width), R_o(width, width),
      p_in(width, 0.0), p_f(width, 0.0), p_o(width, 0.0),
      b_z(width, 0.0), b_in(width, 0.0), b_f(width, 0.0), b_o(width, 0.0) {}

GruParams::GruParams(std::size_t width)
    : d(width), W_h(width, 0.0), W_u(width, 0.0), W_r(width, 0.0),
      R_h(width, width), R_u(width, width), R_r(width, width) {}

CellState CellState::zero(Arch arch, std::size_t d) {
    CellState s;
    s.h.assign(d, 0.0);
    if (arch == Arch::lstm) {
        s.c.assign(d, 0.0);
    }
    return s;
}

std::pair<CellState, LstmStepRecord> lstm_step(const LstmParams& p, const CellState& s, double x,
                                               const GateForcing* forcing) {
    const std::size_t d = p.d;
    require_state(d, s, true);
    LstmStepRecord rec;
    rec.x = x;
    rec.h_prev = s.h;
    rec.c_prev = s.c;
    rec.z.resize(d);
    rec.i.resize(d);
    rec.f.resize(d);
    rec.c.resize(d);
    rec.o.resize(d);
    rec.tanh_c.resize(d);
    rec.h.resize(d);

    // z, i, f read the previous state; o peeps at the updated cells.
    Vec64 a(d);
    affine(a, x, p.W_z, p.R_z, s.h);
    for (std::size_t j = 0; j < d; ++j) {
        rec.z[j] = tanh_act(a[j] + p.b_z[j]);
    }
    affine(a, x, p.W_in, p.R_in, s.h);
    for (std::size_t j = 0; j < d; ++j) {
        rec.i[j] = sigm(a[j] + p.p_in[j] * s.c[j] + p.b_in[j]);
    }
    affine(a, x, p.W_f, p.R_f, s.h);
    for (std::size_t j = 0; j < d; ++j) {
        rec.f[j] = sigm(a[j] + p.p_f[j] * s.c[j] + p.b_f[j]);
    }
    if (forcing != nullptr) {
        if (forcing->lstm_input) rec.i.assign(d, *forcing->lstm_input);
        if (forcing->lstm_forget) rec.f.assign(d, *forcing->lstm_forget);
    }
    for (std::size_t j = 0; j < d; ++j) {
        rec.c[j] = rec.i[j] * rec.z[j] + rec.f[j] * s.c[j];
    }
    affine(a, x, p.W_o, p.R_o, s.h);
    for (std::size_t j = 0; j < d; ++j) {
        rec.o[j] = sigm(a[j] + p.p_o[j] * rec.c[j] + p.b_o[j]);
        rec.tanh_c[j] = tanh_act(rec.c[j]);
        rec.h[j] = rec.o[j] * rec.tanh_c[j];
    }
    CellState next{rec.h, rec.c};
    return {std::move(next), std::move(rec)};
}

std::pair<CellState, GruStepRecord> gru_step(const GruParams& p, const CellState& s, double x,
                                             const GateForcing* forcing) {
    const std::size_t d = p.d;
    require_state(d, s, false);
    GruStepRecord rec;
    rec.x = x;
    rec.h_prev = s.h;
    rec.u.resize(d);
    rec.e.resize(d);
    rec.reset_h.resize(d);
    rec.h_tilde.resize(d);
    rec.h.resize(d);

    Vec64 a(d);
    affine(a, x, p.W_u, p.R_u, s.h);
    for (std::size_t j = 0; j < d; ++j) {
        rec.u[j] = sigm(a[j]);
    }
    if (forcing != nullptr && forcing->gru_update) {
        rec.u.assign(d, *forcing->gru_update);
    }
    affine(a, x, p.W_r, p.R_r, s.h);
    for (std::size_t j = 0; j < d; ++j) {
        rec.e[j] = sigm(a[j]);
        rec.reset_h[j] = rec.e[j] * s.h[j];
    }
    affine(a, x, p.W_h, p.R_h, rec.reset_h);
    for (std::size_t j = 0; j < d; ++j) {
        rec.h_tilde[j] = tanh_act(a[j]);
        rec.h[j] = (1.0 - rec.u[j]) * s.h[j] + rec.u[j] * rec.h_tilde[j];
    }
    CellState next{rec.h, {}};
    return {std::move(next), std::move(rec)};
}

Arch Unit::arch() const noexcept { return std::holds_alternative<LstmParams>(cell) ? Arch::lstm : Arch::gru; }

std::size_t Unit::hidden() const noexcept {
    return std::visit([](const auto& p) { return p.d; }, cell);
}

std::size_t ForwardTape::length() const noexcept {
    return std::visit([](const auto& v) { return v.size(); }, steps);
}

const Vec64& ForwardTape::final_hidden() const {
    return std::visit(
        [](const auto& v) -> const Vec64& {
            if (v.empty()) {
                throw DimensionError("forward tape is empty");
            }
            return v.back().h;
        },
        steps);
}

double apply_activation(Activation act, double x) noexcept {
    return act == Activation::tanh ? tanh_act(x) : relu(x);
}

ForwardResult forward_sequence(const Unit& unit, std::span<const double> window, const GateForcing* forcing) {
    check_unit(unit);
    if (window.empty()) {
        throw DimensionError("forward_sequence: empty window");
    }
    ForwardResult out;
    CellState state = CellState::zero(unit.arch(), unit.hidden());
    if (const auto* lp = std::get_if<LstmParams>(&unit.cell)) {
        std::vector<LstmStepRecord> steps;
        steps.reserve(window.size());
        for (double x : window) {
            auto [next, rec] = lstm_step(*lp, state, x, forcing);
            state = std::move(next);
            steps.push_back(std::move(rec));
        }
        out.tape.steps = std::move(steps);
    } else {
        const auto& gp = std::get<GruParams>(unit.cell);
        std::vector<GruStepRecord> steps;
        steps.reserve(window.size());
        for (double x : window) {
            auto [next, rec] = gru_step(gp, state, x, forcing);
            state = std::move(next);
            steps.push_back(std::move(rec));
        }
        out.tape.steps = std::move(steps);
    }
    out.tape.head_preactivation = dot(unit.head.W, state.h) + unit.head.b;
    out.tape.prediction = apply_activation(unit.head.activation, out.tape.head_preactivation);
    out.prediction = out.tape.prediction;
    return out;
}

double predict(const Unit& unit, std::span<const double> window) {
    check_unit(unit);
    if (window.empty()) {
        throw DimensionError("predict: empty window");
    }
    CellState state = CellState::zero(unit.arch(), unit.hidden());
    if (const auto* lp = std::get_if<LstmParams>(&unit.cell)) {
        for (double x : window) {
            state = lstm_step(*lp, state, x).first;
        }
    } else {
        const auto& gp = std::get<GruParams>(unit.cell);
        for (double x : window) {
            state = gru_step(gp, state, x).first;
        }
    }
    return apply_activation(unit.head.activation, dot(unit.head.W, state.h) + unit.head.b);
}

namespace {

void backward_lstm(const LstmParams& p, const std::vector<LstmStepRecord>& steps, Vec64 dh, LstmParams& g) {
    const std::size_t d = p.d;
    Vec64 dc_next(d, 0.0);
    Vec64 da_z(d), da_i(d), da_f(d), da_o(d), dc(d);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        const LstmStepRecord& s = *it;
        for (std::size_t j = 0; j < d; ++j) {
            const double d_o = dh[j] * s.tanh_c[j];
            da_o[j] = d_o * s.o[j] * (1.0 - s.o[j]);
            // cells feed h through tanh and o through its peephole
            dc[j] = dc_next[j] + dh[j] * s.o[j] * (1.0 - s.tanh_c[j] * s.tanh_c[j]) + p.p_o[j] * da_o[j];
            da_i[j] = dc[j] * s.z[j] * s.i[j] * (1.0 - s.i[j]);
            da_f[j] = dc[j] * s.c_prev[j] * s.f[j] * (1.0 - s.f[j]);
            da_z[j] = dc[j] * s.i[j] * (1.0 - s.z[j] * s.z[j]);
        }
        add_scaled(g.W_z, s.x, da_z);
        add_scaled(g.W_in, s.x, da_i);
        add_scaled(g.W_f, s.x, da_f);
        add_scaled(g.W_o, s.x, da_o);
        add_outer(g.R_z, da_z, s.h_prev);
        add_outer(g.R_in, da_i, s.h_prev);
        add_outer(g.R_f, da_f, s.h_prev);
        add_outer(g.R_o, da_o, s.h_prev);
        for (std::size_t j = 0; j < d; ++j) {
            g.p_in[j] += da_i[j] * s.c_prev[j];
            g.p_f[j] += da_f[j] * s.c_prev[j];
            g.p_o[j] += da_o[j] * s.c[j];
            g.b_z[j] += da_z[j];
            g.b_in[j] += da_i[j];
            g.b_f[j] += da_f[j];
            g.b_o[j] += da_o[j];
            dc_next[j] = dc[j] * s.f[j] + p.p_in[j] * da_i[j] + p.p_f[j] * da_f[j];
        }
        std::fill(dh.begin(), dh.end(), 0.0);
        add_transposed(dh, p.R_z, da_z);
        add_transposed(dh, p.R_in, da_i);
        add_transposed(dh, p.R_f, da_f);
        add_transposed(dh, p.R_o, da_o);
    }
}

void backward_gru(const GruParams& p, const std::vector<GruStepRecord>& steps, Vec64 dh, GruParams& g) {
    const std::size_t d = p.d;
    Vec64 da_u(d), da_e(d), da_h(d), d_reset(d), dh_prev(d);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        const GruStepRecord& s = *it;
        for (std::size_t j = 0; j < d; ++j) {
            da_u[j] = dh[j] * (s.h_tilde[j] - s.h_prev[j]) * s.u[j] * (1.0 - s.u[j]);
            da_h[j] = dh[j] * s.u[j] * (1.0 - s.h_tilde[j] * s.h_tilde[j]);
        }
        std::fill(d_reset.begin(), d_reset.end(), 0.0);
        add_transposed(d_reset, p.R_h, da_h);
        for (std::size_t j = 0; j < d; ++j) {
            da_e[j] = d_reset[j] * s.h_prev[j] * s.e[j] * (1.0 - s.e[j]);
            dh_prev[j] = dh[j] * (1.0 - s.u[j]) + d_reset[j] * s.e[j];
        }
        add_scaled(g.W_h, s.x, da_h);
        add_scaled(g.W_u, s.x, da_u);
        add_scaled(g.W_r, s.x, da_e);
        add_outer(g.R_h, da_h, s.reset_h);
        add_outer(g.R_u, da_u, s.h_prev);
        add_outer(g.R_r, da_e, s.h_prev);
        add_transposed(dh_prev, p.R_u, da_u);
        add_transposed(dh_prev, p.R_r, da_e);
        dh.swap(dh_prev);
    }
}

}  // namespace

Unit backward_sequence(const Unit& unit, const ForwardTape& tape, double target) {
    check_unit(unit);
    const std::size_t d = unit.hidden();
    const bool lstm_tape = std::holds_alternative<std::vector<LstmStepRecord>>(tape.steps);
    if (lstm_tape != (unit.arch() == Arch::lstm) || tape.length() == 0 || tape.final_hidden().size() != d) {
        throw DimensionError("backward_sequence: tape does not match the unit");
    }

    Unit grad;
    grad.head.W.assign(d, 0.0);
    grad.head.activation = unit.head.activation;
    const double d_pred = 2.0 * (tape.prediction - target);
    const double d_pre =
        d_pred * activation_derivative(unit.head.activation, tape.head_preactivation, tape.prediction);
    const Vec64& h_final = tape.final_hidden();
    for (std::size_t j = 0; j < d; ++j) {
        grad.head.W[j] = d_pre * h_final[j];
    }
    grad.head.b = d_pre;

    Vec64 dh(d);
    for (std::size_t j = 0; j < d; ++j) {
        dh[j] = d_pre * unit.head.W[j];
    }
    if (const auto* lp = std::get_if<LstmParams>(&unit.cell)) {
        LstmParams g(d);
        backward_lstm(*lp, std::get<std::vector<LstmStepRecord>>(tape.steps), std::move(dh), g);
        grad.cell = std::move(g);
    } else {
        GruParams g(d);
        backward_gru(std::get<GruParams>(unit.cell), std::get<std::vector<GruStepRecord>>(tape.steps), std::move(dh),
                     g);
        grad.cell = std::move(g);
    }
    return grad;
}

}  // namespace mnl
