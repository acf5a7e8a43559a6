#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mnl/numerics.hpp"

namespace mnl {

enum class Arch { lstm, gru };
enum class Activation { tanh, relu };

std::string_view to_string(Arch arch) noexcept;
std::string_view to_string(Activation act) noexcept;
Arch parse_arch(std::string_view text);
Activation parse_activation(std::string_view text);

/// Describes one named weight block for the flat/serialized views.
struct BlockInfo {
    std::string_view name;
    /// Receives the L2 penalty during training.
    bool regularized = false;
};

/// Peephole LSTM with scalar input. Gate naming: z block input, in input
/// gate, f forget gate, o output gate.
struct LstmParams {
    std::size_t d = 0;
    Vec64 W_z, W_in, W_f, W_o;
    Mat64 R_z, R_in, R_f, R_o;
    Vec64 p_in, p_f, p_o;
    Vec64 b_z, b_in, b_f, b_o;

    LstmParams() = default;
    explicit LstmParams(std::size_t width);

    /// Visits every block in canonical order:
    /// W_z W_in W_f W_o R_z R_in R_f R_o p_in p_f p_o b_z b_in b_f b_o.
    template <class Self, class F>
    static void visit(Self& self, F&& f) {
        f(BlockInfo{"W_z", true}, std::span(self.W_z));
        f(BlockInfo{"W_in", true}, std::span(self.W_in));
        f(BlockInfo{"W_f", true}, std::span(self.W_f));
        f(BlockInfo{"W_o", true}, std::span(self.W_o));
        f(BlockInfo{"R_z", true}, self.R_z.values());
        f(BlockInfo{"R_in", true}, self.R_in.values());
        f(BlockInfo{"R_f", true}, self.R_f.values());
        f(BlockInfo{"R_o", true}, self.R_o.values());
        f(BlockInfo{"p_in", false}, std::span(self.p_in));
        f(BlockInfo{"p_f", false}, std::span(self.p_f));
        f(BlockInfo{"p_o", false}, std::span(self.p_o));
        f(BlockInfo{"b_z", false}, std::span(self.b_z));
        f(BlockInfo{"b_in", false}, std::span(self.b_in));
        f(BlockInfo{"b_f", false}, std::span(self.b_f));
        f(BlockInfo{"b_o", false}, std::span(self.b_o));
    }

    friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

/// GRU with scalar input and no gate biases. h block is the candidate,
/// u the update gate, r the reset gate.
struct GruParams {
    std::size_t d = 0;
    Vec64 W_h, W_u, W_r;
    Mat64 R_h, R_u, R_r;

    GruParams() = default;
    explicit GruParams(std::size_t width);

    /// Canonical order: W_h W_u W_r R_h R_u R_r.
    template <class Self, class F>
    static void visit(Self& self, F&& f) {
        f(BlockInfo{"W_h", true}, std::span(self.W_h));
        f(BlockInfo{"W_u", true}, std::span(self.W_u));
        f(BlockInfo{"W_r", true}, std::span(self.W_r));
        f(BlockInfo{"R_h", true}, self.R_h.values());
        f(BlockInfo{"R_u", true}, self.R_u.values());
        f(BlockInfo{"R_r", true}, self.R_r.values());
    }

    friend bool operator==(const GruParams&, const GruParams&) = default;
};

/// Single output neuron: activation(W·h + b).
struct OutputHead {
    Vec64 W;
    double b = 0.0;
    Activation activation = Activation::tanh;

    friend bool operator==(const OutputHead&, const OutputHead&) = default;
};

struct CellState {
    Vec64 h;
    /// Memory cells; empty for GRU.
    Vec64 c;

    static CellState zero(Arch arch, std::size_t d);
};

struct LstmStepRecord {
    double x = 0.0;
    Vec64 h_prev, c_prev;
    Vec64 z, i, f, c, o, tanh_c, h;
};

struct GruStepRecord {
    double x = 0.0;
    Vec64 h_prev;
    Vec64 u, e, reset_h, h_tilde, h;
};

/// Test hook that pins gate activations to fixed values, bypassing their
/// pre-activations. Unset members leave the gate alone.
struct GateForcing {
    std::optional<double> lstm_input;
    std::optional<double> lstm_forget;
    std::optional<double> gru_update;
};

std::pair<CellState, LstmStepRecord> lstm_step(const LstmParams& p, const CellState& s, double x,
                                               const GateForcing* forcing = nullptr);
std::pair<CellState, GruStepRecord> gru_step(const GruParams& p, const CellState& s, double x,
                                             const GateForcing* forcing = nullptr);

using CellParams = std::variant<LstmParams, GruParams>;

/// A recurrent learning unit: cell parameters plus its scalar output head.
struct Unit {
    CellParams cell;
    OutputHead head;

    [[nodiscard]] Arch arch() const noexcept;
    [[nodiscard]] std::size_t hidden() const noexcept;

    friend bool operator==(const Unit&, const Unit&) = default;
};

/// Everything the backward pass needs from one forward pass over a window.
struct ForwardTape {
    std::variant<std::vector<LstmStepRecord>, std::vector<GruStepRecord>> steps;
    double head_preactivation = 0.0;
    double prediction = 0.0;

    [[nodiscard]] std::size_t length() const noexcept;
    [[nodiscard]] const Vec64& final_hidden() const;
};

struct ForwardResult {
    double prediction = 0.0;
    ForwardTape tape;
};

double apply_activation(Activation act, double x) noexcept;

/// Runs the cell over `window` earliest to latest from the zero state and
/// applies the head to the final hidden state.
ForwardResult forward_sequence(const Unit& unit, std::span<const double> window,
                               const GateForcing* forcing = nullptr);

/// Same prediction as forward_sequence without materializing the tape.
double predict(const Unit& unit, std::span<const double> window);

/// Exact gradient of (prediction - target)² with respect to every parameter
/// of `unit`, returned as a Unit of the same shape.
Unit backward_sequence(const Unit& unit, const ForwardTape& tape, double target);

}  // namespace mnl
