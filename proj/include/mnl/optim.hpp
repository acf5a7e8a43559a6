#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mnl/cells.hpp"
#include "mnl/data.hpp"
#include "mnl/numerics.hpp"

namespace mnl {

/// Training settings.
struct OptimConfig {
    /// Weight of the running mean-squared gradient.
    double gamma = 0.95;
    /// Rate multiplier applied when a gradient keeps its sign.
    double lr_inc = 1.5;
    /// Rate multiplier applied when a gradient flips sign.
    double lr_dec = 0.1;
    double lr_min = 0.001;
    double lr_max = 0.1;
    /// Initial learning rate; lr_min/lr_max bound the per-parameter scale
    /// applied to it.
    double learning_rate = 0.001;
    double l2_lambda = 0.001;
    double clip_threshold = 1.0;
    std::size_t minibatch_size = 100;
    std::size_t epochs = 10;
    /// false disables the sign-driven rate adaptation: every parameter keeps
    /// the initial rate lr_min (plain RMSProp).
    bool adaptive_rates = true;
    /// Start the dispersion unit's output bias at the mean of its training
    /// targets instead of zero.
    bool dpu_bias_at_target_mean = true;

    /// Throws ParameterError naming the first violated constraint.
    void validate() const;
};

/// Per-parameter optimizer memory.
struct RmsPropState {
    Vec64 mean_square;
    Vec64 rate;
    std::vector<signed char> prev_sign;
    std::size_t updates = 0;

    static RmsPropState fresh(std::size_t n, const OptimConfig& cfg);
};

inline constexpr double kRmsPropEpsilon = 1e-8;

/// Clamps every element to [-threshold, threshold].
Vec64 clip_truncate(std::span<const double> grads, double threshold);

/// One optimizer step. `grads` must already contain clipping and the L2
/// term. For every element j:
///   m_j    <- gamma·m_j + (1-gamma)·g_j²
///   rate_j <- clamp(rate_j·k, lr_min, lr_max), k = lr_inc if g_j and the
///             previous gradient share a nonzero sign, lr_dec if the signs
///             oppose, 1 otherwise
///   w_j    <- w_j - learning_rate·rate_j·g_j / sqrt(m_j + 1e-8)
void rmsprop_update(std::span<double> params, std::span<const double> grads, RmsPropState& state,
                    const OptimConfig& cfg);

struct Batch {
    std::size_t first = 0;
    std::size_t count = 0;
};

/// Contiguous, order-preserving batches of `size` pairs; the last batch may
/// be shorter. Empty for n_pairs == 0.
std::vector<Batch> minibatch_schedule(std::size_t n_pairs, std::size_t size);

struct TrainResult {
    Unit unit;
    /// RMSE over the full training set after the final epoch.
    double rmse = 0.0;
    /// RMSE of the freshly initialized unit.
    double initial_rmse = 0.0;
    std::size_t updates = 0;
};

/// RMSE of `unit` over every pair of `set`.
double rmse_on(const Unit& unit, const WindowedSet& set);

/// Initializes a unit with init_unit and runs cfg.epochs passes of
/// minibatch RMSProp over `windows` in temporal order.
TrainResult train_unit(Arch arch, std::size_t hidden, const WindowedSet& windows, Activation head_activation,
                       const OptimConfig& cfg, Rng& rng);

/// Same procedure starting from a given unit.
TrainResult train_from(Unit unit, const WindowedSet& windows, const OptimConfig& cfg);

}  // namespace mnl
