#include "mnl/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mnl/errors.hpp"
#include "mnl/unit.hpp"

namespace mnl {

void OptimConfig::validate() const {
    auto fail = [](const std::string& what) { throw ParameterError("optimizer config: " + what); };
    if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0, 1)");
    if (!(lr_dec < 1.0 && lr_dec > 0.0)) fail("lr_dec must lie in (0, 1)");
    if (!(lr_inc > 1.0)) fail("lr_inc must exceed 1");
    if (!(lr_min > 0.0 && lr_min <= lr_max)) fail("need 0 < lr_min <= lr_max");
    if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
    if (!(l2_lambda >= 0.0)) fail("l2_lambda must be >= 0");
    if (!(clip_threshold > 0.0)) fail("clip_threshold must be > 0");
    if (minibatch_size < 1) fail("minibatch_size must be >= 1");
    if (epochs < 1) fail("epochs must be >= 1");
}

RmsPropState RmsPropState::fresh(std::size_t n, const OptimConfig& cfg) {
    RmsPropState s;
    s.mean_square.assign(n, 0.0);
    s.rate.assign(n, cfg.lr_min);
    s.prev_sign.assign(n, 0);
    return s;
}

Vec64 clip_truncate(std::span<const double> grads, double threshold) {
    Vec64 out(grads.begin(), grads.end());
    for (double& g : out) {
        g = std::clamp(g, -threshold, threshold);
    }
    return out;
}

void rmsprop_update(std::span<double> params, std::span<const double> grads, RmsPropState& state,
                    const OptimConfig& cfg) {
    const std::size_t n = params.size();
    if (grads.size() != n || state.mean_square.size() != n || state.rate.size() != n || state.prev_sign.size() != n) {
        throw DimensionError("rmsprop_update: parameter, gradient and state sizes differ");
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double g = grads[j];
        state.mean_square[j] = cfg.gamma * state.mean_square[j] + (1.0 - cfg.gamma) * g * g;
        const signed char sign = g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
        if (cfg.adaptive_rates) {
            const int agreement = sign * state.prev_sign[j];
            double factor = 1.0;
            if (agreement > 0) {
                factor = cfg.lr_inc;
            } else if (agreement < 0) {
                factor = cfg.lr_dec;
            }
            state.rate[j] = std::clamp(state.rate[j] * factor, cfg.lr_min, cfg.lr_max);
        }
        params[j] -= cfg.learning_rate * state.rate[j] * g / std::sqrt(state.mean_square[j] + kRmsPropEpsilon);
        state.prev_sign[j] = sign;
    }
    ++state.updates;
}

std::vector<Batch> minibatch_schedule(std::size_t n_pairs, std::size_t size) {
    if (size < 1) {
        throw ParameterError("minibatch size must be >= 1");
    }
    std::vector<Batch> out;
    for (std::size_t first = 0; first < n_pairs; first += size) {
        out.push_back({first, std::min(size, n_pairs - first)});
    }
    return out;
}

double rmse_on(const Unit& unit, const WindowedSet& set) {
    if (set.empty()) {
        throw DataError(DataErrorKind::insufficient_data, "rmse_on: empty window set");
    }
    double sum = 0.0;
    for (const auto& pair : set.pairs) {
        const double e = predict(unit, pair.input) - pair.target;
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(set.size()));
}

TrainResult train_unit(Arch arch, std::size_t hidden, const WindowedSet& windows, Activation head_activation,
                       const OptimConfig& cfg, Rng& rng) {
    return train_from(init_unit(arch, hidden, head_activation, rng), windows, cfg);
}

TrainResult train_from(Unit unit, const WindowedSet& windows, const OptimConfig& cfg) {
    cfg.validate();
    if (windows.empty()) {
        throw DataError(DataErrorKind::insufficient_data, "train_unit: no training pairs");
    }
    TrainResult result;
    result.initial_rmse = rmse_on(unit, windows);

    const ParamLayout layout = layout_of(unit);
    const Vec64 l2_mask = layout.l2_mask();
    Vec64 params = flatten(unit);
    RmsPropState state = RmsPropState::fresh(params.size(), cfg);
    const auto batches = minibatch_schedule(windows.size(), cfg.minibatch_size);

    Vec64 grad_sum(params.size());
    std::size_t batch_index = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (const Batch& batch : batches) {
            std::fill(grad_sum.begin(), grad_sum.end(), 0.0);
            double loss = 0.0;
            for (std::size_t k = batch.first; k < batch.first + batch.count; ++k) {
                const WindowPair& pair = windows.pairs[k];
                const ForwardResult fwd = forward_sequence(unit, pair.input);
                const double e = fwd.prediction - pair.target;
                loss += e * e;
                const Vec64 g = flatten(backward_sequence(unit, fwd.tape, pair.target));
                for (std::size_t j = 0; j < g.size(); ++j) {
                    grad_sum[j] += g[j];
                }
            }
            if (!std::isfinite(loss)) {
                throw NumericalError("non-finite training loss at batch " + std::to_string(batch_index) +
                                     " (epoch " + std::to_string(epoch) + ")");
            }
            const double inv = 1.0 / static_cast<double>(batch.count);
            for (double& g : grad_sum) {
                g *= inv;
            }
            Vec64 step = clip_truncate(grad_sum, cfg.clip_threshold);
            for (std::size_t j = 0; j < step.size(); ++j) {
                step[j] += cfg.l2_lambda * l2_mask[j] * params[j];
            }
            rmsprop_update(params, step, state, cfg);
            if (!all_finite(params)) {
                throw NumericalError("non-finite parameters after batch " + std::to_string(batch_index) +
                                     " (epoch " + std::to_string(epoch) + ")");
            }
            assign_flat(unit, params);
            ++batch_index;
        }
    }
    result.updates = state.updates;
    result.rmse = rmse_on(unit, windows);
    result.unit = std::move(unit);
    return result;
}

}  // namespace mnl
