#include "mnl/agent.hpp"

#include <cmath>
#include <string>

#include "mnl/errors.hpp"
#include "mnl/unit.hpp"

namespace mnl {

void Agent::validate() const {
    if (window < 1) {
        throw CompatibilityError("agent window must be >= 1");
    }
    if (mpu.arch() != arch || dpu.arch() != arch) {
        throw CompatibilityError("agent units do not match the agent architecture");
    }
    if (mpu.head.activation != Activation::tanh) {
        throw CompatibilityError("MPU head must use tanh");
    }
    if (dpu.head.activation != Activation::relu) {
        throw CompatibilityError("DPU head must use relu");
    }
}

double mpu_predict(const Agent& agent, std::span<const double> r_window) {
    if (r_window.size() != agent.window) {
        throw DimensionError("mpu_predict: window of length " + std::to_string(r_window.size()) + ", agent expects " +
                             std::to_string(agent.window));
    }
    return predict(agent.mpu, r_window);
}

MemoryWindow memory_update(const MemoryWindow& mem, double r_next, double mu_next) {
    MemoryWindow out;
    if (mem.values.empty()) {
        return out;
    }
    out.values.assign(mem.values.begin() + 1, mem.values.end());
    const double dev = r_next - mu_next;
    out.values.push_back(dev * dev);
    return out;
}

double dpu_predict(const Agent& agent, const MemoryWindow& memory) {
    if (memory.values.size() != agent.window) {
        throw DimensionError("dpu_predict: memory of length " + std::to_string(memory.values.size()) +
                             ", agent expects " + std::to_string(agent.window));
    }
    for (double v : memory.values) {
        if (!(v >= 0.0)) {
            throw DomainError("dpu_predict: squared deviation memory holds a negative or NaN value");
        }
    }
    return predict(agent.dpu, memory.values);
}

bool IntervalPrediction::contains(double r) const noexcept { return std::abs(r - mu) < l * sigma; }

IntervalPrediction make_interval(double mu, double var, double l) {
    if (!(var >= 0.0)) {
        throw DomainError("make_interval: variance must be >= 0");
    }
    if (!(l > 0.0)) {
        throw ParameterError("make_interval: l must be > 0");
    }
    IntervalPrediction iv;
    iv.mu = mu;
    iv.var = var;
    iv.sigma = std::sqrt(var);
    iv.l = l;
    iv.lower = mu - l * iv.sigma;
    iv.upper = mu + l * iv.sigma;
    return iv;
}

double coverage(std::span<const Observation> hits) {
    if (hits.empty()) {
        throw DomainError("coverage: undefined for an empty set of observations");
    }
    std::size_t inside = 0;
    for (const auto& h : hits) {
        inside += h.interval.contains(h.r) ? 1 : 0;
    }
    return static_cast<double>(inside) / static_cast<double>(hits.size());
}

double accuracy(std::span<const double> predictions, std::span<const double> targets, double radius) {
    if (predictions.size() != targets.size()) {
        throw DimensionError("accuracy: prediction and target lengths differ");
    }
    if (predictions.empty()) {
        throw DomainError("accuracy: undefined for empty sequences");
    }
    if (!(radius > 0.0)) {
        throw ParameterError("accuracy: radius must be > 0");
    }
    std::size_t close = 0;
    for (std::size_t k = 0; k < predictions.size(); ++k) {
        close += std::abs(predictions[k] - targets[k]) < radius ? 1 : 0;
    }
    return static_cast<double>(close) / static_cast<double>(predictions.size());
}

double score(double acc_mpu, double acc_dpu) { return (acc_mpu + acc_dpu) / 2.0; }

Vec64 squared_deviations(const ReturnPredictor& mpu, std::span<const double> returns, std::size_t w) {
    if (w < 1 || returns.size() <= w) {
        throw DataError(DataErrorKind::insufficient_data, "squared_deviations: series of length " +
                                                              std::to_string(returns.size()) +
                                                              " is too short for window " + std::to_string(w));
    }
    Vec64 out;
    out.reserve(returns.size() - w);
    for (std::size_t j = w; j < returns.size(); ++j) {
        const double mu = mpu(returns.subspan(j - w, w), j);
        const double dev = returns[j] - mu;
        out.push_back(dev * dev);
    }
    return out;
}

WindowedSet build_dpu_dataset(const ReturnPredictor& mpu, std::span<const double> returns, std::size_t w) {
    if (returns.size() <= 2 * w) {
        throw DataError(DataErrorKind::insufficient_data, "build_dpu_dataset: need more than " + std::to_string(2 * w) +
                                                              " returns, got " + std::to_string(returns.size()));
    }
    return build_windows(squared_deviations(mpu, returns, w), w);
}

WindowedSet build_dpu_dataset(const Unit& mpu, std::span<const double> returns, std::size_t w) {
    return build_dpu_dataset([&mpu](std::span<const double> window, std::size_t) { return predict(mpu, window); },
                             returns, w);
}

AgentTraining train_agent(std::span<const double> returns, Arch arch, std::size_t w, std::size_t hidden,
                          const OptimConfig& cfg, const Rng& rng, const TrainingHooks* hooks) {
    if (returns.size() <= 2 * w) {
        throw DataError(DataErrorKind::insufficient_data, "train_agent: need more than " + std::to_string(2 * w) +
                                                              " training returns, got " +
                                                              std::to_string(returns.size()));
    }
    auto start = [&](UnitRole role) {
        if (hooks != nullptr && hooks->on_start) hooks->on_start(role);
    };
    auto finish = [&](UnitRole role, const TrainResult& r) {
        if (hooks != nullptr && hooks->on_finish) hooks->on_finish(role, r);
    };

    AgentTraining out;
    start(UnitRole::mpu);
    Rng mpu_rng = rng.split(0);
    out.mpu = train_unit(arch, hidden, build_windows(returns, w), Activation::tanh, cfg, mpu_rng);
    finish(UnitRole::mpu, out.mpu);

    start(UnitRole::dpu);
    Rng dpu_rng = rng.split(1);
    const WindowedSet dpu_set = build_dpu_dataset(out.mpu.unit, returns, w);
    Unit dpu = init_unit(arch, hidden, Activation::relu, dpu_rng);
    if (cfg.dpu_bias_at_target_mean) {
        double sum = 0.0;
        for (const auto& pair : dpu_set.pairs) {
            sum += pair.target;
        }
        dpu.head.b = sum / static_cast<double>(dpu_set.size());
    }
    out.dpu = train_from(std::move(dpu), dpu_set, cfg);
    finish(UnitRole::dpu, out.dpu);

    out.agent.arch = arch;
    out.agent.window = w;
    out.agent.mpu = out.mpu.unit;
    out.agent.dpu = out.dpu.unit;
    out.agent.provenance.seed = rng.seed();
    return out;
}

}  // namespace mnl
