#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "mnl/cells.hpp"
#include "mnl/data.hpp"
#include "mnl/optim.hpp"

namespace mnl {

struct Provenance {
    std::uint64_t seed = 0;
    std::string config_digest;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// The modular agent: a returns unit (MPU, tanh head) feeding a squared
/// deviation memory that feeds a dispersion unit (DPU, relu head). Both
/// units read windows of the same length.
struct Agent {
    Arch arch = Arch::gru;
    std::size_t window = 0;
    Unit mpu;
    Unit dpu;
    Provenance provenance;

    /// Throws CompatibilityError if the head activations or widths are wrong.
    void validate() const;

    friend bool operator==(const Agent&, const Agent&) = default;
};

/// Expected next return from `r_window` (length w, earliest first).
double mpu_predict(const Agent& agent, std::span<const double> r_window);

/// Last w squared deviations between observed returns and MPU predictions,
/// earliest first.
struct MemoryWindow {
    Vec64 values;

    friend bool operator==(const MemoryWindow&, const MemoryWindow&) = default;
};

/// Drops the earliest slot, shifts the rest one slot earlier and stores
/// (r_next - mu_next)² in the newest slot.
MemoryWindow memory_update(const MemoryWindow& mem, double r_next, double mu_next);

/// Expected next squared deviation; DomainError on a negative memory slot.
double dpu_predict(const Agent& agent, const MemoryWindow& memory);

/// Open interval ]mu - l·sigma, mu + l·sigma[.
struct IntervalPrediction {
    double mu = 0.0;
    double var = 0.0;
    double sigma = 0.0;
    double l = 1.0;
    double lower = 0.0;
    double upper = 0.0;

    /// Strict: |r - mu| < l·sigma. A zero-width interval contains nothing.
    [[nodiscard]] bool contains(double r) const noexcept;
};

IntervalPrediction make_interval(double mu, double var, double l);

struct Observation {
    double r = 0.0;
    IntervalPrediction interval;
};

/// Proportion of observations strictly inside their interval.
double coverage(std::span<const Observation> hits);

/// Proportion of |pred - target| < radius.
double accuracy(std::span<const double> predictions, std::span<const double> targets, double radius);

inline constexpr double kMpuAccuracyRadius = 0.01;
inline constexpr double kDpuAccuracyRadius = 0.0001;

double score(double acc_mpu, double acc_dpu);

/// Predictor signature for the DPU dataset builder: receives the return
/// window and the index of the return being predicted.
using ReturnPredictor = std::function<double(std::span<const double> window, std::size_t target_index)>;

/// d²_j = (r_j - mu_j)² for j = w .. N-1, where mu_j is predicted from
/// returns[j-w .. j-1]. Length N - w; element k belongs to return index w + k.
Vec64 squared_deviations(const ReturnPredictor& mpu, std::span<const double> returns, std::size_t w);

/// Sliding windows over squared_deviations: N - 2w pairs. Pair k has inputs
/// d² at return indices w+k .. 2w+k-1 and targets d² at return index 2w+k.
WindowedSet build_dpu_dataset(const ReturnPredictor& mpu, std::span<const double> returns, std::size_t w);
WindowedSet build_dpu_dataset(const Unit& mpu, std::span<const double> returns, std::size_t w);

enum class UnitRole { mpu, dpu };

/// Optional instrumentation for train_agent.
struct TrainingHooks {
    std::function<void(UnitRole)> on_start;
    std::function<void(UnitRole, const TrainResult&)> on_finish;
};

struct AgentTraining {
    Agent agent;
    TrainResult mpu;
    TrainResult dpu;
};

/// Trains the MPU on windows of `returns`, then the DPU on squared deviations
/// of the trained MPU. The MPU draws from rng.split(0), the DPU from
/// rng.split(1), so the initial parameters depend only on the seed, the
/// architecture and the hidden width.
AgentTraining train_agent(std::span<const double> returns, Arch arch, std::size_t w, std::size_t hidden,
                          const OptimConfig& cfg, const Rng& rng, const TrainingHooks* hooks = nullptr);

}  // namespace mnl
