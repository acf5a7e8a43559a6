#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mnl/agent.hpp"
#include "mnl/data.hpp"

namespace mnl {

/// One-step-ahead prediction for the return at `target_index`.
struct Forecast {
    std::size_t target_index = 0;
    double mu = 0.0;
    double var = 0.0;
};

/// Online form of the agent. Returns are fed one at a time with observe();
/// once 2w returns have been seen a forecast for the next one is available.
/// Forecasts are built from observed returns and the squared deviations of
/// those returns from the MPU's own earlier predictions only.
class WalkForward {
public:
    explicit WalkForward(const Agent& agent);

    void observe(double r);
    [[nodiscard]] const std::optional<Forecast>& forecast() const noexcept { return forecast_; }
    [[nodiscard]] std::size_t observed() const noexcept { return observed_; }

private:
    const Agent* agent_;
    std::vector<double> recent_;
    MemoryWindow memory_;
    std::optional<double> pending_mu_;
    std::optional<Forecast> forecast_;
    std::size_t observed_ = 0;
};

struct Outcome {
    Forecast forecast;
    double r = 0.0;
};

/// Drives WalkForward over indices 0..n-1. `on_forecast` (optional) fires
/// after a forecast is formed and before `read` is asked for its target.
std::vector<Outcome> walk_forward(const Agent& agent, std::size_t n, const std::function<double(std::size_t)>& read,
                                  const std::function<void(const Forecast&)>& on_forecast = {});

std::vector<Outcome> walk_forward(const Agent& agent, std::span<const double> segment);

inline const std::vector<double> kDefaultLevels{1.0, 1.5, 2.0};

struct EvalReport {
    double rmse_mpu = 0.0;
    double rmse_dpu = 0.0;
    double acc_mpu = 0.0;
    double acc_dpu = 0.0;
    double score = 0.0;
    /// (l, p_l) in the order the levels were requested.
    std::vector<std::pair<double, double>> coverage;
    std::size_t n = 0;

    /// p_l for a requested level; throws ParameterError if absent.
    [[nodiscard]] double coverage_at(double l) const;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport evaluate(const Agent& agent, std::span<const double> segment,
                    std::span<const double> levels = kDefaultLevels);
EvalReport evaluate_outcomes(std::span<const Outcome> outcomes, std::span<const double> levels);

struct IntervalRow {
    Date date;
    double r = 0.0;
    IntervalPrediction interval;
    bool hit = false;
};

/// Plot-ready interval series: one row per forecast position (length - 2w).
std::vector<IntervalRow> interval_series(const Agent& agent, const ReturnSeries& segment, double l);

}  // namespace mnl
