#include "mnl/evaluate.hpp"

#include <cmath>
#include <string>

#include "mnl/errors.hpp"

namespace mnl {

WalkForward::WalkForward(const Agent& agent) : agent_(&agent) {
    agent.validate();
    recent_.reserve(agent.window + 1);
    memory_.values.reserve(agent.window + 1);
}

void WalkForward::observe(double r) {
    if (!std::isfinite(r)) {
        throw NumericalError("walk-forward: non-finite return at index " + std::to_string(observed_));
    }
    const std::size_t w = agent_->window;
    if (pending_mu_) {
        if (memory_.values.size() < w) {
            const double dev = r - *pending_mu_;
            memory_.values.push_back(dev * dev);
        } else {
            memory_ = memory_update(memory_, r, *pending_mu_);
        }
    }
    recent_.push_back(r);
    if (recent_.size() > w) {
        recent_.erase(recent_.begin());
    }
    ++observed_;

    pending_mu_.reset();
    forecast_.reset();
    if (recent_.size() == w) {
        pending_mu_ = mpu_predict(*agent_, recent_);
        if (memory_.values.size() == w) {
            forecast_ = Forecast{observed_, *pending_mu_, dpu_predict(*agent_, memory_)};
        }
    }
}

std::vector<Outcome> walk_forward(const Agent& agent, std::size_t n, const std::function<double(std::size_t)>& read,
                                  const std::function<void(const Forecast&)>& on_forecast) {
    WalkForward online(agent);
    std::vector<Outcome> out;
    if (n > 2 * agent.window) {
        out.reserve(n - 2 * agent.window);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const std::optional<Forecast> f = online.forecast();
        if (f && on_forecast) {
            on_forecast(*f);
        }
        const double r = read(j);
        if (f) {
            out.push_back({*f, r});
        }
        online.observe(r);
    }
    return out;
}

std::vector<Outcome> walk_forward(const Agent& agent, std::span<const double> segment) {
    return walk_forward(agent, segment.size(), [segment](std::size_t j) { return segment[j]; });
}

double EvalReport::coverage_at(double l) const {
    for (const auto& [level, p] : coverage) {
        if (level == l) {
            return p;
        }
    }
    throw ParameterError("report has no coverage for l = " + std::to_string(l));
}

EvalReport evaluate_outcomes(std::span<const Outcome> outcomes, std::span<const double> levels) {
    if (outcomes.empty()) {
        throw DataError(DataErrorKind::insufficient_data, "evaluate: no forecast positions");
    }
    EvalReport rep;
    rep.n = outcomes.size();
    Vec64 mu(rep.n), r(rep.n), var(rep.n), dev2(rep.n);
    double se_mpu = 0.0;
    double se_dpu = 0.0;
    for (std::size_t k = 0; k < rep.n; ++k) {
        mu[k] = outcomes[k].forecast.mu;
        var[k] = outcomes[k].forecast.var;
        r[k] = outcomes[k].r;
        const double e = r[k] - mu[k];
        dev2[k] = e * e;
        se_mpu += e * e;
        se_dpu += (var[k] - dev2[k]) * (var[k] - dev2[k]);
    }
    rep.rmse_mpu = std::sqrt(se_mpu / static_cast<double>(rep.n));
    rep.rmse_dpu = std::sqrt(se_dpu / static_cast<double>(rep.n));
    rep.acc_mpu = accuracy(mu, r, kMpuAccuracyRadius);
    rep.acc_dpu = accuracy(var, dev2, kDpuAccuracyRadius);
    rep.score = score(rep.acc_mpu, rep.acc_dpu);
    std::vector<Observation> obs(rep.n);
    for (double l : levels) {
        for (std::size_t k = 0; k < rep.n; ++k) {
            obs[k] = {r[k], make_interval(mu[k], var[k], l)};
        }
        rep.coverage.emplace_back(l, mnl::coverage(obs));
    }
    return rep;
}

EvalReport evaluate(const Agent& agent, std::span<const double> segment, std::span<const double> levels) {
    if (segment.size() <= 2 * agent.window) {
        throw DataError(DataErrorKind::insufficient_data, "evaluate: segment of length " +
                                                              std::to_string(segment.size()) + " needs more than " +
                                                              std::to_string(2 * agent.window) + " returns");
    }
    const auto outcomes = walk_forward(agent, segment);
    return evaluate_outcomes(outcomes, levels);
}

std::vector<IntervalRow> interval_series(const Agent& agent, const ReturnSeries& segment, double l) {
    if (segment.size() <= 2 * agent.window) {
        throw DataError(DataErrorKind::insufficient_data, "interval series: segment too short for window " +
                                                              std::to_string(agent.window));
    }
    const auto outcomes = walk_forward(agent, segment.values);
    std::vector<IntervalRow> rows;
    rows.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        IntervalRow row;
        row.date = segment.dates[o.forecast.target_index];
        row.r = o.r;
        row.interval = make_interval(o.forecast.mu, o.forecast.var, l);
        row.hit = row.interval.contains(o.r);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace mnl
