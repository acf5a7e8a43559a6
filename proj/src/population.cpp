#include "mnl/population.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "mnl/errors.hpp"

namespace mnl {

std::uint64_t agent_seed(std::uint64_t master_seed, std::size_t index) noexcept {
    return derive_seed(master_seed, index);
}

std::size_t pick_best(std::span<const double> scores) {
    if (scores.empty()) {
        throw ParameterError("pick_best: no candidates");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) {
            best = i;
        }
    }
    return best;
}

Selection select_best(std::span<const double> train_returns, const PopulationSpec& spec, const OptimConfig& cfg,
                      std::span<const double> levels) {
    if (spec.population < 1) {
        throw ParameterError("population must be >= 1");
    }
    cfg.validate();

    std::vector<std::optional<Agent>> agents(spec.population);
    std::vector<MemberSummary> members(spec.population);
    std::vector<std::exception_ptr> errors(spec.population);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < spec.population; i = next++) {
            try {
                const std::uint64_t seed = agent_seed(spec.master_seed, i);
                AgentTraining trained =
                    train_agent(train_returns, spec.arch, spec.window, spec.hidden, cfg, Rng(seed));
                members[i].index = i;
                members[i].seed = seed;
                members[i].train_rmse_mpu = trained.mpu.rmse;
                members[i].train_rmse_dpu = trained.dpu.rmse;
                members[i].report = evaluate(trained.agent, train_returns, levels);
                agents[i] = std::move(trained.agent);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    std::size_t n_threads = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.threads;
    n_threads = std::min(n_threads, spec.population);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    // Report the lowest-index failure so the error is deterministic.
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    std::vector<double> scores(spec.population);
    for (std::size_t i = 0; i < spec.population; ++i) {
        scores[i] = members[i].report.score;
    }
    Selection sel;
    sel.best_index = pick_best(scores);
    sel.best = std::move(*agents[sel.best_index]);
    sel.members = std::move(members);
    return sel;
}

}  // namespace mnl
