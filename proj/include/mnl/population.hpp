#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mnl/agent.hpp"
#include "mnl/evaluate.hpp"

namespace mnl {

/// Seed of population member `index`: derive_seed(master_seed, index).
std::uint64_t agent_seed(std::uint64_t master_seed, std::size_t index) noexcept;

struct MemberSummary {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    /// Scored on the training split by walk-forward evaluation.
    EvalReport report;
    /// Fit RMSEs reported by the optimizer on each unit's own training pairs.
    double train_rmse_mpu = 0.0;
    double train_rmse_dpu = 0.0;
};

struct Selection {
    std::size_t best_index = 0;
    Agent best;
    std::vector<MemberSummary> members;
};

/// Index of the highest score; ties go to the lowest index.
std::size_t pick_best(std::span<const double> scores);

struct PopulationSpec {
    Arch arch = Arch::gru;
    std::size_t window = 2;
    std::size_t hidden = 2;
    std::size_t population = 100;
    std::uint64_t master_seed = 0;
    /// Worker threads; 0 uses the hardware concurrency.
    std::size_t threads = 0;
};

/// Trains `population` agents with seeds agent_seed(master_seed, i), scores
/// each on `train_returns` and returns the best. The result does not depend
/// on the thread count.
Selection select_best(std::span<const double> train_returns, const PopulationSpec& spec, const OptimConfig& cfg,
                      std::span<const double> levels = kDefaultLevels);

}  // namespace mnl
