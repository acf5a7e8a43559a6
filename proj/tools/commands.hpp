#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mnl/cells.hpp"
#include "mnl/optim.hpp"

namespace mnl::cli {

/// Exit statuses of the `mnl` binary.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_data = 3,
    exit_numerical = 4,
    exit_compatibility = 5,
};

struct RunConfig {
    std::filesystem::path data;
    Arch arch = Arch::gru;
    std::size_t window = 30;
    std::size_t hidden = 2;
    std::size_t n_train = 8000;
    std::size_t population = 100;
    std::uint64_t seed = 1;
    std::vector<double> l_levels{1.0, 1.5, 2.0};
    OptimConfig optim;
    std::filesystem::path out = ".";
    /// Worker threads for population training; 0 = hardware concurrency.
    /// Never affects results.
    std::size_t threads = 0;
    /// Window used to score the population. 0 selects at `window`; any other
    /// value selects there and retrains the winner's seed at `window`.
    std::size_t select_window = 0;

    /// Throws ParameterError.
    void validate() const;

    /// Every setting that influences results, as `key = value` lines in a
    /// fixed order. The text is accepted back by --config.
    [[nodiscard]] std::string canonical() const;
};

/// Selects and trains an agent on the training split. Writes agent.txt,
/// population.csv and summary.csv to cfg.out.
void cmd_train(const RunConfig& cfg, std::ostream& log);

struct EvaluateRequest {
    std::filesystem::path agent;
    /// "train", "test" or "both".
    std::string split = "both";
    /// Set when the user named an architecture or window explicitly; a
    /// mismatch with the agent file is a CompatibilityError.
    std::optional<Arch> expect_arch;
    std::optional<std::size_t> expect_window;
};

/// Writes evaluation.csv with one row per (split, l).
void cmd_evaluate(const RunConfig& cfg, const EvaluateRequest& req, std::ostream& log);

/// Selects once, then retrains the winning seed at every window in
/// `windows`. Writes sweep.csv with one row per (window, l).
void cmd_sweep_window(const RunConfig& cfg, const std::vector<std::size_t>& windows, std::ostream& log);

/// Writes intervals_<split>.csv for one split and level.
void cmd_export_intervals(const RunConfig& cfg, const EvaluateRequest& req, double l, std::ostream& log);

/// Writes a synthetic GARCH(1,1) price file.
void cmd_synth(const std::filesystem::path& path, std::size_t n_prices, std::uint64_t seed, std::ostream& log);

}  // namespace mnl::cli
