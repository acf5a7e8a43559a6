#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mnl/evaluate.hpp"
#include "mnl/population.hpp"

namespace mnl {

/// 17 significant digits (`%.17g`): parses back to the identical double.
std::string format_real(double x);

/// 64-bit FNV-1a of `text` as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

/// First line of every report: `# <tool> seed=<seed> config_digest=<digest> <extra>`.
std::string header_line(std::string_view tool, std::uint64_t seed, std::string_view config_digest,
                        std::string_view extra = {});

struct SplitReport {
    std::string split;
    EvalReport report;
};

/// Columns: split,l,coverage,rmse_mpu,rmse_dpu,acc_mpu,acc_dpu,score,n, one
/// row per (split, l).
std::string evaluation_csv(std::string_view header, std::span<const SplitReport> reports);

/// One row per population member.
std::string population_csv(std::string_view header, std::span<const MemberSummary> members);

/// Min/Max/Mean of RMSE and accuracy for each unit across the population.
std::string population_summary_csv(std::string_view header, std::span<const MemberSummary> members);

struct SweepRow {
    std::size_t window = 0;
    double l = 1.0;
    EvalReport train;
    EvalReport test;
};

std::string sweep_csv(std::string_view header, std::span<const SweepRow> rows);

/// Columns: date,r,mu,sigma,lower,upper,hit.
std::string intervals_csv(std::string_view header, std::span<const IntervalRow> rows);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace mnl
