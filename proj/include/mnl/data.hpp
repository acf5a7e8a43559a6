#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mnl/numerics.hpp"

namespace mnl {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date `YYYY-MM-DD`. Returns false on
/// anything else, including impossible dates.
bool parse_date(std::string_view text, Date& out);
std::string format_date(const Date& d);

struct PriceRow {
    Date date;
    double adj_close = 0.0;
};

/// Dividend-adjusted closing prices, strictly increasing by date, all > 0.
struct PriceSeries {
    std::vector<PriceRow> rows;

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
};

/// r_t = ln(S_t / S_{t-1}), each value dated by the later session.
struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] ReturnSeries slice(std::size_t first, std::size_t count) const;
};

/// Reads a `date,adj_close` CSV. Rows are sorted by date after parsing.
PriceSeries load_prices(const std::filesystem::path& path);
PriceSeries parse_prices(std::string_view csv_text);
void write_prices(const std::filesystem::path& path, const PriceSeries& prices);

ReturnSeries log_returns(const PriceSeries& prices);

struct SplitSpec {
    std::size_t n_train = 0;
};

struct TrainTestSplit {
    ReturnSeries train;
    ReturnSeries test;
};

TrainTestSplit split(const ReturnSeries& returns, SplitSpec spec);

/// One supervised pair: `input` holds w consecutive values earliest to latest
/// and `target` is the value right after the last of them.
struct WindowPair {
    Vec64 input;
    double target = 0.0;
    /// Index in the source series of input[0]; the target sits at offset + w.
    std::size_t offset = 0;
};

struct WindowedSet {
    std::size_t window = 0;
    std::vector<WindowPair> pairs;

    [[nodiscard]] std::size_t size() const noexcept { return pairs.size(); }
    [[nodiscard]] bool empty() const noexcept { return pairs.empty(); }
};

/// Sliding windows of length w stepping by one; yields values.size() - w pairs.
WindowedSet build_windows(std::span<const double> values, std::size_t w);

}  // namespace mnl
