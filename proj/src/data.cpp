#include "mnl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mnl/errors.hpp"

namespace mnl {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) {
        return false;
    }
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) {
        return false;
    }
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace

bool parse_date(std::string_view text, Date& out) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return false;
    }
    unsigned y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d)) {
        return false;
    }
    const Date date{std::chrono::year{static_cast<int>(y)}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) {
        return false;
    }
    out = date;
    return true;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

ReturnSeries ReturnSeries::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) {
        throw ParameterError("ReturnSeries::slice: range exceeds series length");
    }
    ReturnSeries out;
    out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(first),
                     dates.begin() + static_cast<std::ptrdiff_t>(first + count));
    out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(first),
                      values.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
}

PriceSeries parse_prices(std::string_view text) {
    PriceSeries series;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        line = trim(line);
        if (!saw_header) {
            if (line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") {
                line.remove_prefix(3);
            }
            if (line != "date,adj_close") {
                throw DataError(DataErrorKind::bad_header, "expected header 'date,adj_close' on line 1", line_no);
            }
            saw_header = true;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        auto bad_row = [&](const std::string& why) {
            return DataError(DataErrorKind::malformed_row, "line " + std::to_string(line_no) + ": " + why, line_no);
        };
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            throw bad_row("expected exactly two fields");
        }
        PriceRow row;
        if (!parse_date(trim(line.substr(0, comma)), row.date)) {
            throw bad_row("invalid date '" + std::string(line.substr(0, comma)) + "'");
        }
        const std::string_view price_text = trim(line.substr(comma + 1));
        if (!parse_double(price_text, row.adj_close) || !std::isfinite(row.adj_close)) {
            throw bad_row("non-numeric price '" + std::string(price_text) + "'");
        }
        if (row.adj_close <= 0.0) {
            throw bad_row("price must be positive, got " + std::string(price_text));
        }
        series.rows.push_back(row);
    }
    if (!saw_header) {
        throw DataError(DataErrorKind::bad_header, "file is empty, expected header 'date,adj_close'");
    }
    if (series.rows.empty()) {
        throw DataError(DataErrorKind::empty_series, "no price rows after header");
    }
    std::stable_sort(series.rows.begin(), series.rows.end(),
                     [](const PriceRow& a, const PriceRow& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.rows.size(); ++i) {
        if (series.rows[i].date == series.rows[i - 1].date) {
            throw DataError(DataErrorKind::duplicate_date, "date " + format_date(series.rows[i].date) +
                                                               " appears more than once");
        }
    }
    return series;
}

PriceSeries load_prices(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(DataErrorKind::missing_file, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    return parse_prices(text);
}

void write_prices(const std::filesystem::path& path, const PriceSeries& prices) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(DataErrorKind::missing_file, "cannot write '" + path.string() + "'");
    }
    out << "date,adj_close\n";
    char buf[64];
    for (const auto& row : prices.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g", row.adj_close);
        out << format_date(row.date) << ',' << buf << '\n';
    }
}

ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.size() < 2) {
        throw DataError(DataErrorKind::insufficient_data, "need at least 2 prices to form a return, got " +
                                                              std::to_string(prices.size()));
    }
    ReturnSeries out;
    out.dates.reserve(prices.size() - 1);
    out.values.reserve(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) {
        out.dates.push_back(prices.rows[t].date);
        out.values.push_back(std::log(prices.rows[t].adj_close / prices.rows[t - 1].adj_close));
    }
    return out;
}

TrainTestSplit split(const ReturnSeries& returns, SplitSpec spec) {
    if (spec.n_train == 0 || spec.n_train >= returns.size()) {
        throw ParameterError("split: n_train must lie in (0, " + std::to_string(returns.size()) + "), got " +
                             std::to_string(spec.n_train));
    }
    return {returns.slice(0, spec.n_train), returns.slice(spec.n_train, returns.size() - spec.n_train)};
}

WindowedSet build_windows(std::span<const double> values, std::size_t w) {
    if (w == 0) {
        throw ParameterError("build_windows: window must be >= 1");
    }
    if (values.size() <= w) {
        throw DataError(DataErrorKind::insufficient_data, "series of length " + std::to_string(values.size()) +
                                                              " is too short for window " + std::to_string(w));
    }
    WindowedSet set;
    set.window = w;
    set.pairs.reserve(values.size() - w);
    for (std::size_t k = 0; k + w < values.size(); ++k) {
        WindowPair p;
        p.input.assign(values.begin() + static_cast<std::ptrdiff_t>(k),
                       values.begin() + static_cast<std::ptrdiff_t>(k + w));
        p.target = values[k + w];
        p.offset = k;
        set.pairs.push_back(std::move(p));
    }
    return set;
}

}  // namespace mnl
