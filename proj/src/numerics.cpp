#include "mnl/numerics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mnl/errors.hpp"

namespace mnl {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b, const char* op) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(op) + ": length " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
}

}  // namespace

Mat64::Mat64(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

double sigm(double x) noexcept {
    // Branches keep exp() from overflowing for large |x|.
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double tanh_act(double x) noexcept { return std::tanh(x); }

double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

Vec64 pointwise_mul(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b, "pointwise_mul");
    Vec64 out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        out[j] = a[j] * b[j];
    }
    return out;
}

Vec64 add(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b, "add");
    Vec64 out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        out[j] = a[j] + b[j];
    }
    return out;
}

Vec64 matvec(const Mat64& m, std::span<const double> x) {
    if (m.cols() != x.size()) {
        throw DimensionError("matvec: matrix has " + std::to_string(m.cols()) + " columns, vector length " +
                             std::to_string(x.size()));
    }
    Vec64 out(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            acc += m(r, c) * x[c];
        }
        out[r] = acc;
    }
    return out;
}

Vec64 matvec_transposed(const Mat64& m, std::span<const double> x) {
    if (m.rows() != x.size()) {
        throw DimensionError("matvec_transposed: matrix has " + std::to_string(m.rows()) +
                             " rows, vector length " + std::to_string(x.size()));
    }
    Vec64 out(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out[c] += m(r, c) * x[r];
        }
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b, "dot");
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        acc += a[j] * b[j];
    }
    return acc;
}

bool all_finite(std::span<const double> v) noexcept {
    for (double x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(seed ^ splitmix64(index + 1));
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) {
    // (k / (2^53 - 1)) reaches both endpoints.
    const double u = static_cast<double>(engine_() >> 11) / 9007199254740991.0;
    return lo + (hi - lo) * u;
}

double Rng::normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) {
        u1 = uniform01();
    }
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
    if (fan_in == 0 || fan_out == 0) {
        throw ParameterError("glorot_uniform: fan_in and fan_out must be >= 1");
    }
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Mat64 glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = glorot_limit(fan_in, fan_out);
    Mat64 m(fan_out, fan_in);
    for (double& v : m.values()) {
        v = rng.uniform(-limit, limit);
    }
    return m;
}

}  // namespace mnl
