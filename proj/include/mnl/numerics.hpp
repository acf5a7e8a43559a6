#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mnl {

using Vec64 = std::vector<double>;

/// Dense row-major matrix of doubles.
class Mat64 {
public:
    Mat64() = default;
    Mat64(std::size_t rows, std::size_t cols, double fill = 0.0);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    friend bool operator==(const Mat64&, const Mat64&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double sigm(double x) noexcept;
double tanh_act(double x) noexcept;
double relu(double x) noexcept;

Vec64 pointwise_mul(std::span<const double> a, std::span<const double> b);
Vec64 add(std::span<const double> a, std::span<const double> b);
Vec64 matvec(const Mat64& m, std::span<const double> x);
/// mᵀ·x, used by the backward passes.
Vec64 matvec_transposed(const Mat64& m, std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> v) noexcept;

/// SplitMix64 finalizer. Used for seed derivation everywhere a stream is
/// split, so derived seeds are platform independent.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of sub-stream `index` of `seed`: splitmix64(seed ^ splitmix64(index + 1)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Seeded generator. The engine is std::mt19937_64, whose output sequence is
/// fixed by the standard; doubles are built from the top 53 bits so the draw
/// sequence is identical on every conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform01();
    /// Uniform on [lo, hi].
    double uniform(double lo, double hi);
    /// Standard normal via Box-Muller (no cached second value).
    double normal();

    /// Independent generator for sub-stream `index`; does not advance *this.
    [[nodiscard]] Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Glorot-Bengio uniform: every element from U[-L, L], L = sqrt(6/(fan_in+fan_out)).
/// Elements are drawn in row-major order.
Mat64 glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

double glorot_limit(std::size_t fan_in, std::size_t fan_out);

}  // namespace mnl
