#include "mnl/synthetic.hpp"

#include <cmath>

#include "mnl/errors.hpp"

namespace mnl {

namespace {

double standardized_innovation(Rng& rng, unsigned dof) {
    const double z = rng.normal();
    if (dof == 0) {
        return z;
    }
    double chi2 = 0.0;
    for (unsigned k = 0; k < dof; ++k) {
        const double g = rng.normal();
        chi2 += g * g;
    }
    const double t = z / std::sqrt(chi2 / dof);
    return t * std::sqrt((dof - 2.0) / dof);
}

}  // namespace

PriceSeries synthetic_garch_prices(const GarchSpec& spec, std::size_t n_prices) {
    if (spec.omega <= 0.0 || spec.alpha < 0.0 || spec.beta < 0.0 || spec.alpha + spec.beta >= 1.0) {
        throw ParameterError("synthetic_garch_prices: need omega > 0, alpha, beta >= 0, alpha + beta < 1");
    }
    if (spec.dof != 0 && spec.dof <= 2) {
        throw ParameterError("synthetic_garch_prices: Student-t dof must exceed 2 (or be 0 for normal)");
    }
    if (spec.initial_price <= 0.0) {
        throw ParameterError("synthetic_garch_prices: initial price must be positive");
    }
    Rng rng(spec.seed);
    PriceSeries out;
    out.rows.reserve(n_prices);

    std::chrono::sys_days day{std::chrono::year{1950} / 1 / 3};
    auto next_session = [&day] {
        do {
            day += std::chrono::days{1};
        } while (std::chrono::weekday{day} == std::chrono::Saturday || std::chrono::weekday{day} == std::chrono::Sunday);
    };

    double h = spec.omega / (1.0 - spec.alpha - spec.beta);
    double shock = 0.0;
    double price = spec.initial_price;
    for (std::size_t t = 0; t < n_prices; ++t) {
        if (t > 0) {
            h = spec.omega + spec.alpha * shock * shock + spec.beta * h;
            shock = std::sqrt(h) * standardized_innovation(rng, spec.dof);
            price *= std::exp(spec.drift + shock);
            next_session();
        }
        out.rows.push_back({Date{day}, price});
    }
    return out;
}

}  // namespace mnl
