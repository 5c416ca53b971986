#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "specmarket/model.hpp"

namespace specmarket {

/// One trader. The minimum acceptable return is stored as its quantile
/// `rho_quantile` in [0, 1): rho_i = rho_quantile * rho_max for its type.
struct Trader {
    double rho_quantile = 0.0;
    double mu = 0.0;
    double forecast = 0.0;        // Type I: expected return r^i
    double dividend_forecast = 0.0;  // Type II: d^i
    double value_forecast = 0.0;     // Type II: v^i
};

struct TraderPopulation {
    std::vector<Trader> type_I;
    std::vector<Trader> type_II;

    std::size_t count_I() const noexcept { return type_I.size(); }
    std::size_t count_II() const noexcept { return type_II.size(); }

    /// Liquidity share L^J / L of each type; every trader is one unit.
    double share_I() const noexcept;
    double share_II() const noexcept;

    void validate() const;
};

/// Population with uniform threshold quantiles drawn from the `traders`
/// substream, memory from the model parameters and forecasts starting at
/// the model's initial conditions.
TraderPopulation make_population(std::size_t n_I, std::size_t n_II, const ModelParams& params,
                                 std::uint64_t seed);

/// Upper bound of the uniform threshold distribution of a type that makes the
/// aggregate weight equal `weight`: rho_max = 2 gamma share / weight.
/// Infinite when weight is 0.
double implied_rho_max(double gamma, double share, double weight) noexcept;

/// Signed unit demand: +1 when the anticipated return reaches the
/// threshold, -1 otherwise.
int unit_demand(double anticipated, double threshold) noexcept;

/// Z / L for a set of unit demands (mean of the signs).
double normalized_excess_demand(std::span<const int> signs);

/// Uniform threshold CDF x / rho_max clamped to [0, 1].
double threshold_cdf(double x, double rho_max) noexcept;

struct AgentPath {
    SimulationPath path;
    std::vector<double> excess_demand;  // Z_t / L_t
    std::vector<double> buy_fraction_I;
    std::vector<double> buy_fraction_II;
};

/// Agent-ensemble version of the general model. Shares its exogenous
/// draws (news, shocks, weights, dividends) with simulate_linear for the
/// same seed. Each period the type-J thresholds are rho_quantile * rho_max^J_t
/// with rho_max^J_t implied by that period's weight draw, so the mean-field
/// limit is the linear model wherever forecasts stay in [0, rho_max].
AgentPath simulate_agents(const ModelParams& params, const TraderPopulation& population,
                          std::uint64_t seed);

} // namespace specmarket
