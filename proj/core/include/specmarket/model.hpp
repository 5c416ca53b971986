#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "specmarket/random.hpp"

namespace specmarket {

enum class DividendMode { random_walk, discrete_uniform };

/// Where the value investors' mispricing (v - p)/p is evaluated.
///  - implicit: at the current price p_t; the step equation is a quadratic
///    in the return with a closed-form positive-price root.
///  - lagged: at p_{t-1}, a plain explicit recursion.
enum class MispricingTiming { implicit, lagged };

std::string_view to_string(DividendMode mode) noexcept;
std::string_view to_string(MispricingTiming timing) noexcept;
std::optional<DividendMode> parse_dividend_mode(std::string_view text) noexcept;
std::optional<MispricingTiming> parse_mispricing(std::string_view text) noexcept;

/// Exogenous constants of the linear model plus initial conditions.
/// Defaults are the general-model column of the reference parameter table.
struct ModelParams {
    double rho = 1.64e-4;      // per-period discount rate of value investors
    double gamma = 1e-4;       // price impact
    double mu_I = 0.99;        // memory, speculators
    double mu_II = 1.0;        // memory, value investors
    double mean_nI = 0.2;      // mean of the exponential weight n^I
    double mean_nII = 0.8;     // mean of the exponential weight n^II
    double std_eps_d = 0.1;    // dividend random-walk shock
    double std_eps_I = 0.01;   // news impact on expected return
    double mean_eps_I = 0.0;
    double std_eps_II = 0.1;   // news impact on expected dividend
    double prob_news = 0.2;
    std::int64_t T = 10000;
    double p0 = 1e5;
    double v0 = 1e5;
    double d0 = 10.0;
    double de0 = 10.0;
    double r1e = 0.0;
    DividendMode dividend_mode = DividendMode::random_walk;
    std::vector<double> dividend_set{0.0, 4.0, 8.0, 20.0};
    double price_floor_ratio = 1e-9;
    MispricingTiming mispricing = MispricingTiming::implicit;

    /// Throws ValidationError naming the first offending field.
    void validate() const;

    double price_floor() const noexcept { return price_floor_ratio * p0; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// General-model column of the reference table.
ModelParams table1_general();

/// Speculation-only column: mean n^I = 0.55, news every period, zero memory.
ModelParams table1_speculative();

/// Lab-style declining fundamental value: dividends uniform on {0,4,8,20},
/// rho = 0, v0 = T * E(d) and p0 = v0 / 2. Other values from `base`.
ModelParams declining_value(std::int64_t T, ModelParams base = table1_general());

/// Aligned per-period series of one seeded run. Index i holds period t = i+1;
/// the initial price p0 dates period 0.
struct SimulationPath {
    std::vector<double> p;
    std::vector<double> r;
    std::vector<double> d;
    std::vector<double> d_e;
    std::vector<double> v_e;
    std::vector<double> r_e;
    std::vector<double> n_I;
    std::vector<double> n_II;
    std::vector<std::uint8_t> news;
    std::vector<std::uint8_t> clamped;  // price floor bound at this period
    double p0 = 0.0;
    std::uint64_t seed = 0;

    SimulationPath() = default;
    explicit SimulationPath(std::size_t periods);

    std::size_t size() const noexcept { return p.size(); }
    double price_before(std::size_t i) const noexcept { return i == 0 ? p0 : p[i - 1]; }
    std::size_t clamp_count() const noexcept;

    friend bool operator==(const SimulationPath&, const SimulationPath&) = default;
};

// ---------------------------------------------------------------------------
// Single-step recursions

/// max{0, d_prev + shock}.
double random_walk_dividend(double d_prev, double shock);

/// Uniform draw from `set`; the previous dividend plays no role.
double discrete_dividend(std::span<const double> set, Engine& eng);

/// News-corrected adaptive expectation: mu*prev + (1-mu)*observed + eps*news.
double adaptive_update(double prev, double observed, double mu, double eps, bool news);

/// (1 + rho) * v_prev - d_e. Negative results are returned as is.
double fundamental_update(double v_prev, double rho, double d_e) noexcept;

/// Linear return law evaluated at a given reference price:
/// n_I * r_e + n_II * (v_e - p_ref) / p_ref - gamma.
double market_return(double n_I, double r_e, double n_II, double v_e, double p_ref, double gamma);

/// Return r solving r = n_I r_e + n_II (v_e - p)/p - gamma with p = (1+r) p_prev.
/// Picks the larger root; nullopt when no root gives a positive price.
std::optional<double> implicit_market_return(double n_I, double r_e, double n_II, double v_e,
                                             double p_prev, double gamma);

struct PriceStep {
    double price;
    bool clamped;
};

/// max{floor, (1 + r) p_prev}, flagging when the floor binds.
PriceStep price_update(double p_prev, double r, double floor);

// ---------------------------------------------------------------------------
// Liquidity accounting (static; not fed back into the weight draws)

struct LiquidityAccount {
    double C0 = 0.0;
    double S0 = 0.0;
    double r_f = 0.0;
    std::vector<double> C;  // t = 0..T
    std::vector<double> L;  // t = 0..T
    double rho_max_I = 0.0;
    double rho_max_II = 0.0;
    double L_I = 0.0;
    double L_II = 0.0;
};

struct TradingWeights {
    double n_I;
    double n_II;
};

/// n^J = 2 (gamma / rho_max^J) L^J / (L^I + L^II).
TradingWeights liquidity_weights(const LiquidityAccount& account, double gamma);

struct CashLiquidity {
    std::vector<double> C;
    std::vector<double> L;
};

/// Cash spending power and liquidity for t = 0..T given dividends d_1..d_T.
CashLiquidity cash_and_liquidity(double C0, double S0, double r_f, std::span<const double> dividends);

// ---------------------------------------------------------------------------
// Path simulators

/// Linear general model. Deterministic in (params, seed).
SimulationPath simulate_linear(const ModelParams& params, std::uint64_t seed);

} // namespace specmarket
