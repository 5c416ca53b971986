#include "specmarket/agents.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "path_kernel.hpp"
#include "specmarket/errors.hpp"

namespace specmarket {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fraction_buying_I(const std::vector<Trader>& traders, double rho_max) {
    if (traders.empty() || rho_max == kInf) {
        return 0.0;
    }
    std::size_t buyers = 0;
    for (const Trader& tr : traders) {
        buyers += unit_demand(tr.forecast, tr.rho_quantile * rho_max) > 0 ? 1 : 0;
    }
    return static_cast<double>(buyers) / static_cast<double>(traders.size());
}

struct TypeIIClearing {
    double r;
    double fraction;
};

// Type II traders buy while p <= v^i / (1 + rho^i). Find the return at which
// r = base + slope * k(p) / N, p = (1 + r) p_prev, with k(p) the number of
// buyers at p. k is nonincreasing in p so the crossing is unique.
TypeIIClearing clear_type_II(std::vector<double>& reservation, double base, double slope,
                             double p_prev) {
    const std::size_t n = reservation.size();
    if (n == 0) {
        return {base, 0.0};
    }
    std::sort(reservation.begin(), reservation.end(), std::greater<>());
    auto price_at = [&](std::size_t k) {
        return p_prev * (1.0 + base + slope * static_cast<double>(k) / static_cast<double>(n));
    };
    // Largest k with reservation[k-1] >= price_at(k); k = 0 always qualifies.
    std::size_t lo = 0;
    std::size_t hi = n;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (reservation[mid - 1] >= price_at(mid)) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    const std::size_t k = lo;
    double price = price_at(k);
    if (k < n && reservation[k] >= price) {
        // The next trader is marginal: the price settles at its reservation.
        price = reservation[k];
    }
    return {price / p_prev - 1.0, static_cast<double>(k) / static_cast<double>(n)};
}

} // namespace

double TraderPopulation::share_I() const noexcept {
    const auto total = static_cast<double>(type_I.size() + type_II.size());
    return total > 0.0 ? static_cast<double>(type_I.size()) / total : 0.0;
}

double TraderPopulation::share_II() const noexcept {
    const auto total = static_cast<double>(type_I.size() + type_II.size());
    return total > 0.0 ? static_cast<double>(type_II.size()) / total : 0.0;
}

void TraderPopulation::validate() const {
    if (type_I.empty() && type_II.empty()) {
        throw ValidationError("population: at least one trader required");
    }
    auto check = [](const std::vector<Trader>& v, const char* type) {
        for (const Trader& tr : v) {
            if (!(tr.rho_quantile >= 0.0 && tr.rho_quantile <= 1.0)) {
                throw ValidationError(std::string("population: ") + type +
                                      " threshold quantile outside [0, 1]");
            }
            if (!(tr.mu >= 0.0 && tr.mu <= 1.0)) {
                throw ValidationError(std::string("population: ") + type + " memory outside [0, 1]");
            }
            if (!std::isfinite(tr.forecast) || !std::isfinite(tr.dividend_forecast) ||
                !std::isfinite(tr.value_forecast)) {
                throw ValidationError(std::string("population: ") + type + " forecast not finite");
            }
        }
    };
    check(type_I, "type I");
    check(type_II, "type II");
}

TraderPopulation make_population(std::size_t n_I, std::size_t n_II, const ModelParams& params,
                                 std::uint64_t seed) {
    Engine eng = make_engine(seed, Stream::traders);
    TraderPopulation pop;
    pop.type_I.reserve(n_I);
    pop.type_II.reserve(n_II);
    for (std::size_t i = 0; i < n_I; ++i) {
        pop.type_I.push_back({uniform01(eng), params.mu_I, params.r1e, 0.0, 0.0});
    }
    for (std::size_t i = 0; i < n_II; ++i) {
        pop.type_II.push_back({uniform01(eng), params.mu_II, 0.0, params.de0, params.v0});
    }
    return pop;
}

double implied_rho_max(double gamma, double share, double weight) noexcept {
    if (weight <= 0.0) {
        return kInf;
    }
    return 2.0 * gamma * share / weight;
}

int unit_demand(double anticipated, double threshold) noexcept {
    return anticipated >= threshold ? 1 : -1;
}

double normalized_excess_demand(std::span<const int> signs) {
    if (signs.empty()) {
        throw ValidationError("normalized_excess_demand: no traders");
    }
    const long sum = std::accumulate(signs.begin(), signs.end(), 0L);
    return static_cast<double>(sum) / static_cast<double>(signs.size());
}

double threshold_cdf(double x, double rho_max) noexcept {
    if (rho_max == kInf || x <= 0.0) {
        return 0.0;
    }
    return std::min(1.0, x / rho_max);
}

AgentPath simulate_agents(const ModelParams& params, const TraderPopulation& population,
                          std::uint64_t seed) {
    params.validate();
    population.validate();

    const auto T = static_cast<std::size_t>(params.T);
    AgentPath out{SimulationPath(T), std::vector<double>(T), std::vector<double>(T),
                  std::vector<double>(T)};
    SimulationPath& path = out.path;
    path.p0 = params.p0;
    path.seed = seed;

    std::vector<Trader> type_I = population.type_I;
    std::vector<Trader> type_II = population.type_II;
    const double share_I = population.share_I();
    const double share_II = population.share_II();
    std::vector<double> reservation(type_II.size());

    detail::ShockSource shocks(seed);
    detail::PathState st{params.p0, 0.0, params.d0, params.de0, params.v0, params.r1e};

    for (std::size_t i = 0; i < T; ++i) {
        const detail::Shocks s = shocks.draw(params, st.d);
        const double d_prev = st.d;
        const double r_prev = st.r;
        const double p_prev = st.p;
        st.d = s.dividend;

        double sum_r = 0.0;
        for (Trader& tr : type_I) {
            tr.forecast = adaptive_update(tr.forecast, r_prev, tr.mu, s.eps_I, s.news);
            sum_r += tr.forecast;
        }
        double sum_d = 0.0;
        double sum_v = 0.0;
        for (Trader& tr : type_II) {
            tr.dividend_forecast = adaptive_update(tr.dividend_forecast, d_prev, tr.mu, s.eps_II, s.news);
            tr.value_forecast = fundamental_update(tr.value_forecast, params.rho, tr.dividend_forecast);
            sum_d += tr.dividend_forecast;
            sum_v += tr.value_forecast;
        }
        st.r_e = type_I.empty() ? 0.0 : sum_r / static_cast<double>(type_I.size());
        st.d_e = type_II.empty() ? 0.0 : sum_d / static_cast<double>(type_II.size());
        st.v_e = type_II.empty() ? p_prev : sum_v / static_cast<double>(type_II.size());

        const double rho_max_I = implied_rho_max(params.gamma, share_I, s.n_I);
        const double rho_max_II = implied_rho_max(params.gamma, share_II, s.n_II);
        const double frac_I = fraction_buying_I(type_I, rho_max_I);
        const double base = 2.0 * params.gamma * share_I * frac_I - params.gamma;
        const double slope = 2.0 * params.gamma * share_II;

        double r = base;
        double frac_II = 0.0;
        if (!type_II.empty() && rho_max_II != kInf) {
            if (params.mispricing == MispricingTiming::implicit) {
                for (std::size_t j = 0; j < type_II.size(); ++j) {
                    reservation[j] = type_II[j].value_forecast /
                                     (1.0 + type_II[j].rho_quantile * rho_max_II);
                }
                const TypeIIClearing c = clear_type_II(reservation, base, slope, p_prev);
                r = c.r;
                frac_II = c.fraction;
            } else {
                std::size_t buyers = 0;
                for (const Trader& tr : type_II) {
                    const double anticipated = (tr.value_forecast - p_prev) / p_prev;
                    buyers += unit_demand(anticipated, tr.rho_quantile * rho_max_II) > 0 ? 1 : 0;
                }
                frac_II = static_cast<double>(buyers) / static_cast<double>(type_II.size());
                r = base + slope * frac_II;
            }
        }

        const PriceStep ps = price_update(p_prev, r, params.price_floor());
        st.r = ps.clamped ? ps.price / p_prev - 1.0 : r;
        st.p = ps.price;

        detail::record_or_throw(path, i, st);
        path.n_I[i] = s.n_I;
        path.n_II[i] = s.n_II;
        path.news[i] = s.news ? 1 : 0;
        path.clamped[i] = ps.clamped ? 1 : 0;
        out.excess_demand[i] = 2.0 * share_I * frac_I + 2.0 * share_II * frac_II - 1.0;
        out.buy_fraction_I[i] = frac_I;
        out.buy_fraction_II[i] = frac_II;
    }
    return out;
}

} // namespace specmarket
