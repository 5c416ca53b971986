#include "specmarket/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "path_kernel.hpp"
#include "specmarket/errors.hpp"

namespace specmarket {

namespace {

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) {
        throw ValidationError(std::string(field) + ": " + what);
    }
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

std::string_view to_string(DividendMode mode) noexcept {
    return mode == DividendMode::random_walk ? "random-walk" : "discrete-uniform";
}

std::string_view to_string(MispricingTiming timing) noexcept {
    return timing == MispricingTiming::implicit ? "implicit" : "lagged";
}

std::optional<DividendMode> parse_dividend_mode(std::string_view text) noexcept {
    if (text == "random-walk") return DividendMode::random_walk;
    if (text == "discrete-uniform") return DividendMode::discrete_uniform;
    return std::nullopt;
}

std::optional<MispricingTiming> parse_mispricing(std::string_view text) noexcept {
    if (text == "implicit") return MispricingTiming::implicit;
    if (text == "lagged") return MispricingTiming::lagged;
    return std::nullopt;
}

void ModelParams::validate() const {
    require(finite(rho), "rho", "must be finite");
    require(finite(gamma) && gamma >= 0.0, "gamma", "must be >= 0");
    require(mu_I >= 0.0 && mu_I <= 1.0, "mu_I", "must lie in [0, 1]");
    require(mu_II >= 0.0 && mu_II <= 1.0, "mu_II", "must lie in [0, 1]");
    require(finite(mean_nI) && mean_nI >= 0.0, "mean_nI", "must be >= 0");
    require(finite(mean_nII) && mean_nII >= 0.0, "mean_nII", "must be >= 0");
    require(finite(std_eps_d) && std_eps_d >= 0.0, "std_eps_d", "must be >= 0");
    require(finite(std_eps_I) && std_eps_I >= 0.0, "std_eps_I", "must be >= 0");
    require(finite(mean_eps_I), "mean_eps_I", "must be finite");
    require(finite(std_eps_II) && std_eps_II >= 0.0, "std_eps_II", "must be >= 0");
    require(prob_news >= 0.0 && prob_news <= 1.0, "prob_news", "must lie in [0, 1]");
    require(T >= 1, "T", "must be >= 1");
    require(finite(p0) && p0 > 0.0, "p0", "must be > 0");
    require(finite(v0), "v0", "must be finite");
    require(finite(d0) && d0 >= 0.0, "d0", "must be >= 0");
    require(finite(de0), "de0", "must be finite");
    require(finite(r1e), "r1e", "must be finite");
    require(finite(price_floor_ratio) && price_floor_ratio > 0.0 && price_floor_ratio < 1.0,
            "price_floor_ratio", "must lie in (0, 1)");
    if (dividend_mode == DividendMode::discrete_uniform) {
        require(!dividend_set.empty(), "dividend_set", "must not be empty in discrete-uniform mode");
        for (double x : dividend_set) {
            require(finite(x) && x >= 0.0, "dividend_set", "entries must be finite and >= 0");
        }
    }
}

ModelParams table1_general() { return ModelParams{}; }

ModelParams table1_speculative() {
    ModelParams p;
    p.rho = 0.0;
    p.gamma = 1e-4;
    p.mu_I = 0.0;
    p.mean_nI = 0.55;
    p.mean_nII = 0.0;
    p.std_eps_d = 0.0;
    p.std_eps_I = 0.01;
    p.mean_eps_I = 1e-4;
    p.std_eps_II = 0.0;
    p.prob_news = 1.0;
    p.T = 10000;
    return p;
}

ModelParams declining_value(std::int64_t T, ModelParams base) {
    base.T = T;
    base.dividend_mode = DividendMode::discrete_uniform;
    base.dividend_set = {0.0, 4.0, 8.0, 20.0};
    base.rho = 0.0;
    const double mean_d = std::accumulate(base.dividend_set.begin(), base.dividend_set.end(), 0.0) /
                          static_cast<double>(base.dividend_set.size());
    base.d0 = mean_d;
    base.de0 = mean_d;
    base.v0 = static_cast<double>(T) * mean_d;
    base.p0 = base.v0 / 2.0;
    return base;
}

SimulationPath::SimulationPath(std::size_t periods)
    : p(periods), r(periods), d(periods), d_e(periods), v_e(periods), r_e(periods),
      n_I(periods), n_II(periods), news(periods), clamped(periods) {}

std::size_t SimulationPath::clamp_count() const noexcept {
    return static_cast<std::size_t>(std::count(clamped.begin(), clamped.end(), std::uint8_t{1}));
}

double random_walk_dividend(double d_prev, double shock) {
    if (!(d_prev >= 0.0)) {
        throw ValidationError("random_walk_dividend: previous dividend must be >= 0");
    }
    return std::max(0.0, d_prev + shock);
}

double discrete_dividend(std::span<const double> set, Engine& eng) {
    if (set.empty()) {
        throw ValidationError("discrete_dividend: empty dividend set");
    }
    const auto k = static_cast<std::size_t>(uniform01(eng) * static_cast<double>(set.size()));
    return set[std::min(k, set.size() - 1)];
}

double adaptive_update(double prev, double observed, double mu, double eps, bool news) {
    if (!(mu >= 0.0 && mu <= 1.0)) {
        throw ValidationError("adaptive_update: memory must lie in [0, 1]");
    }
    return mu * prev + (1.0 - mu) * observed + (news ? eps : 0.0);
}

double fundamental_update(double v_prev, double rho, double d_e) noexcept {
    return (1.0 + rho) * v_prev - d_e;
}

double market_return(double n_I, double r_e, double n_II, double v_e, double p_ref, double gamma) {
    if (!(p_ref > 0.0)) {
        throw ValidationError("market_return: reference price must be > 0");
    }
    return n_I * r_e + n_II * (v_e - p_ref) / p_ref - gamma;
}

std::optional<double> implicit_market_return(double n_I, double r_e, double n_II, double v_e,
                                             double p_prev, double gamma) {
    if (!(p_prev > 0.0)) {
        throw ValidationError("implicit_market_return: previous price must be > 0");
    }
    const double drift = n_I * r_e - gamma;
    if (n_II == 0.0) {
        return drift > -1.0 ? std::optional<double>(drift) : std::nullopt;
    }
    // r^2 + q r - k = 0 with k the lagged-price return.
    const double k = drift + n_II * (v_e - p_prev) / p_prev;
    const double q = 1.0 - drift + n_II;
    const double disc = q * q + 4.0 * k;
    if (!(disc >= 0.0)) {
        return std::nullopt;
    }
    const double root = std::sqrt(disc);
    const double r = q > 0.0 ? 2.0 * k / (q + root) : 0.5 * (root - q);
    if (!(r > -1.0) || !std::isfinite(r)) {
        return std::nullopt;
    }
    return r;
}

PriceStep price_update(double p_prev, double r, double floor) {
    const double next = (1.0 + r) * p_prev;
    if (std::isnan(next) || next < floor) {
        return {floor, true};
    }
    return {next, false};
}

TradingWeights liquidity_weights(const LiquidityAccount& account, double gamma) {
    const double total = account.L_I + account.L_II;
    if (!(total > 0.0)) {
        throw ValidationError("liquidity_weights: total liquidity must be > 0");
    }
    if (!(account.rho_max_I > 0.0) || !(account.rho_max_II > 0.0)) {
        throw ValidationError("liquidity_weights: rho_max must be > 0 for both types");
    }
    return {2.0 * (gamma / account.rho_max_I) * account.L_I / total,
            2.0 * (gamma / account.rho_max_II) * account.L_II / total};
}

CashLiquidity cash_and_liquidity(double C0, double S0, double r_f, std::span<const double> dividends) {
    if (!(C0 >= 0.0) || !(S0 >= 0.0)) {
        throw ValidationError("cash_and_liquidity: C0 and S0 must be >= 0");
    }
    CashLiquidity out;
    out.C.reserve(dividends.size() + 1);
    out.L.reserve(dividends.size() + 1);
    double cash = C0;
    out.C.push_back(cash);
    out.L.push_back(S0 + cash);
    for (double d : dividends) {
        cash = (1.0 + r_f) * cash + S0 * d;
        out.C.push_back(cash);
        out.L.push_back(S0 + cash);
    }
    return out;
}

SimulationPath simulate_linear(const ModelParams& params, std::uint64_t seed) {
    params.validate();
    return detail::run_path(params, seed, detail::PathKind::linear);
}

namespace detail {

ShockSource::ShockSource(std::uint64_t seed)
    : dividends_(make_engine(seed, Stream::dividends)),
      news_(make_engine(seed, Stream::news)),
      weight_I_(make_engine(seed, Stream::weight_I)),
      weight_II_(make_engine(seed, Stream::weight_II)),
      shock_I_(make_engine(seed, Stream::shock_I)),
      shock_II_(make_engine(seed, Stream::shock_II)) {}

Shocks ShockSource::draw(const ModelParams& prm, double d_prev) {
    Shocks s;
    s.news = uniform01(news_) < prm.prob_news;
    if (prm.dividend_mode == DividendMode::random_walk) {
        s.dividend = random_walk_dividend(d_prev, normal(dividends_, 0.0, prm.std_eps_d));
    } else {
        s.dividend = discrete_dividend(prm.dividend_set, dividends_);
    }
    s.eps_I = normal(shock_I_, prm.mean_eps_I, prm.std_eps_I);
    s.eps_II = normal(shock_II_, 0.0, prm.std_eps_II);
    s.n_I = exponential_mean(weight_I_, prm.mean_nI);
    s.n_II = exponential_mean(weight_II_, prm.mean_nII);
    return s;
}

void record_or_throw(SimulationPath& path, std::size_t i, const PathState& st) {
    if (!std::isfinite(st.p) || !std::isfinite(st.r) || !std::isfinite(st.v_e) ||
        !std::isfinite(st.r_e) || !std::isfinite(st.d_e)) {
        throw DiagnosticError("simulation: non-finite state at t=" + std::to_string(i + 1) +
                              " (seed " + std::to_string(path.seed) + ")");
    }
    path.p[i] = st.p;
    path.r[i] = st.r;
    path.d[i] = st.d;
    path.d_e[i] = st.d_e;
    path.v_e[i] = st.v_e;
    path.r_e[i] = st.r_e;
}

ReturnStep linear_return(const ModelParams& prm, double n_I, double r_e, double n_II, double v_e,
                         double p_prev) {
    if (prm.mispricing == MispricingTiming::lagged) {
        const double r = market_return(n_I, r_e, n_II, v_e, p_prev, prm.gamma);
        const PriceStep ps = price_update(p_prev, r, prm.price_floor());
        return {ps.clamped ? ps.price / p_prev - 1.0 : r, ps.price, ps.clamped};
    }
    if (const auto r = implicit_market_return(n_I, r_e, n_II, v_e, p_prev, prm.gamma)) {
        const PriceStep ps = price_update(p_prev, *r, prm.price_floor());
        return {ps.clamped ? ps.price / p_prev - 1.0 : *r, ps.price, ps.clamped};
    }
    const double floor = prm.price_floor();
    return {floor / p_prev - 1.0, floor, true};
}

SimulationPath run_path(const ModelParams& prm, std::uint64_t seed, PathKind kind) {
    const auto T = static_cast<std::size_t>(prm.T);
    SimulationPath path(T);
    path.p0 = prm.p0;
    path.seed = seed;

    ShockSource shocks(seed);
    PathState st{prm.p0, 0.0, prm.d0, prm.de0, prm.v0, prm.r1e};
    if (kind == PathKind::speculative) {
        st.v_e = st.p;
    }

    for (std::size_t i = 0; i < T; ++i) {
        const Shocks s = shocks.draw(prm, st.d);
        const double d_prev = st.d;
        const double p_prev = st.p;

        st.r_e = adaptive_update(st.r_e, st.r, prm.mu_I, s.eps_I, s.news);
        ReturnStep step{};
        if (kind == PathKind::speculative) {
            st.d = 0.0;
            st.d_e = 0.0;
            step = linear_return(prm, s.n_I, st.r_e, 0.0, p_prev, p_prev);
            st.v_e = step.price;
        } else {
            st.d = s.dividend;
            st.d_e = adaptive_update(st.d_e, d_prev, prm.mu_II, s.eps_II, s.news);
            st.v_e = fundamental_update(st.v_e, prm.rho, st.d_e);
            step = linear_return(prm, s.n_I, st.r_e, s.n_II, st.v_e, p_prev);
        }
        st.r = step.r;
        st.p = step.price;

        record_or_throw(path, i, st);
        path.n_I[i] = s.n_I;
        path.n_II[i] = kind == PathKind::speculative ? 0.0 : s.n_II;
        path.news[i] = s.news ? 1 : 0;
        path.clamped[i] = step.clamped ? 1 : 0;
    }
    return path;
}

} // namespace detail

} // namespace specmarket
