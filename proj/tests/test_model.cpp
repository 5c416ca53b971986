#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "specmarket/errors.hpp"
#include "specmarket/kesten.hpp"
#include "specmarket/model.hpp"
#include "specmarket/random.hpp"

using namespace specmarket;

TEST_CASE("random-walk dividend") {
    CHECK(random_walk_dividend(10.0, 0.0) == 10.0);
    CHECK(random_walk_dividend(10.0, -11.0) == 0.0);
    CHECK(random_walk_dividend(10.0, 2.5) == 12.5);
    CHECK_THROWS_AS(random_walk_dividend(-1.0, 0.0), ValidationError);
}

TEST_CASE("discrete dividend draws from the set") {
    const std::vector<double> set{0.0, 4.0, 8.0, 20.0};
    Engine eng = make_engine(11, Stream::dividends);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double d = discrete_dividend(set, eng);
        REQUIRE((d == 0.0 || d == 4.0 || d == 8.0 || d == 20.0));
        sum += d;
    }
    CHECK(std::abs(sum / n - 8.0) < 0.1);
    CHECK_THROWS_AS(discrete_dividend(std::vector<double>{}, eng), ValidationError);
}

TEST_CASE("adaptive update") {
    CHECK(adaptive_update(0.02, 0.01, 1.0, 0.5, false) == 0.02);
    CHECK(adaptive_update(0.02, 0.01, 0.0, 0.003, true) == doctest::Approx(0.013).epsilon(1e-14));
    CHECK(adaptive_update(0.02, 0.01, 0.99, 0.0, false) == doctest::Approx(0.0199).epsilon(1e-14));
    CHECK(adaptive_update(0.3, 0.7, 0.0, 0.0, false) == 0.7);
    CHECK_THROWS_AS(adaptive_update(0.0, 0.0, 1.5, 0.0, false), ValidationError);
    CHECK_THROWS_AS(adaptive_update(0.0, 0.0, -0.1, 0.0, false), ValidationError);
}

TEST_CASE("iterated adaptive update equals the expanded sum") {
    Engine eng = make_engine(5, Stream::uniform);
    const std::size_t T = 1000;
    std::vector<double> obs(T);
    std::vector<double> eps(T);
    std::vector<int> news(T);
    for (std::size_t i = 0; i < T; ++i) {
        obs[i] = normal(eng, 0.0, 0.01);
        eps[i] = normal(eng, 0.0, 0.01);
        news[i] = uniform01(eng) < 0.3 ? 1 : 0;
    }
    for (double mu : {0.0, 0.5, 0.99}) {
        double x = 0.0;
        for (std::size_t t = 1; t <= T; ++t) {
            x = adaptive_update(x, obs[t - 1], mu, eps[t - 1], news[t - 1] == 1);
        }
        const double expected = oracle::expanded_adaptive(0.0, mu, obs, eps, news, T);
        CHECK(std::abs(x - expected) <= 1e-9 * std::max(1e-12, std::abs(expected)) + 1e-15);
    }
}

TEST_CASE("fundamental value update") {
    CHECK(fundamental_update(800.0, 0.0, 8.0) == 792.0);
    CHECK(fundamental_update(500.0, 0.02, 0.0) == doctest::Approx(510.0));
    CHECK(fundamental_update(1.0, 0.0, 5.0) == -4.0);

    // Declining value: v_t = (T - t) E(d) with rho = 0.
    const int T = 100;
    double v = 800.0;
    for (int t = 1; t <= T; ++t) {
        v = fundamental_update(v, 0.0, 8.0);
        REQUIRE(v == static_cast<double>(T - t) * 8.0);
    }
    CHECK(v == 0.0);
}

TEST_CASE("market return at a reference price") {
    CHECK(market_return(0.0, 0.3, 0.0, 50.0, 100.0, 0.0001) == doctest::Approx(-0.0001));
    CHECK(market_return(0.2, 0.01, 0.8, 100.1, 100.0, 0.0001) == doctest::Approx(0.0027).epsilon(1e-12));
    CHECK(market_return(0.4, 0.02, 0.9, 100.0, 100.0, 0.001) == doctest::Approx(0.4 * 0.02 - 0.001));
    CHECK_THROWS_AS(market_return(0.2, 0.0, 0.8, 1.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("implicit market return solves the current-price equation") {
    Engine eng = make_engine(17, Stream::uniform);
    for (int i = 0; i < 500; ++i) {
        const double n_I = exponential_mean(eng, 0.2);
        const double n_II = exponential_mean(eng, 0.8) + 1e-6;
        const double r_e = normal(eng, 0.0, 0.03);
        const double p_prev = 1e5;
        const double v = p_prev * (1.0 + normal(eng, 0.0, 0.05));
        const auto r = implicit_market_return(n_I, r_e, n_II, v, p_prev, 1e-4);
        REQUIRE(r.has_value());
        const double expected = oracle::implicit_return_bisection(n_I, r_e, n_II, v, p_prev, 1e-4);
        CHECK(*r == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
        const double p = (1.0 + *r) * p_prev;
        CHECK(std::abs(n_I * r_e + n_II * (v - p) / p - 1e-4 - *r) < 1e-12);
    }
    // no value investors: the drift alone
    CHECK(*implicit_market_return(0.5, 0.02, 0.0, 123.0, 100.0, 1e-4) == 0.5 * 0.02 - 1e-4);
    // zero mispricing at the previous price gives a smaller root than the lagged law
    const double lagged = market_return(0.3, 0.05, 0.8, 100.0, 100.0, 0.0);
    CHECK(*implicit_market_return(0.3, 0.05, 0.8, 100.0, 100.0, 0.0) < lagged);
}

TEST_CASE("price update and floor") {
    const PriceStep a = price_update(100.0, 0.05, 1e-6);
    CHECK(a.price == doctest::Approx(105.0));
    CHECK_FALSE(a.clamped);
    const PriceStep b = price_update(100.0, 0.0, 1e-6);
    CHECK(b.price == 100.0);
    CHECK_FALSE(b.clamped);
    const PriceStep c = price_update(100.0, -1.2, 1e-6);
    CHECK(c.price == 1e-6);
    CHECK(c.clamped);
}

TEST_CASE("liquidity weights") {
    LiquidityAccount acc;
    acc.L_I = 50.0;
    acc.L_II = 50.0;
    acc.rho_max_I = 0.001;
    acc.rho_max_II = 0.001;
    TradingWeights w = liquidity_weights(acc, 0.0001);
    CHECK(w.n_I == doctest::Approx(0.1));
    CHECK(w.n_II == doctest::Approx(0.1));

    acc.L_I = 0.0;
    CHECK(liquidity_weights(acc, 0.0001).n_I == 0.0);

    acc.L_I = 10.0;
    acc.L_II = 0.0;
    acc.rho_max_I = 0.004;
    CHECK(liquidity_weights(acc, 0.002).n_I == doctest::Approx(1.0));

    acc.L_I = 0.0;
    CHECK_THROWS_AS(liquidity_weights(acc, 0.0001), ValidationError);
    acc.L_I = 1.0;
    acc.rho_max_II = 0.0;
    CHECK_THROWS_AS(liquidity_weights(acc, 0.0001), ValidationError);
}

TEST_CASE("cash and liquidity accounting") {
    const std::vector<double> one{2.0};
    const CashLiquidity a = cash_and_liquidity(100.0, 10.0, 0.0, one);
    REQUIRE(a.C.size() == 2);
    CHECK(a.C[0] == 100.0);
    CHECK(a.C[1] == 120.0);
    CHECK(a.L[1] == 130.0);

    const std::vector<double> zeros(5, 0.0);
    const CashLiquidity b = cash_and_liquidity(100.0, 10.0, 0.0, zeros);
    for (double c : b.C) {
        CHECK(c == 100.0);
    }
    const CashLiquidity c = cash_and_liquidity(100.0, 0.0, 0.01, zeros);
    for (std::size_t t = 0; t < c.C.size(); ++t) {
        CHECK(c.C[t] == doctest::Approx(std::pow(1.01, static_cast<double>(t)) * 100.0).epsilon(1e-13));
        CHECK(c.L[t] == c.C[t]);
    }

    // Closed form with interest and dividends.
    const std::vector<double> d{1.0, 3.0, 0.5, 2.0};
    const CashLiquidity e = cash_and_liquidity(50.0, 4.0, 0.02, d);
    for (std::size_t t = 0; t <= d.size(); ++t) {
        double closed = std::pow(1.02, static_cast<double>(t)) * 50.0;
        for (std::size_t tau = 1; tau <= t; ++tau) {
            closed += 4.0 * d[tau - 1] * std::pow(1.02, static_cast<double>(t - tau));
        }
        CHECK(e.C[t] == doctest::Approx(closed).epsilon(1e-13));
        CHECK(e.L[t] == doctest::Approx(closed + 4.0).epsilon(1e-13));
    }
    CHECK_THROWS_AS(cash_and_liquidity(-1.0, 0.0, 0.0, d), ValidationError);
}

TEST_CASE("parameter validation names the field") {
    ModelParams p;
    p.mu_I = 1.5;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("mu_I"), ValidationError);
    p = ModelParams{};
    p.prob_news = -0.1;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("prob_news"), ValidationError);
    p = ModelParams{};
    p.T = 0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("T"), ValidationError);
    p = ModelParams{};
    p.p0 = 0.0;
    CHECK_THROWS_AS(simulate_linear(p, 1), ValidationError);
    p = ModelParams{};
    p.dividend_mode = DividendMode::discrete_uniform;
    p.dividend_set.clear();
    CHECK_THROWS_AS(p.validate(), ValidationError);
    CHECK_NOTHROW(table1_general().validate());
    CHECK_NOTHROW(table1_speculative().validate());
}

TEST_CASE("declining-value preset") {
    const ModelParams p = declining_value(100);
    CHECK(p.dividend_mode == DividendMode::discrete_uniform);
    CHECK(p.rho == 0.0);
    CHECK(p.v0 == 800.0);
    CHECK(p.p0 == 400.0);
    CHECK(p.de0 == 8.0);
}

TEST_CASE("no traders and no drift leave the price unchanged") {
    ModelParams p;
    p.gamma = 0.0;
    p.mean_nI = 0.0;
    p.mean_nII = 0.0;
    p.T = 500;
    const SimulationPath path = simulate_linear(p, 3);
    for (std::size_t i = 0; i < path.size(); ++i) {
        REQUIRE(path.r[i] == 0.0);
        REQUIRE(path.p[i] == p.p0);
    }
}

TEST_CASE("pure drift without news or value investors") {
    ModelParams p;
    p.prob_news = 0.0;
    p.std_eps_d = 0.0;
    p.std_eps_I = 0.0;
    p.std_eps_II = 0.0;
    p.mean_nII = 0.0;
    p.r1e = 0.0;
    p.mu_I = 1.0;
    p.T = 200;
    const SimulationPath path = simulate_linear(p, 9);
    for (std::size_t i = 0; i < path.size(); ++i) {
        REQUIRE(path.r[i] == -p.gamma);
        CHECK(path.p[i] == doctest::Approx(p.p0 * std::pow(1.0 - p.gamma, static_cast<double>(i + 1))).epsilon(1e-12));
    }
}

TEST_CASE("path invariants hold for both mispricing timings") {
    for (MispricingTiming timing : {MispricingTiming::implicit, MispricingTiming::lagged}) {
        ModelParams p = table1_general();
        p.T = 3000;
        p.mispricing = timing;
        const SimulationPath path = simulate_linear(p, 21);
        REQUIRE(path.size() == 3000);
        CHECK(path.r.size() == path.size());
        CHECK(path.v_e.size() == path.size());
        CHECK(path.news.size() == path.size());
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (path.clamped[i] == 0) {
                REQUIRE(path.p[i] == (1.0 + path.r[i]) * path.price_before(i));
            }
            REQUIRE(path.d[i] >= 0.0);
            REQUIRE(path.n_I[i] >= 0.0);
            REQUIRE(path.n_II[i] >= 0.0);
            REQUIRE(path.p[i] > 0.0);
        }
    }
}

TEST_CASE("determinism and seed sensitivity") {
    ModelParams p = table1_general();
    p.T = 1000;
    CHECK(simulate_linear(p, 42) == simulate_linear(p, 42));
    CHECK_FALSE(simulate_linear(p, 42).r == simulate_linear(p, 43).r);
}

TEST_CASE("switching off news leaves the other draws intact") {
    ModelParams a = table1_general();
    a.T = 500;
    ModelParams b = a;
    b.prob_news = 0.0;
    const SimulationPath pa = simulate_linear(a, 8);
    const SimulationPath pb = simulate_linear(b, 8);
    CHECK(pa.n_I == pb.n_I);
    CHECK(pa.n_II == pb.n_II);
    CHECK(pa.d == pb.d);
}

TEST_CASE("speculation-only paths equal the linear model without value investors") {
    ModelParams p = table1_speculative();
    p.T = 2000;
    REQUIRE(p.mu_I == 0.0);
    const SimulationPath s = simulate_speculative(p, 77);
    const SimulationPath l = simulate_linear(p, 77);
    CHECK(s.r == l.r);
    CHECK(s.p == l.p);
    CHECK(s.n_I == l.n_I);
}

TEST_CASE("zero dividend compounds the value") {
    CHECK(fundamental_update(250.0, 0.03, 0.0) == doctest::Approx(1.03 * 250.0));
}

TEST_CASE("zero mispricing reduces to the speculative law") {
    for (double n_I : {0.0, 0.3, 1.7}) {
        CHECK(market_return(n_I, 0.012, 0.8, 100.0, 100.0, 1e-4) == doctest::Approx(n_I * 0.012 - 1e-4));
        CHECK(*implicit_market_return(n_I, 0.012, 0.0, 100.0, 100.0, 1e-4) == doctest::Approx(n_I * 0.012 - 1e-4));
    }
}

TEST_CASE("zero-memory single step") {
    // r = n (r_prev + eps) - gamma with news
    const double r_e = adaptive_update(0.5, 0.02, 0.0, 0.01, true);
    CHECK(market_return(0.5, r_e, 0.0, 1.0, 1.0, 0.0001) == doctest::Approx(0.0149).epsilon(1e-12));
}
