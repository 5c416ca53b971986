#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "specmarket/errors.hpp"
#include "specmarket/kesten.hpp"

using namespace specmarket;

TEST_CASE("moment matches numerical integration") {
    for (double m : {0.3, 0.55, 0.9, 1.4}) {
        for (double a : {0.5, 1.0, 2.0, 3.0, 4.7}) {
            const double expected = oracle::exponential_moment(m, a);
            CHECK(kesten_moment(m, a) == doctest::Approx(expected).epsilon(1e-8));
        }
    }
    CHECK(kesten_moment(0.5, 1.0) == doctest::Approx(0.5));
    CHECK(kesten_moment(0.5, 2.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(kesten_moment(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(kesten_moment(0.5, -1.0), ValidationError);
}

TEST_CASE("stationarity margin") {
    CHECK(stationarity_margin(1.0) == doctest::Approx(-kEulerGamma));
    CHECK(stationarity_margin(std::exp(kEulerGamma)) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(stationarity_margin(-1.0), ValidationError);
}

TEST_CASE("margin agrees with a Monte Carlo mean of log n") {
    Engine eng = make_engine(2024, Stream::kesten);
    const int n = 10000000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        s += std::log(exponential_mean(eng, 0.55));
    }
    // sd of log of an exponential is pi / sqrt(6), about 1.28
    CHECK(std::abs(s / n - stationarity_margin(0.55)) < 5.0 * 1.2826 / std::sqrt(double(n)));
}

TEST_CASE("root agrees with an independent bracketing solver") {
    for (double m : {0.3, 0.45, 0.55, 0.7, 1.0, 1.5}) {
        const KestenRoot root = kesten_tail_root(m);
        REQUIRE(root.exists());
        const double expected = oracle::moment_root(m, 0.05, 60.0);
        CHECK(*root.alpha_star == doctest::Approx(expected).epsilon(1e-8));
        CHECK(root.residual <= 1e-10);
        CHECK(root.log_moment < 0.0);
    }
    const KestenRoot r = kesten_tail_root(0.55);
    CHECK(*r.alpha_star > 2.95);
    CHECK(*r.alpha_star < 3.10);
}

TEST_CASE("unit mean gives exponent one") {
    // E[n] = 1 exactly when m = 1
    const KestenRoot r = kesten_tail_root(1.0);
    CHECK(*r.alpha_star == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("no root in the nonstationary regime") {
    const KestenRoot at = kesten_tail_root(std::exp(kEulerGamma) * 1.001);
    CHECK_FALSE(at.exists());
    CHECK_FALSE(kesten_tail_root(3.0).exists());
    CHECK(kesten_tail_root(3.0).log_moment > 0.0);
    CHECK_THROWS_AS(kesten_tail_root(0.5, 0.0), ValidationError);
    CHECK_THROWS_AS(validate_stationary_tail(3.0, NewsNoise{}, 1e-4, 20000, 1), NoKestenRoot);
}

TEST_CASE("root decreases with the mean weight") {
    double prev = 1e9;
    for (double m = 0.3; m < 1.7; m += 0.1) {
        const KestenRoot r = kesten_tail_root(m);
        REQUIRE(r.exists());
        CHECK(*r.alpha_star < prev);
        prev = *r.alpha_star;
    }
}

TEST_CASE("speculative path follows the random-coefficient recursion") {
    ModelParams p = table1_speculative();
    p.T = 5000;
    p.prob_news = 0.5;
    const SimulationPath path = simulate_speculative(p, 19);
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path.clamped[i] != 0) {
            continue;
        }
        REQUIRE(path.r[i] == doctest::Approx(path.n_I[i] * path.r_e[i] - p.gamma).epsilon(1e-12).scale(1e-12));
        const double r_prev = i == 0 ? 0.0 : path.r[i - 1];
        if (path.news[i] == 0 && i > 0) {
            REQUIRE(path.r_e[i] == r_prev);
        }
    }
}

TEST_CASE("speculative model rejects value investors and full memory") {
    ModelParams p = table1_speculative();
    p.mean_nII = 0.1;
    CHECK_THROWS_WITH_AS(simulate_speculative(p, 1), doctest::Contains("mean_nII"), ValidationError);
    p = table1_speculative();
    p.mu_I = 1.0;
    CHECK_THROWS_WITH_AS(simulate_speculative(p, 1), doctest::Contains("mu_I"), ValidationError);
}

TEST_CASE("stationary tail check reports burn-in and sample count") {
    const StationaryTailCheck c = validate_stationary_tail(0.55, NewsNoise{}, 1e-4, 50000, 3);
    CHECK(c.burn_in == 5000);
    CHECK(c.samples == 45000);
    CHECK(c.alpha_star == doctest::Approx(*kesten_tail_root(0.55).alpha_star));
    CHECK(c.fit.alpha_hat > 1.5);
    CHECK(c.fit.alpha_hat < 4.5);
    const StationaryTailCheck small = validate_stationary_tail(0.55, NewsNoise{}, 1e-4, 5000, 3);
    CHECK(small.burn_in == 1000);
    CHECK_THROWS_AS(validate_stationary_tail(0.55, NewsNoise{}, 1e-4, 1000, 3), ValidationError);
    NewsNoise silent;
    silent.mean = 0.0;
    silent.std = 0.0;
    CHECK_THROWS_AS(validate_stationary_tail(0.55, silent, 0.0, 5000, 3), InsufficientTail);
}

TEST_CASE("moment and margin closed forms") {
    CHECK(kesten_moment(0.55, 3.0) == doctest::Approx(0.99825).epsilon(1e-12));
    for (double m : {0.2, 0.55, 2.0}) {
        CHECK(kesten_moment(m, 1.0) == doctest::Approx(m).epsilon(1e-14));
    }
    CHECK(stationarity_margin(0.55) == doctest::Approx(std::log(0.55) - 0.5772156649015329).epsilon(1e-15));
    CHECK(std::abs(stationarity_margin(0.55) + 1.17505) < 1e-5);
    CHECK_FALSE(kesten_tail_root(2.0).exists());
}

TEST_CASE("smaller mean weight gives a thinner simulated tail on matched seeds") {
    const NewsNoise noise{1e-4, 0.01, 1.0};
    const double thin = validate_stationary_tail(0.3, noise, 1e-4, 200000, 12).fit.alpha_hat;
    const double fat = validate_stationary_tail(0.55, noise, 1e-4, 200000, 12).fit.alpha_hat;
    CHECK(*kesten_tail_root(0.3).alpha_star > *kesten_tail_root(0.55).alpha_star);
    CHECK(thin > fat);
}

TEST_CASE("speculative model without noise or drift stays at zero") {
    ModelParams p = table1_speculative();
    p.gamma = 0.0;
    p.prob_news = 0.0;
    p.r1e = 0.0;
    p.T = 1000;
    for (double r : simulate_speculative(p, 4).r) {
        REQUIRE(r == 0.0);
    }
}
