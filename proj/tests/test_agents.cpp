#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "specmarket/agents.hpp"
#include "specmarket/errors.hpp"
#include "specmarket/estimators.hpp"

using namespace specmarket;

namespace {

// Regime where every forecast stays inside [0, rho_max] so the agent
// fractions track the linear weights.
ModelParams smooth_regime() {
    ModelParams p;
    p.gamma = 0.01;
    p.mu_I = 1.0;
    p.mu_II = 1.0;
    p.r1e = 0.005;
    p.mean_nI = 0.2;
    p.mean_nII = 0.001;
    p.rho = 0.0;
    p.d0 = 0.0;
    p.de0 = 0.0;
    p.v0 = p.p0;
    p.prob_news = 0.0;
    p.std_eps_d = 0.0;
    p.std_eps_I = 0.0;
    p.std_eps_II = 0.0;
    p.T = 50;
    return p;
}

double rms_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(s / static_cast<double>(a.size()));
}

} // namespace

TEST_CASE("unit demand and excess demand") {
    CHECK(unit_demand(0.02, 0.01) == 1);
    CHECK(unit_demand(0.01, 0.01) == 1);
    CHECK(unit_demand(0.0, 0.01) == -1);
    const std::vector<int> signs{1, 1, -1, 1};
    CHECK(normalized_excess_demand(signs) == 0.5);
    CHECK_THROWS_AS(normalized_excess_demand(std::vector<int>{}), ValidationError);
}

TEST_CASE("threshold cdf and implied bound") {
    CHECK(threshold_cdf(0.001, 0.004) == 0.25);
    CHECK(threshold_cdf(-1.0, 0.004) == 0.0);
    CHECK(threshold_cdf(0.01, 0.004) == 1.0);
    CHECK(implied_rho_max(1e-4, 0.5, 0.1) == doctest::Approx(1e-3));
    CHECK(implied_rho_max(1e-4, 0.5, 0.0) == std::numeric_limits<double>::infinity());
    // 2 gamma share F(x) / x recovers the weight below the bound.
    const double rho_max = implied_rho_max(1e-4, 0.5, 0.3);
    CHECK(2.0 * 1e-4 * 0.5 * threshold_cdf(1e-4, rho_max) / 1e-4 == doctest::Approx(0.3));
}

TEST_CASE("population construction") {
    const ModelParams p = table1_general();
    const TraderPopulation pop = make_population(30, 70, p, 5);
    CHECK(pop.count_I() == 30);
    CHECK(pop.count_II() == 70);
    CHECK(pop.share_I() == doctest::Approx(0.3));
    CHECK(pop.share_II() == doctest::Approx(0.7));
    for (const Trader& tr : pop.type_I) {
        CHECK(tr.rho_quantile >= 0.0);
        CHECK(tr.rho_quantile < 1.0);
        CHECK(tr.mu == p.mu_I);
    }
    CHECK_THROWS_AS(TraderPopulation{}.validate(), ValidationError);
    TraderPopulation bad = pop;
    bad.type_I[0].rho_quantile = 1.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("agent run is deterministic and shares the exogenous draws") {
    ModelParams p = table1_general();
    p.T = 300;
    const TraderPopulation pop = make_population(200, 200, p, 1);
    const AgentPath a = simulate_agents(p, pop, 12);
    const AgentPath b = simulate_agents(p, pop, 12);
    CHECK(a.path == b.path);
    const SimulationPath lin = simulate_linear(p, 12);
    CHECK(a.path.n_I == lin.n_I);
    CHECK(a.path.d == lin.d);
    for (std::size_t i = 0; i < a.path.size(); ++i) {
        REQUIRE(a.excess_demand[i] >= -1.0);
        REQUIRE(a.excess_demand[i] <= 1.0);
        REQUIRE(a.path.p[i] > 0.0);
    }
}

TEST_CASE("agent returns approach the linear law as the population grows") {
    const ModelParams p = smooth_regime();
    const SimulationPath lin = simulate_linear(p, 4);
    const double scale = summary_stats(lin.r).std;
    REQUIRE(scale > 0.0);

    std::vector<double> gaps;
    for (std::size_t n : {100, 1000, 10000}) {
        const TraderPopulation pop = make_population(n, n, p, 31);
        const AgentPath a = simulate_agents(p, pop, 4);
        gaps.push_back(rms_gap(a.path.r, lin.r));
    }
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[2] < gaps[1]);
    CHECK(gaps[2] <= 0.1 * scale);
}

TEST_CASE("balanced demand gives zero excess demand") {
    const std::vector<int> signs{1, -1, 1, -1, -1, 1};
    CHECK(normalized_excess_demand(signs) == 0.0);
}
