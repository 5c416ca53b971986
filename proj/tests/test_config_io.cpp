#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "specmarket/chart.hpp"
#include "specmarket/config.hpp"
#include "specmarket/errors.hpp"
#include "specmarket/path_io.hpp"

using namespace specmarket;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("specmarket_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

} // namespace

// --- config -----------------------------------------------------------------

TEST_CASE("empty config gives the defaults") {
    const RunConfig c = parse_config("");
    CHECK(c == RunConfig{});
    CHECK(c.model == table1_general());
    CHECK(c.experiment.n_seeds == 50);
    CHECK(c.experiment.master_seed == 42);
}

TEST_CASE("config values, sections and comments") {
    const RunConfig c = parse_config(
        "scenario = demo  # trailing comment\n"
        "preset = speculative\n"
        "[model]\n"
        "T = 500\n"
        "gamma = 2e-4\n"
        "dividend_set = 1, 2, 3\n"
        "[experiment]\n"
        "n_seeds = 7\n"
        "tail_method = mle\n"
        "sweep_T = 50, 100\n"
        "[output]\n"
        "svg = false\n");
    CHECK(c.scenario == "demo");
    CHECK(c.model.T == 500);
    CHECK(c.model.gamma == 2e-4);
    CHECK(c.model.mean_nI == table1_speculative().mean_nI);
    CHECK(c.model.dividend_set == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(c.experiment.n_seeds == 7);
    CHECK(c.experiment.tail_method == TailMethod::mle);
    CHECK(c.experiment.sweep_T == std::vector<std::int64_t>{50, 100});
    CHECK_FALSE(c.output.svg);
    CHECK(c.output.csv);
}

TEST_CASE("config errors carry key and line") {
    auto error_of = [](const std::string& text) -> std::pair<std::string, std::size_t> {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return {e.key(), e.line()};
        }
        return {"", 0};
    };
    CHECK(error_of("[model]\nmu_I = 1.5\n") == std::make_pair(std::string("mu_I"), std::size_t{2}));
    CHECK(error_of("[model]\nT = 10\nT = 20\n") == std::make_pair(std::string("T"), std::size_t{3}));
    CHECK(error_of("[model]\nbogus = 1\n") == std::make_pair(std::string("bogus"), std::size_t{2}));
    CHECK(error_of("[nowhere]\n").second == 1);
    CHECK(error_of("\n\n[model]\ngamma = abc\n") == std::make_pair(std::string("gamma"), std::size_t{4}));
    CHECK(error_of("[model]\nT = 1.5\n").first == "T");
    CHECK(error_of("[output]\ncsv = yes\n").first == "csv");
    CHECK(error_of("preset = other\n").first == "preset");
    CHECK(error_of("[model]\njust text\n").second == 2);
    CHECK_THROWS_AS(parse_config("[experiment]\nn_seeds = 0\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[model]\nprob_news = nan\n"), ValidationError);
}

TEST_CASE("serialized config reads back to the same value") {
    RunConfig c;
    c.scenario = "round";
    c.model = table1_speculative();
    c.model.gamma = 0.1 + 0.2;
    c.model.dividend_mode = DividendMode::discrete_uniform;
    c.model.mispricing = MispricingTiming::lagged;
    c.experiment.sweep_mean_nI = {0.05, 1.0 / 3.0};
    c.experiment.tail_method = TailMethod::mle;
    c.output.json = false;
    const std::string text = serialize_config(c);
    CHECK(parse_config(text) == c);
    CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-4) == "1e-04");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("shipped config files parse to the presets") {
    const RunConfig defaults = load_config(fs::path(SPECMARKET_CONFIG_DIR) / "table1.defaults");
    RunConfig expected;
    expected.scenario = "table1";
    CHECK(defaults == expected);

    const RunConfig spec = load_config(fs::path(SPECMARKET_CONFIG_DIR) / "speculative.conf");
    CHECK(spec.model == table1_speculative());
    CHECK(spec.experiment.column == "speculative");
    CHECK_THROWS_AS(load_config(fs::path(SPECMARKET_CONFIG_DIR) / "missing.conf"), ValidationError);
}

// --- path io ----------------------------------------------------------------

TEST_CASE("path csv round trip") {
    ModelParams p = table1_general();
    p.T = 300;
    const SimulationPath path = simulate_linear(p, 5);
    const std::string csv = path_to_csv(path);
    CHECK(csv.rfind(std::string(kPathCsvHeader) + "\n", 0) == 0);
    CHECK(count_of(csv, "\n") == 301);
    const SimulationPath back = path_from_csv(csv);
    CHECK(back.p == path.p);
    CHECK(back.r == path.r);
    CHECK(back.v_e == path.v_e);
    CHECK(back.news == path.news);
    CHECK_THROWS_AS(path_from_csv("a,b\n1,2\n"), ValidationError);
    CHECK_THROWS_AS(path_from_csv(std::string(kPathCsvHeader) + "\n2,1,0,0,0,0,0,0,0,0\n"), ValidationError);
    CHECK_THROWS_AS(path_from_csv(std::string(kPathCsvHeader) + "\n1,1,0,0,0,0,0,0,0,5\n"), ValidationError);
    CHECK_THROWS_AS(path_from_csv(std::string(kPathCsvHeader) + "\n1,x,0,0,0,0,0,0,0,0\n"), ValidationError);
}

TEST_CASE("path json fields") {
    ModelParams p = table1_general();
    p.T = 20;
    const SimulationPath path = simulate_linear(p, 5);
    const auto j = nlohmann::json::parse(path_to_json(path));
    CHECK(j["seed"] == 5);
    CHECK(j["p"].size() == 20);
    CHECK(j["r"][3].get<double>() == path.r[3]);
    CHECK(j.contains("clamped"));
}

TEST_CASE("report json and csv") {
    ModelParams p = table1_general();
    p.T = 2000;
    const ExperimentReport r = reproduce_table1(Table1Column::general, p, 3, 42);
    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["scenario"] == "table1-general");
    CHECK(j["provenance"]["master_seed"] == 42);
    CHECK(j["provenance"]["params"]["T"] == 2000);
    CHECK(j["records"].size() == 3);
    CHECK(j["aggregates"]["alpha_hat"]["count"] == r.aggregates.alpha_hat.count);
    CHECK(report_to_json(r) == report_to_json(reproduce_table1(Table1Column::general, p, 3, 42)));
    const std::string csv = report_to_csv(r);
    CHECK(count_of(csv, "\n") == 4);
    CHECK(csv.rfind("index,seed,mean_r,std_r,alpha_hat", 0) == 0);
}

TEST_CASE("other json writers") {
    const auto k = nlohmann::json::parse(kesten_root_to_json(kesten_tail_root(0.55)));
    CHECK(k["alpha_star"].get<double>() == *kesten_tail_root(0.55).alpha_star);
    CHECK(k["stationary"] == true);
    const auto none = nlohmann::json::parse(kesten_root_to_json(kesten_tail_root(3.0)));
    CHECK(none["alpha_star"].is_null());

    AcfResult acf;
    acf.lags = {1, 2};
    acf.values = {0.5, 0.25};
    CHECK(acf_to_csv(acf) == "lag,acf\n1,0.5\n2,0.25\n");
    CHECK(nlohmann::json::parse(acf_to_json(acf))["abs_sum"] == 0.75);

    TailFit fit;
    fit.alpha_hat = 2.5;
    CHECK(nlohmann::json::parse(tail_fit_to_json(fit))["alpha_hat"] == 2.5);
}

TEST_CASE("output formats") {
    CHECK(parse_output_format("csv") == OutputFormat::csv);
    CHECK(parse_output_format("svg") == OutputFormat::svg);
    CHECK_FALSE(parse_output_format("xml").has_value());
    CHECK(to_string(OutputFormat::json) == "json");
}

TEST_CASE("file writing and export") {
    const fs::path dir = scratch_dir("io");
    ModelParams p = table1_general();
    p.T = 10;
    const SimulationPath path = simulate_linear(p, 1);
    export_path(path, OutputFormat::csv, dir / "nested" / "a.csv");
    CHECK(read_text_file(dir / "nested" / "a.csv") == path_to_csv(path));
    export_path(path, OutputFormat::json, dir / "a.json");
    CHECK(read_text_file(dir / "a.json") == path_to_json(path));
    CHECK_THROWS_AS(export_path(path, OutputFormat::svg, dir / "a.svg"), ValidationError);
    CHECK_THROWS_AS(read_text_file(dir / "none.txt"), ValidationError);
    {
        std::ofstream blocker(dir / "blocker");
        blocker << "x";
    }
    CHECK_THROWS_AS(write_text_file(dir / "blocker" / "inner.txt", "x"), DiagnosticError);
    fs::remove_all(dir);
}

// --- charts -----------------------------------------------------------------

TEST_CASE("svg charts") {
    ModelParams p = table1_general();
    p.T = 400;
    const SimulationPath path = simulate_linear(p, 2);

    const std::string price = render_svg(price_chart(path));
    CHECK(price.rfind("<svg", 0) == 0);
    CHECK(price.find("</svg>") != std::string::npos);
    CHECK(count_of(price, "class=\"series\"") == 2);
    CHECK(price.find("expected value") != std::string::npos);

    const AcfResult acf = sample_acf(path.r, AcfTransform::absolute, 50);
    const std::string a = render_svg(acf_chart(acf, path.size()));
    CHECK(a.find("class=\"band\"") != std::string::npos);
    CHECK(white_noise_band(400) == doctest::Approx(0.15));

    const TailFit fit = fit_tail(path.r);
    const std::string c = render_svg(ccdf_chart(path.r, fit));
    CHECK(c.find("class=\"annotation\"") != std::string::npos);
    CHECK(c.find(alpha_label(fit.alpha_hat)) != std::string::npos);
    CHECK(alpha_label(3.0) == "α = 3.00");

    Chart empty;
    CHECK_THROWS_AS(render_svg(empty), ValidationError);
    CHECK_THROWS_AS(white_noise_band(0), ValidationError);
}

TEST_CASE("ccdf chart thins dense curves") {
    std::vector<double> data;
    for (int i = 1; i <= 20000; ++i) {
        data.push_back(static_cast<double>(i));
    }
    const Chart c = ccdf_chart(data, std::nullopt);
    REQUIRE_FALSE(c.series.empty());
    CHECK(c.series.front().x.size() <= kMaxCcdfMarkers);
    CHECK(c.x_scale == AxisScale::log);
}

TEST_CASE("short path csv line count") {
    ModelParams p = table1_general();
    p.T = 3;
    CHECK(count_of(path_to_csv(simulate_linear(p, 1)), "\n") == 4);
}

TEST_CASE("chart contracts") {
    std::vector<double> grid;
    for (std::size_t k = 1; k <= 1000; ++k) {
        grid.push_back(std::pow((static_cast<double>(k) - 0.5) / 1000.0, -1.0 / 3.0));
    }
    TailFit fit = tail_fit_ls(grid, grid.front() < grid.back() ? grid.front() : grid.back());
    const Chart c = ccdf_chart(grid, fit);
    CHECK(c.annotation == "α = 3.00");
    CHECK(c.series.size() == 2);

    AcfResult acf;
    for (std::size_t h = 1; h <= 20; ++h) {
        acf.lags.push_back(h);
        acf.values.push_back(0.01);
    }
    const Chart a = acf_chart(acf, 10000);
    REQUIRE(a.band.has_value());
    CHECK(*a.band == doctest::Approx(0.03));

    ModelParams p = declining_value(100);
    const SimulationPath path = simulate_linear(p, 3);
    const Chart price = price_chart(path);
    REQUIRE(price.series.size() == 2);
    CHECK(price.series[0].x.size() == 100);
    CHECK_FALSE(price.series[0].markers);
    CHECK(price.series[1].y == path.v_e);
}
