// Command-line front end for the specmarket library.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specmarket/chart.hpp"
#include "specmarket/config.hpp"
#include "specmarket/errors.hpp"
#include "specmarket/estimators.hpp"
#include "specmarket/experiments.hpp"
#include "specmarket/kesten.hpp"
#include "specmarket/model.hpp"
#include "specmarket/path_io.hpp"
#include "specmarket/reference.hpp"

namespace fs = std::filesystem;
using namespace specmarket;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kDiagnostic = 2 };

struct GlobalOptions {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format;
    bool quiet = false;
};

struct Context {
    RunConfig config;
    std::uint64_t seed = 0;
    fs::path out;
    bool csv = true;
    bool json = true;
    bool svg = true;
    bool quiet = false;

    void emit(const std::string& name, const std::string& ext, const std::string& text) const {
        const fs::path file = out / (name + "." + ext);
        write_text_file(file, text);
        if (!quiet) {
            std::cout << "wrote " << file.string() << "\n";
        }
    }

    void say(const std::string& line) const {
        if (!quiet) {
            std::cout << line << "\n";
        }
    }
};

std::uint64_t parse_seed(const std::string& text, const char* source) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ValidationError(std::string(source) + ": expected an unsigned 64-bit seed, got '" + text + "'");
    }
    return v;
}

// Builds the run context. The config is parsed before anything is written.
Context make_context(const GlobalOptions& g, const std::optional<ModelParams>& default_model = std::nullopt) {
    Context ctx;
    if (!g.config_file.empty()) {
        ctx.config = load_config(g.config_file);
    } else if (default_model) {
        ctx.config.model = *default_model;
    }
    ctx.seed = ctx.config.experiment.master_seed;
    if (g.seed) {
        ctx.seed = *g.seed;
    }
    if (const char* env = std::getenv("SPECMARKET_SEED"); env != nullptr && *env != '\0') {
        ctx.seed = parse_seed(env, "SPECMARKET_SEED");
    }
    ctx.config.experiment.master_seed = ctx.seed;
    ctx.out = g.out_dir.empty() ? fs::path(ctx.config.output.directory) : fs::path(g.out_dir);
    if (g.format.empty()) {
        ctx.csv = ctx.config.output.csv;
        ctx.json = ctx.config.output.json;
        ctx.svg = ctx.config.output.svg;
    } else {
        const auto f = parse_output_format(g.format);
        if (!f) {
            throw ValidationError("--format: expected csv, json or svg, got '" + g.format + "'");
        }
        ctx.csv = *f == OutputFormat::csv;
        ctx.json = *f == OutputFormat::json;
        ctx.svg = *f == OutputFormat::svg;
    }
    ctx.quiet = g.quiet;
    return ctx;
}

std::vector<double> read_series(const fs::path& file, const std::string& column) {
    const std::string text = read_text_file(file);
    if (text.rfind(std::string(kPathCsvHeader), 0) == 0) {
        const SimulationPath path = path_from_csv(text);
        if (column == "r") return path.r;
        if (column == "p") return path.p;
        if (column == "d") return path.d;
        if (column == "d_e") return path.d_e;
        if (column == "v_e") return path.v_e;
        if (column == "r_e") return path.r_e;
        if (column == "n_I") return path.n_I;
        if (column == "n_II") return path.n_II;
        throw ValidationError("--column: unknown path column '" + column + "'");
    }
    std::vector<double> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() : eol + 1;
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size()) {
            if (line_no == 1) {
                continue;  // header
            }
            throw ValidationError(file.string() + " line " + std::to_string(line_no) + ": not a number");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ValidationError(file.string() + ": no data");
    }
    return out;
}

TailMethod parse_method(const std::string& text, TailMethod fallback) {
    if (text.empty()) return fallback;
    if (text == "ls" || text == "least-squares") return TailMethod::least_squares;
    if (text == "mle") return TailMethod::mle;
    throw ValidationError("--method: expected ls or mle, got '" + text + "'");
}

AcfTransform parse_transform(const std::string& text) {
    if (text == "raw") return AcfTransform::raw;
    if (text == "absolute" || text == "abs") return AcfTransform::absolute;
    if (text == "squared") return AcfTransform::squared;
    throw ValidationError("--transform: expected raw, absolute or squared, got '" + text + "'");
}

std::string fit_line(const TailFit& fit) {
    return "alpha_hat=" + format_double(fit.alpha_hat) + " x_min=" + format_double(fit.x_min) +
           " n_tail=" + std::to_string(fit.n_tail) + " ks=" + format_double(fit.ks) + " method=" +
           std::string(to_string(fit.method));
}

std::string fit_csv(const TailFit& fit) {
    return "alpha_hat,x_min,n_tail,ks,method\n" + format_double(fit.alpha_hat) + "," + format_double(fit.x_min) +
           "," + std::to_string(fit.n_tail) + "," + format_double(fit.ks) + "," +
           std::string(to_string(fit.method)) + "\n";
}

void emit_path(const Context& ctx, const std::string& name, const SimulationPath& path) {
    if (ctx.csv) ctx.emit(name, "csv", path_to_csv(path));
    if (ctx.json) ctx.emit(name, "json", path_to_json(path));
    if (ctx.svg) {
        ctx.emit(name + "_price", "svg", render_svg(price_chart(path)));
        ctx.emit(name + "_returns", "svg", render_svg(return_chart(path)));
    }
    const SummaryStats s = summary_stats(path.r);
    ctx.say("T=" + std::to_string(path.size()) + " mean(r)=" + format_double(s.mean) +
            " std(r)=" + format_double(s.std) + " clamped=" + std::to_string(path.clamp_count()));
}

std::optional<TailFit> try_fit(std::span<const double> data, TailMethod method) {
    try {
        return fit_tail(data, method);
    } catch (const DiagnosticError&) {
        return std::nullopt;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Speculative market simulator and stylized-facts toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(library_version()));

    GlobalOptions g;
    app.add_option("--config", g.config_file, "Run configuration file (key = value)");
    app.add_option("--seed", g.seed, "Master seed (SPECMARKET_SEED overrides)");
    app.add_option("--out", g.out_dir, "Output directory");
    app.add_option("--format", g.format, "Emit only this format")->check(CLI::IsMember({"csv", "json", "svg"}));
    app.add_flag("--quiet", g.quiet, "No progress output");

    std::function<int()> action;
    auto sub = [&](const char* name, const char* help) {
        CLI::App* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };

    // simulate
    CLI::App* simulate = sub("simulate", "Simulate one path of the linear model");
    simulate->callback([&] {
        action = [&] {
            const Context ctx = make_context(g);
            emit_path(ctx, "simulate", simulate_linear(ctx.config.model, ctx.seed));
            return kOk;
        };
    });

    // speculate
    CLI::App* speculate = sub("speculate", "Simulate one path of the speculation-only model");
    speculate->callback([&] {
        action = [&] {
            const Context ctx = make_context(g, table1_speculative());
            emit_path(ctx, "speculate", simulate_speculative(ctx.config.model, ctx.seed));
            return kOk;
        };
    });

    // estimate-tail
    std::string tail_input;
    std::string tail_column = "r";
    std::string tail_method;
    CLI::App* estimate = sub("estimate-tail", "Fit the power-law tail of |x| with a KS-selected cutoff");
    estimate->add_option("input", tail_input, "Path CSV or one number per line")->required();
    estimate->add_option("--column", tail_column, "Path CSV column");
    estimate->add_option("--method", tail_method, "ls or mle");
    estimate->callback([&] {
        action = [&] {
            const Context ctx = make_context(g);
            const std::vector<double> data = read_series(tail_input, tail_column);
            const TailMethod method = parse_method(tail_method, ctx.config.experiment.tail_method);
            const TailFit fit = fit_tail(data, method);
            if (ctx.csv) ctx.emit("tail", "csv", fit_csv(fit));
            if (ctx.json) ctx.emit("tail", "json", tail_fit_to_json(fit));
            if (ctx.svg) ctx.emit("tail_ccdf", "svg", render_svg(ccdf_chart(data, fit)));
            ctx.say(fit_line(fit));
            return kOk;
        };
    });

    // acf
    std::string acf_input;
    std::string acf_column = "r";
    std::string acf_transform = "absolute";
    std::optional<std::size_t> acf_lags;
    CLI::App* acf = sub("acf", "Sample autocorrelation of a series");
    acf->add_option("input", acf_input, "Path CSV or one number per line")->required();
    acf->add_option("--column", acf_column, "Path CSV column");
    acf->add_option("--transform", acf_transform, "raw, absolute or squared");
    acf->add_option("--max-lag", acf_lags, "Largest lag");
    acf->callback([&] {
        action = [&] {
            const Context ctx = make_context(g);
            const std::vector<double> data = read_series(acf_input, acf_column);
            const AcfResult res =
                sample_acf(data, parse_transform(acf_transform), acf_lags.value_or(ctx.config.experiment.max_lag));
            if (ctx.csv) ctx.emit("acf", "csv", acf_to_csv(res));
            if (ctx.json) ctx.emit("acf", "json", acf_to_json(res));
            if (ctx.svg) ctx.emit("acf", "svg", render_svg(acf_chart(res, data.size())));
            ctx.say("lags=" + std::to_string(res.values.size()) + " acf(1)=" + format_double(res.values.front()) +
                    " abs_sum=" + format_double(res.abs_sum()));
            return kOk;
        };
    });

    // kesten-root
    double kesten_mean = 0.55;
    double kesten_tol = 1e-12;
    CLI::App* kesten = sub("kesten-root", "Tail exponent predicted for exponential multipliers");
    kesten->add_option("--mean-n", kesten_mean, "Mean of the exponential multiplier");
    kesten->add_option("--tol", kesten_tol, "Residual tolerance");
    kesten->callback([&] {
        action = [&] {
            const Context ctx = make_context(g);
            const KestenRoot root = kesten_tail_root(kesten_mean, kesten_tol);
            if (ctx.csv) {
                ctx.emit("kesten_root", "csv",
                         "mean_n,alpha_star,residual,log_moment\n" + format_double(root.mean_n) + "," +
                             (root.alpha_star ? format_double(*root.alpha_star) : "") + "," +
                             format_double(root.residual) + "," + format_double(root.log_moment) + "\n");
            }
            if (ctx.json) ctx.emit("kesten_root", "json", kesten_root_to_json(root));
            if (!root.exists()) {
                std::cerr << "no positive root: E[log n] = " << format_double(root.log_moment)
                          << " (nonstationary or beyond the search bracket)\n";
                return kDiagnostic;
            }
            ctx.say("alpha_star=" + format_double(*root.alpha_star) + " residual=" + format_double(root.residual) +
                    " E[log n]=" + format_double(root.log_moment));
            return kOk;
        };
    });

    // garch
    GarchParams garch_params;
    std::size_t garch_T = 10000;
    CLI::App* garch = sub("garch", "Simulate a GARCH(1,1) reference series");
    garch->add_option("--c", garch_params.c, "Variance intercept");
    garch->add_option("--a", garch_params.a, "Shock coefficient");
    garch->add_option("--b", garch_params.b, "Persistence coefficient");
    garch->add_option("--T", garch_T, "Length");
    garch->callback([&] {
        action = [&] {
            const Context ctx = make_context(g);
            const GarchPath path = garch_simulate(garch_params, garch_T, ctx.seed);
            if (ctx.csv) {
                std::string csv = "t,r,sigma2\n";
                for (std::size_t i = 0; i < path.r.size(); ++i) {
                    csv += std::to_string(i + 1) + "," + format_double(path.r[i]) + "," +
                           format_double(path.sigma2[i]) + "\n";
                }
                ctx.emit("garch", "csv", csv);
            }
            const std::size_t lags = std::min<std::size_t>(ctx.config.experiment.max_lag, garch_T - 2);
            const AcfResult a = sample_acf(path.r, AcfTransform::absolute, lags);
            if (ctx.json) ctx.emit("garch_acf_abs", "json", acf_to_json(a));
            if (ctx.svg) ctx.emit("garch_acf_abs", "svg", render_svg(acf_chart(a, path.r.size())));
            ctx.say("persistence=" + format_double(garch_params.persistence()) +
                    " acf|r|(1)=" + format_double(a.values.front()));
            return kOk;
        };
    });

    // table1
    std::string table1_column;
    std::optional<std::size_t> table1_seeds;
    CLI::App* table1 = sub("table1", "Summary statistics of a reference column over seeds");
    table1->add_option("--column", table1_column, "general or speculative");
    table1->add_option("--n-seeds", table1_seeds, "Number of paths");
    table1->callback([&] {
        action = [&] {
            Context ctx = make_context(g);
            const std::string name = table1_column.empty() ? ctx.config.experiment.column : table1_column;
            const auto column = parse_table1_column(name);
            if (!column) {
                throw ValidationError("--column: expected general or speculative, got '" + name + "'");
            }
            const ModelParams params = g.config_file.empty() ? table1_params(*column) : ctx.config.model;
            const std::size_t n = table1_seeds.value_or(ctx.config.experiment.n_seeds);
            const ExperimentReport report =
                reproduce_table1(*column, params, n, ctx.seed, ctx.config.experiment.tail_method);
            const std::string stem = "table1_" + std::string(to_string(*column));
            if (ctx.csv) ctx.emit(stem, "csv", report_to_csv(report));
            if (ctx.json) ctx.emit(stem, "json", report_to_json(report));
            if (ctx.svg) {
                const SimulationPath first = *column == Table1Column::general
                                                 ? simulate_linear(params, report.records.front().seed)
                                                 : simulate_speculative(params, report.records.front().seed);
                ctx.emit(stem + "_ccdf", "svg",
                         render_svg(ccdf_chart(first.r, report.records.front().tail)));
            }
            const Aggregates& a = report.aggregates;
            ctx.say("median mean(r)=" + format_double(a.mean_r.median) + " median std(r)=" +
                    format_double(a.std_r.median) + " median alpha_hat=" + format_double(a.alpha_hat.median) +
                    " (" + std::to_string(a.alpha_hat.count) + "/" + std::to_string(n) + " fits)");
            return kOk;
        };
    });

    // ensemble-alpha
    std::optional<std::size_t> ensemble_paths;
    CLI::App* ensemble = sub("ensemble-alpha", "Distribution of tail exponents across paths");
    ensemble->add_option("--n-paths", ensemble_paths, "Number of paths");
    ensemble->callback([&] {
        action = [&] {
            const Context ctx = make_context(g);
            const EnsembleAlpha e = ensemble_alpha(ctx.config.model,
                                                   ensemble_paths.value_or(ctx.config.experiment.n_seeds),
                                                   ctx.seed, ctx.config.experiment.tail_method);
            if (ctx.csv) ctx.emit("ensemble_alpha", "csv", report_to_csv(e.report));
            if (ctx.json) ctx.emit("ensemble_alpha", "json", ensemble_to_json(e));
            if (ctx.svg) {
                Chart c;
                c.title = "Tail exponent histogram";
                c.x_label = "alpha";
                c.y_label = "paths";
                ChartSeries s{{}, {}, "count", "#1f4e9c", false};
                for (std::size_t i = 0; i < e.histogram.counts.size(); ++i) {
                    const double left = e.histogram.lo + e.histogram.width * static_cast<double>(i);
                    const auto count = static_cast<double>(e.histogram.counts[i]);
                    s.x.insert(s.x.end(), {left, left, left + e.histogram.width, left + e.histogram.width});
                    s.y.insert(s.y.end(), {0.0, count, count, 0.0});
                }
                c.series.push_back(std::move(s));
                ctx.emit("ensemble_alpha", "svg", render_svg(c));
            }
            const auto mode = e.histogram.mode();
            ctx.say("fits=" + std::to_string(e.alphas.size()) + " diagnostics=" + std::to_string(e.diagnostics) +
                    " mode=" + (mode ? format_double(*mode) : std::string("none")));
            return e.alphas.empty() ? kDiagnostic : kOk;
        };
    });

    // bubble-sweep
    CLI::App* bubble = sub("bubble-sweep", "Bubble metrics of declining-value sessions over a grid");
    bubble->callback([&] {
        action = [&] {
            const Context ctx = make_context(g);
            const ExperimentSettings& ex = ctx.config.experiment;
            const std::vector<BubbleCell> cells =
                bubble_sweep(ex.sweep_mean_nI, ex.sweep_T, ex.n_seeds, ctx.seed, ctx.config.model);
            if (ctx.csv) ctx.emit("bubble_sweep", "csv", bubble_sweep_to_csv(cells));
            if (ctx.json) ctx.emit("bubble_sweep", "json", bubble_sweep_to_json(cells, ctx.config));
            if (ctx.svg) {
                ModelParams p = declining_value(cells.front().T, ctx.config.model);
                p.mean_nI = cells.front().mean_nI;
                ctx.emit("bubble_sweep_price", "svg", render_svg(price_chart(simulate_linear(p, path_seed(ctx.seed, 0)))));
            }
            for (const BubbleCell& c : cells) {
                ctx.say("mean_nI=" + format_double(c.mean_nI) + " T=" + std::to_string(c.T) +
                        " amplitude=" + format_double(c.mean.amplitude) + " rad=" + format_double(c.mean.rad));
            }
            return kOk;
        };
    });

    // crash-tail
    CLI::App* crash = sub("crash-tail", "Pooled tail exponent of declining-value sessions");
    crash->callback([&] {
        action = [&] {
            const Context ctx = make_context(g);
            const ExperimentSettings& ex = ctx.config.experiment;
            const CrashTailResult res =
                crash_tail(ex.sessions, ex.session_T, ctx.seed, ctx.config.model, ex.tail_method);
            if (ctx.csv) ctx.emit("crash_tail", "csv", fit_csv(res.fit));
            if (ctx.json) {
                ctx.emit("crash_tail", "json", crash_tail_to_json(res, declining_value(ex.session_T, ctx.config.model)));
            }
            ctx.say("sessions=" + std::to_string(res.sessions) + " pooled=" + std::to_string(res.pooled) + " " +
                    fit_line(res.fit));
            return kOk;
        };
    });

    // render
    std::string render_input;
    CLI::App* render = sub("render", "Chart panels for a path CSV");
    render->add_option("input", render_input, "Path CSV")->required();
    render->callback([&] {
        action = [&] {
            const Context ctx = make_context(g);
            const SimulationPath path = path_from_csv(read_text_file(render_input));
            if (path.size() == 0) {
                throw ValidationError("render: path has no rows");
            }
            ctx.emit("render_price", "svg", render_svg(price_chart(path)));
            ctx.emit("render_returns", "svg", render_svg(return_chart(path)));
            ctx.emit("render_ccdf", "svg",
                     render_svg(ccdf_chart(path.r, try_fit(path.r, ctx.config.experiment.tail_method))));
            if (path.size() > 2) {
                const std::size_t lags = std::min(ctx.config.experiment.max_lag, path.size() - 2);
                ctx.emit("render_acf", "svg",
                         render_svg(acf_chart(sample_acf(path.r, AcfTransform::absolute, lags), path.size())));
            }
            return kOk;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        return action ? action() : kValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDiagnostic;
    }
}
