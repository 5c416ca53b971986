#include "specmarket/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <thread>

#include "specmarket/errors.hpp"
#include "specmarket/kesten.hpp"

#ifndef SPECMARKET_VERSION
#define SPECMARKET_VERSION "0.0.0"
#endif

namespace specmarket {

namespace {

// Runs body(i) for i in [0, n) on a small pool. The first exception by index
// is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) {
        return;
    }
    const std::size_t threads =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

AggregateStat aggregate(std::vector<double> values) {
    if (values.empty()) {
        return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 0};
    }
    const std::size_t count = values.size();
    return {median(values), interquartile_range(std::move(values)), count};
}

SeedRecord summarize_path(const SimulationPath& path, std::size_t index, TailMethod method) {
    SeedRecord rec;
    rec.index = index;
    rec.seed = path.seed;
    const SummaryStats s = summary_stats(path.r);
    rec.mean_r = s.mean;
    rec.std_r = s.std;
    try {
        rec.tail = fit_tail(path.r, method);
    } catch (const DiagnosticError& e) {
        rec.tail_error = e.what();
    }
    if (path.size() > kAcfSummaryLags + 1) {
        try {
            const AcfResult a = sample_acf(path.r, AcfTransform::absolute, kAcfSummaryLags);
            const AcfResult r = sample_acf(path.r, AcfTransform::raw, kAcfSummaryLags);
            rec.acf = AcfSummary{a.mean_value(1, kAcfSummaryLags), r.mean_abs_value(1, kAcfSummaryLags)};
        } catch (const DiagnosticError&) {
            // zero-variance path: no ACF summary
        }
    }
    return rec;
}

using Simulator = SimulationPath (*)(const ModelParams&, std::uint64_t);

ExperimentReport run_records(std::string scenario, const ModelParams& params,
                             std::span<const std::uint64_t> seeds, std::uint64_t master_seed,
                             Simulator simulate, TailMethod method) {
    params.validate();
    ExperimentReport report;
    report.scenario = std::move(scenario);
    report.records.resize(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        report.records[i] = summarize_path(simulate(params, seeds[i]), i, method);
    });
    report.aggregates = aggregate_records(report.records);
    report.provenance = {params, std::string(library_version()), master_seed, method};
    return report;
}

std::vector<std::uint64_t> derived_seeds(std::uint64_t master, std::size_t n) {
    std::vector<std::uint64_t> seeds(n);
    for (std::size_t i = 0; i < n; ++i) {
        seeds[i] = path_seed(master, i);
    }
    return seeds;
}

} // namespace

std::string_view library_version() noexcept { return SPECMARKET_VERSION; }

std::string_view to_string(Table1Column column) noexcept {
    return column == Table1Column::general ? "general" : "speculative";
}

std::optional<Table1Column> parse_table1_column(std::string_view text) noexcept {
    if (text == "general") return Table1Column::general;
    if (text == "speculative") return Table1Column::speculative;
    return std::nullopt;
}

ModelParams table1_params(Table1Column column) {
    return column == Table1Column::general ? table1_general() : table1_speculative();
}

BubbleMetrics bubble_metrics(const SimulationPath& path, double v0) {
    if (path.size() == 0) {
        throw ValidationError("bubble_metrics: empty path");
    }
    if (!(v0 > 0.0)) {
        throw ValidationError("bubble_metrics: v0 must be > 0");
    }
    BubbleMetrics m;
    double best = -std::numeric_limits<double>::infinity();
    double abs_sum = 0.0;
    double p_max = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double gap = path.p[i] - path.v_e[i];
        if (gap > best) {
            best = gap;
            m.peak_period = static_cast<double>(i + 1);
        }
        abs_sum += std::abs(gap);
        p_max = std::max(p_max, path.p[i]);
    }
    m.amplitude = best / v0;
    m.rad = abs_sum / (static_cast<double>(path.size()) * v0);
    m.crash_depth = p_max > 0.0 ? (p_max - path.p.back()) / p_max : 0.0;
    return m;
}

Aggregates aggregate_records(std::span<const SeedRecord> records) {
    std::vector<double> mean_r;
    std::vector<double> std_r;
    std::vector<double> alpha;
    std::vector<double> acf_abs;
    std::vector<double> acf_raw;
    for (const SeedRecord& rec : records) {
        mean_r.push_back(rec.mean_r);
        std_r.push_back(rec.std_r);
        if (rec.tail) {
            alpha.push_back(rec.tail->alpha_hat);
        }
        if (rec.acf) {
            acf_abs.push_back(rec.acf->abs_returns);
            acf_raw.push_back(rec.acf->raw_returns_abs);
        }
    }
    return {aggregate(std::move(mean_r)), aggregate(std::move(std_r)), aggregate(std::move(alpha)),
            aggregate(std::move(acf_abs)), aggregate(std::move(acf_raw))};
}

ExperimentReport reproduce_table1(Table1Column column, std::size_t n_seeds, std::uint64_t master_seed,
                                  TailMethod method) {
    return reproduce_table1(column, table1_params(column), n_seeds, master_seed, method);
}

ExperimentReport reproduce_table1(Table1Column column, const ModelParams& params, std::size_t n_seeds,
                                  std::uint64_t master_seed, TailMethod method) {
    if (n_seeds < 1) {
        throw ValidationError("n_seeds: must be >= 1");
    }
    const Simulator sim = column == Table1Column::general ? &simulate_linear : &simulate_speculative;
    return run_records("table1-" + std::string(to_string(column)), params,
                       derived_seeds(master_seed, n_seeds), master_seed, sim, method);
}

std::optional<double> AlphaHistogram::mode() const {
    std::size_t best = counts.size();
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] > 0 && (best == counts.size() || counts[i] > counts[best])) {
            best = i;
        }
    }
    if (best == counts.size()) {
        return std::nullopt;
    }
    return lo + width * (static_cast<double>(best) + 0.5);
}

AlphaHistogram alpha_histogram(std::span<const double> alphas, double lo, double hi, double width) {
    if (!(width > 0.0) || !(hi > lo)) {
        throw ValidationError("alpha_histogram: need width > 0 and hi > lo");
    }
    AlphaHistogram h;
    h.lo = lo;
    h.width = width;
    h.counts.assign(static_cast<std::size_t>(std::ceil((hi - lo) / width)), 0);
    for (double a : alphas) {
        if (a < lo) {
            continue;
        }
        const auto bin = static_cast<std::size_t>(std::floor((a - lo) / width));
        if (bin >= h.counts.size()) {
            ++h.overflow;
        } else {
            ++h.counts[bin];
        }
    }
    return h;
}

EnsembleAlpha ensemble_alpha(const ModelParams& params, std::size_t n_paths, std::uint64_t master_seed,
                             TailMethod method) {
    if (n_paths < 2) {
        throw ValidationError("n_paths: must be >= 2");
    }
    const std::vector<std::uint64_t> seeds = derived_seeds(master_seed, n_paths);
    EnsembleAlpha out = ensemble_alpha(params, std::span<const std::uint64_t>(seeds), method);
    out.report.provenance.master_seed = master_seed;
    return out;
}

EnsembleAlpha ensemble_alpha(const ModelParams& params, std::span<const std::uint64_t> seeds,
                             TailMethod method) {
    if (seeds.size() < 2) {
        throw ValidationError("n_paths: must be >= 2");
    }
    EnsembleAlpha out;
    out.report = run_records("ensemble-alpha", params, seeds, 0, &simulate_linear, method);
    for (const SeedRecord& rec : out.report.records) {
        if (rec.tail) {
            out.alphas.push_back(rec.tail->alpha_hat);
        } else {
            ++out.diagnostics;
        }
    }
    out.histogram = alpha_histogram(out.alphas);
    return out;
}

std::vector<BubbleCell> bubble_sweep(std::span<const double> mean_nI_values,
                                     std::span<const std::int64_t> T_values, std::size_t n_seeds,
                                     std::uint64_t master_seed, const ModelParams& base) {
    if (mean_nI_values.empty() || T_values.empty()) {
        throw ValidationError("bubble_sweep: empty grid");
    }
    if (n_seeds < 1) {
        throw ValidationError("n_seeds: must be >= 1");
    }
    std::vector<BubbleCell> cells;
    for (double m : mean_nI_values) {
        for (std::int64_t T : T_values) {
            BubbleCell cell;
            cell.mean_nI = m;
            cell.T = T;
            cell.n_seeds = n_seeds;
            cells.push_back(cell);
        }
    }
    std::vector<ModelParams> params(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        params[c] = declining_value(cells[c].T, base);
        params[c].mean_nI = cells[c].mean_nI;
        params[c].validate();
        cells[c].per_seed.resize(n_seeds);
    }
    const std::vector<std::uint64_t> seeds = derived_seeds(master_seed, n_seeds);
    parallel_for(cells.size() * n_seeds, [&](std::size_t job) {
        const std::size_t c = job / n_seeds;
        const std::size_t s = job % n_seeds;
        cells[c].per_seed[s] = bubble_metrics(simulate_linear(params[c], seeds[s]), params[c].v0);
    });
    for (BubbleCell& cell : cells) {
        const auto n = static_cast<double>(n_seeds);
        for (const BubbleMetrics& m : cell.per_seed) {
            cell.mean.amplitude += m.amplitude / n;
            cell.mean.rad += m.rad / n;
            cell.mean.peak_period += m.peak_period / n;
            cell.mean.crash_depth += m.crash_depth / n;
        }
    }
    return cells;
}

CrashTailResult crash_tail(std::size_t n_sessions, std::int64_t T, std::uint64_t seed,
                           const ModelParams& base, TailMethod method) {
    return pooled_tail(declining_value(T, base), n_sessions, seed, method);
}

CrashTailResult pooled_tail(const ModelParams& session, std::size_t n_sessions, std::uint64_t seed,
                            TailMethod method) {
    session.validate();
    if (n_sessions < 1) {
        throw ValidationError("n_sessions: must be >= 1");
    }
    const std::size_t pooled = n_sessions * static_cast<std::size_t>(session.T);
    if (pooled < kMinPooledReturns) {
        throw InsufficientTail("crash_tail: " + std::to_string(pooled) + " pooled returns, need " +
                               std::to_string(kMinPooledReturns));
    }
    const std::vector<std::uint64_t> seeds = derived_seeds(seed, n_sessions);
    std::vector<SimulationPath> paths(n_sessions);
    parallel_for(n_sessions, [&](std::size_t i) { paths[i] = simulate_linear(session, seeds[i]); });
    std::vector<double> magnitude;
    magnitude.reserve(pooled);
    for (const SimulationPath& p : paths) {
        for (double r : p.r) {
            magnitude.push_back(std::abs(r));
        }
    }
    return {fit_tail(magnitude, method), n_sessions, pooled};
}

} // namespace specmarket
