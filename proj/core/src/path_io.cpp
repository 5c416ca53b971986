#include "specmarket/path_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "specmarket/errors.hpp"

namespace specmarket {

using Json = nlohmann::ordered_json;

namespace {

Json tail_json(const TailFit& fit) {
    return Json{{"alpha_hat", fit.alpha_hat},
                {"x_min", fit.x_min},
                {"n_tail", fit.n_tail},
                {"ks", fit.ks},
                {"method", std::string(to_string(fit.method))}};
}

Json params_json(const ModelParams& p) {
    return Json{{"rho", p.rho},
                {"gamma", p.gamma},
                {"mu_I", p.mu_I},
                {"mu_II", p.mu_II},
                {"mean_nI", p.mean_nI},
                {"mean_nII", p.mean_nII},
                {"std_eps_d", p.std_eps_d},
                {"std_eps_I", p.std_eps_I},
                {"mean_eps_I", p.mean_eps_I},
                {"std_eps_II", p.std_eps_II},
                {"prob_news", p.prob_news},
                {"T", p.T},
                {"p0", p.p0},
                {"v0", p.v0},
                {"d0", p.d0},
                {"de0", p.de0},
                {"r1e", p.r1e},
                {"dividend_mode", std::string(to_string(p.dividend_mode))},
                {"dividend_set", p.dividend_set},
                {"price_floor_ratio", p.price_floor_ratio},
                {"mispricing", std::string(to_string(p.mispricing))}};
}

Json stat_json(const AggregateStat& s) {
    return Json{{"median", s.median}, {"iqr", s.iqr}, {"count", s.count}};
}

Json bubble_json(const BubbleMetrics& m) {
    return Json{{"amplitude", m.amplitude},
                {"rad", m.rad},
                {"peak_period", m.peak_period},
                {"crash_depth", m.crash_depth}};
}

Json report_json(const ExperimentReport& report) {
    Json records = Json::array();
    for (const SeedRecord& rec : report.records) {
        Json j{{"index", rec.index}, {"seed", rec.seed}, {"mean_r", rec.mean_r}, {"std_r", rec.std_r}};
        j["tail"] = rec.tail ? tail_json(*rec.tail) : Json(nullptr);
        if (!rec.tail_error.empty()) {
            j["tail_error"] = rec.tail_error;
        }
        j["acf"] = rec.acf ? Json{{"abs_returns", rec.acf->abs_returns},
                                  {"raw_returns_abs", rec.acf->raw_returns_abs}}
                           : Json(nullptr);
        if (rec.bubble) {
            j["bubble"] = bubble_json(*rec.bubble);
        }
        records.push_back(std::move(j));
    }
    const Aggregates& a = report.aggregates;
    return Json{{"scenario", report.scenario},
                {"provenance",
                 {{"version", report.provenance.version},
                  {"master_seed", report.provenance.master_seed},
                  {"tail_method", std::string(to_string(report.provenance.tail_method))},
                  {"params", params_json(report.provenance.params)}}},
                {"aggregates",
                 {{"mean_r", stat_json(a.mean_r)},
                  {"std_r", stat_json(a.std_r)},
                  {"alpha_hat", stat_json(a.alpha_hat)},
                  {"acf_abs", stat_json(a.acf_abs)},
                  {"acf_raw", stat_json(a.acf_raw)}}},
                {"records", std::move(records)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string_view next_field(std::string_view& row) {
    const auto comma = row.find(',');
    std::string_view field = row.substr(0, comma);
    row = comma == std::string_view::npos ? std::string_view{} : row.substr(comma + 1);
    return field;
}

template <class T>
T parse_field(std::string_view field, std::size_t line) {
    T v{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw ValidationError("path csv line " + std::to_string(line) + ": bad field '" + std::string(field) + "'");
    }
    return v;
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

} // namespace

std::string_view to_string(OutputFormat format) noexcept {
    switch (format) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::svg: return "svg";
    }
    return "csv";
}

std::optional<OutputFormat> parse_output_format(std::string_view text) noexcept {
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    if (text == "svg") return OutputFormat::svg;
    return std::nullopt;
}

std::string path_to_csv(const SimulationPath& path) {
    std::string out(kPathCsvHeader);
    out += '\n';
    for (std::size_t i = 0; i < path.size(); ++i) {
        out += std::to_string(i + 1);
        for (double v : {path.p[i], path.r[i], path.d[i], path.d_e[i], path.v_e[i], path.r_e[i],
                         path.n_I[i], path.n_II[i]}) {
            out += ',';
            out += format_double(v);
        }
        out += ',';
        out += path.news[i] ? '1' : '0';
        out += '\n';
    }
    return out;
}

SimulationPath path_from_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (!line.empty()) {
            lines.push_back(line);
        }
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
    }
    if (lines.empty() || lines.front() != kPathCsvHeader) {
        throw ValidationError("path csv: header must be '" + std::string(kPathCsvHeader) + "'");
    }
    SimulationPath path(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string_view row = lines[i];
        const auto t = parse_field<std::size_t>(next_field(row), i + 1);
        if (t != i) {
            throw ValidationError("path csv line " + std::to_string(i + 1) + ": periods must run 1..T");
        }
        const std::size_t k = i - 1;
        for (std::vector<double>* col : {&path.p, &path.r, &path.d, &path.d_e, &path.v_e, &path.r_e,
                                         &path.n_I, &path.n_II}) {
            (*col)[k] = parse_field<double>(next_field(row), i + 1);
        }
        const auto news = parse_field<unsigned>(next_field(row), i + 1);
        if (news > 1 || !row.empty()) {
            throw ValidationError("path csv line " + std::to_string(i + 1) + ": bad news flag or extra fields");
        }
        path.news[k] = static_cast<std::uint8_t>(news);
    }
    return path;
}

std::string path_to_json(const SimulationPath& path) {
    Json j{{"seed", path.seed},
           {"p0", path.p0},
           {"p", path.p},
           {"r", path.r},
           {"d", path.d},
           {"d_e", path.d_e},
           {"v_e", path.v_e},
           {"r_e", path.r_e},
           {"n_I", path.n_I},
           {"n_II", path.n_II},
           {"news", path.news},
           {"clamped", path.clamped}};
    return dump(j);
}

std::string report_to_json(const ExperimentReport& report) { return dump(report_json(report)); }

std::string report_to_csv(const ExperimentReport& report) {
    std::string out = "index,seed,mean_r,std_r,alpha_hat,x_min,n_tail,ks,acf_abs,acf_raw_abs\n";
    for (const SeedRecord& rec : report.records) {
        out += std::to_string(rec.index) + ',' + std::to_string(rec.seed) + ',' + format_double(rec.mean_r) +
               ',' + format_double(rec.std_r) + ',';
        if (rec.tail) {
            out += format_double(rec.tail->alpha_hat) + ',' + format_double(rec.tail->x_min) + ',' +
                   std::to_string(rec.tail->n_tail) + ',' + format_double(rec.tail->ks);
        } else {
            out += ",,,";
        }
        out += ',' + opt_double(rec.acf ? std::optional(rec.acf->abs_returns) : std::nullopt);
        out += ',' + opt_double(rec.acf ? std::optional(rec.acf->raw_returns_abs) : std::nullopt);
        out += '\n';
    }
    return out;
}

std::string ensemble_to_json(const EnsembleAlpha& ensemble) {
    Json j = report_json(ensemble.report);
    const auto mode = ensemble.histogram.mode();
    j["alphas"] = ensemble.alphas;
    j["diagnostics"] = ensemble.diagnostics;
    j["histogram"] = Json{{"lo", ensemble.histogram.lo},
                          {"width", ensemble.histogram.width},
                          {"counts", ensemble.histogram.counts},
                          {"overflow", ensemble.histogram.overflow},
                          {"mode", mode ? Json(*mode) : Json(nullptr)}};
    return dump(j);
}

std::string bubble_sweep_to_json(std::span<const BubbleCell> cells, const RunConfig& config) {
    Json arr = Json::array();
    for (const BubbleCell& c : cells) {
        Json per = Json::array();
        for (const BubbleMetrics& m : c.per_seed) {
            per.push_back(bubble_json(m));
        }
        arr.push_back(Json{{"mean_nI", c.mean_nI},
                           {"T", c.T},
                           {"n_seeds", c.n_seeds},
                           {"mean", bubble_json(c.mean)},
                           {"per_seed", std::move(per)}});
    }
    Json j{{"scenario", "bubble-sweep"},
           {"provenance",
            {{"version", std::string(library_version())},
             {"master_seed", config.experiment.master_seed},
             {"params", params_json(config.model)}}},
           {"cells", std::move(arr)}};
    return dump(j);
}

std::string bubble_sweep_to_csv(std::span<const BubbleCell> cells) {
    std::string out = "mean_nI,T,n_seeds,amplitude,rad,peak_period,crash_depth\n";
    for (const BubbleCell& c : cells) {
        out += format_double(c.mean_nI) + ',' + std::to_string(c.T) + ',' + std::to_string(c.n_seeds) + ',' +
               format_double(c.mean.amplitude) + ',' + format_double(c.mean.rad) + ',' +
               format_double(c.mean.peak_period) + ',' + format_double(c.mean.crash_depth) + '\n';
    }
    return out;
}

std::string tail_fit_to_json(const TailFit& fit) { return dump(tail_json(fit)); }

std::string crash_tail_to_json(const CrashTailResult& result, const ModelParams& session) {
    Json j{{"scenario", "crash-tail"},
           {"sessions", result.sessions},
           {"pooled", result.pooled},
           {"fit", tail_json(result.fit)},
           {"provenance", {{"version", std::string(library_version())}, {"params", params_json(session)}}}};
    return dump(j);
}

std::string kesten_root_to_json(const KestenRoot& root) {
    Json j{{"mean_n", root.mean_n},
           {"alpha_star", root.alpha_star ? Json(*root.alpha_star) : Json(nullptr)},
           {"residual", root.residual},
           {"log_moment", root.log_moment},
           {"stationary", root.log_moment < 0.0}};
    return dump(j);
}

std::string acf_to_json(const AcfResult& acf) {
    Json j{{"transform", std::string(to_string(acf.transform))},
           {"lags", acf.lags},
           {"values", acf.values},
           {"abs_sum", acf.abs_sum()}};
    return dump(j);
}

std::string acf_to_csv(const AcfResult& acf) {
    std::string out = "lag,acf\n";
    for (std::size_t i = 0; i < acf.lags.size(); ++i) {
        out += std::to_string(acf.lags[i]) + ',' + format_double(acf.values[i]) + '\n';
    }
    return out;
}

std::string params_to_json(const ModelParams& params) { return dump(params_json(params)); }

void write_text_file(const std::filesystem::path& file, std::string_view text) {
    std::error_code ec;
    if (file.has_parent_path()) {
        std::filesystem::create_directories(file.parent_path(), ec);
        if (ec) {
            throw DiagnosticError("cannot create directory " + file.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DiagnosticError("cannot open " + file.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw DiagnosticError("write failed for " + file.string());
    }
}

std::string read_text_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open " + file.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void export_path(const SimulationPath& path, OutputFormat format, const std::filesystem::path& file) {
    switch (format) {
    case OutputFormat::csv: write_text_file(file, path_to_csv(path)); return;
    case OutputFormat::json: write_text_file(file, path_to_json(path)); return;
    case OutputFormat::svg: break;
    }
    throw ValidationError("export_path: paths are exported as csv or json; use render for svg");
}

} // namespace specmarket
