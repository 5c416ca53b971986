#include "specmarket/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <system_error>


namespace specmarket {

ConfigError::ConfigError(std::string key, std::size_t line, const std::string& what)
    : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + key + ": " + what : key + ": " + what),
      key_(std::move(key)),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    if (trim(s).empty()) {
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    std::size_t line;
};

class Reader {
public:
    Reader(const Entry& e) : e_(e) {}

    double real() const {
        double v = 0.0;
        parse_number(e_.value, v, "a real number");
        if (!std::isfinite(v)) {
            fail("expected a finite real number, got '" + e_.value + "'");
        }
        return v;
    }

    template <class Int>
    Int integer() const {
        Int v = 0;
        parse_number(e_.value, v, "an integer");
        return v;
    }

    bool boolean() const {
        if (e_.value == "true") return true;
        if (e_.value == "false") return false;
        fail("expected true or false, got '" + e_.value + "'");
    }

    std::vector<double> reals() const {
        std::vector<double> out;
        for (std::string_view item : split_list(e_.value)) {
            double v = 0.0;
            parse_number(item, v, "a comma-separated list of real numbers");
            out.push_back(v);
        }
        return out;
    }

    std::vector<std::int64_t> integers() const {
        std::vector<std::int64_t> out;
        for (std::string_view item : split_list(e_.value)) {
            std::int64_t v = 0;
            parse_number(item, v, "a comma-separated list of integers");
            out.push_back(v);
        }
        return out;
    }

    const std::string& text() const { return e_.value; }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(e_.key, e_.line, what); }

    void require(bool ok, const std::string& what) const {
        if (!ok) {
            fail(what);
        }
    }

private:
    template <class T>
    void parse_number(std::string_view text, T& out, const char* expected) const {
        const char* first = text.data();
        const char* last = text.data() + text.size();
        if (!text.empty() && text.front() == '+') {
            ++first;
        }
        const auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec == std::errc::result_out_of_range) {
            fail("value '" + std::string(text) + "' out of range");
        }
        if (ec != std::errc() || ptr != last || text.empty()) {
            fail("expected " + std::string(expected) + ", got '" + std::string(text) + "'");
        }
    }

    const Entry& e_;
};

template <class Int>
std::string format_int(Int v) {
    return std::to_string(v);
}

template <class T, class F>
std::string join(const std::vector<T>& v, F fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += fmt(v[i]);
    }
    return out;
}

struct Field {
    const char* section;
    const char* key;
    std::function<void(RunConfig&, const Reader&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define REAL_FIELD(sec, name, member)                                                  \
    Field {                                                                            \
        sec, #name, [](RunConfig& c, const Reader& r) { c.member = r.real(); },        \
            [](const RunConfig& c) { return format_double(c.member); }                 \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"", "scenario", [](RunConfig& c, const Reader& r) { c.scenario = r.text(); },
         [](const RunConfig& c) { return c.scenario; }},
        REAL_FIELD("model", rho, model.rho),
        REAL_FIELD("model", gamma, model.gamma),
        REAL_FIELD("model", mu_I, model.mu_I),
        REAL_FIELD("model", mu_II, model.mu_II),
        REAL_FIELD("model", mean_nI, model.mean_nI),
        REAL_FIELD("model", mean_nII, model.mean_nII),
        REAL_FIELD("model", std_eps_d, model.std_eps_d),
        REAL_FIELD("model", std_eps_I, model.std_eps_I),
        REAL_FIELD("model", mean_eps_I, model.mean_eps_I),
        REAL_FIELD("model", std_eps_II, model.std_eps_II),
        REAL_FIELD("model", prob_news, model.prob_news),
        {"model", "T", [](RunConfig& c, const Reader& r) { c.model.T = r.integer<std::int64_t>(); },
         [](const RunConfig& c) { return format_int(c.model.T); }},
        REAL_FIELD("model", p0, model.p0),
        REAL_FIELD("model", v0, model.v0),
        REAL_FIELD("model", d0, model.d0),
        REAL_FIELD("model", de0, model.de0),
        REAL_FIELD("model", r1e, model.r1e),
        {"model", "dividend_mode",
         [](RunConfig& c, const Reader& r) {
             const auto m = parse_dividend_mode(r.text());
             r.require(m.has_value(), "expected random-walk or discrete-uniform, got '" + r.text() + "'");
             c.model.dividend_mode = *m;
         },
         [](const RunConfig& c) { return std::string(to_string(c.model.dividend_mode)); }},
        {"model", "dividend_set", [](RunConfig& c, const Reader& r) { c.model.dividend_set = r.reals(); },
         [](const RunConfig& c) { return join(c.model.dividend_set, format_double); }},
        REAL_FIELD("model", price_floor_ratio, model.price_floor_ratio),
        {"model", "mispricing",
         [](RunConfig& c, const Reader& r) {
             const auto m = parse_mispricing(r.text());
             r.require(m.has_value(), "expected implicit or lagged, got '" + r.text() + "'");
             c.model.mispricing = *m;
         },
         [](const RunConfig& c) { return std::string(to_string(c.model.mispricing)); }},
        {"experiment", "n_seeds",
         [](RunConfig& c, const Reader& r) {
             c.experiment.n_seeds = r.integer<std::size_t>();
             r.require(c.experiment.n_seeds >= 1, "must be >= 1");
         },
         [](const RunConfig& c) { return format_int(c.experiment.n_seeds); }},
        {"experiment", "master_seed",
         [](RunConfig& c, const Reader& r) { c.experiment.master_seed = r.integer<std::uint64_t>(); },
         [](const RunConfig& c) { return format_int(c.experiment.master_seed); }},
        {"experiment", "column",
         [](RunConfig& c, const Reader& r) {
             r.require(r.text() == "general" || r.text() == "speculative",
                       "expected general or speculative, got '" + r.text() + "'");
             c.experiment.column = r.text();
         },
         [](const RunConfig& c) { return c.experiment.column; }},
        {"experiment", "tail_method",
         [](RunConfig& c, const Reader& r) {
             if (r.text() == "least-squares") {
                 c.experiment.tail_method = TailMethod::least_squares;
             } else if (r.text() == "mle") {
                 c.experiment.tail_method = TailMethod::mle;
             } else {
                 r.fail("expected least-squares or mle, got '" + r.text() + "'");
             }
         },
         [](const RunConfig& c) { return std::string(to_string(c.experiment.tail_method)); }},
        {"experiment", "sweep_mean_nI",
         [](RunConfig& c, const Reader& r) {
             c.experiment.sweep_mean_nI = r.reals();
             r.require(!c.experiment.sweep_mean_nI.empty(), "must list at least one value");
             for (double v : c.experiment.sweep_mean_nI) {
                 r.require(std::isfinite(v) && v >= 0.0, "entries must be finite and >= 0");
             }
         },
         [](const RunConfig& c) { return join(c.experiment.sweep_mean_nI, format_double); }},
        {"experiment", "sweep_T",
         [](RunConfig& c, const Reader& r) {
             c.experiment.sweep_T = r.integers();
             r.require(!c.experiment.sweep_T.empty(), "must list at least one value");
             for (std::int64_t v : c.experiment.sweep_T) {
                 r.require(v >= 1, "entries must be >= 1");
             }
         },
         [](const RunConfig& c) { return join(c.experiment.sweep_T, format_int<std::int64_t>); }},
        {"experiment", "sessions",
         [](RunConfig& c, const Reader& r) {
             c.experiment.sessions = r.integer<std::size_t>();
             r.require(c.experiment.sessions >= 1, "must be >= 1");
         },
         [](const RunConfig& c) { return format_int(c.experiment.sessions); }},
        {"experiment", "session_T",
         [](RunConfig& c, const Reader& r) {
             c.experiment.session_T = r.integer<std::int64_t>();
             r.require(c.experiment.session_T >= 1, "must be >= 1");
         },
         [](const RunConfig& c) { return format_int(c.experiment.session_T); }},
        {"experiment", "max_lag",
         [](RunConfig& c, const Reader& r) {
             c.experiment.max_lag = r.integer<std::size_t>();
             r.require(c.experiment.max_lag >= 1, "must be >= 1");
         },
         [](const RunConfig& c) { return format_int(c.experiment.max_lag); }},
        {"output", "directory",
         [](RunConfig& c, const Reader& r) {
             r.require(!r.text().empty(), "must not be empty");
             c.output.directory = r.text();
         },
         [](const RunConfig& c) { return c.output.directory; }},
        {"output", "csv", [](RunConfig& c, const Reader& r) { c.output.csv = r.boolean(); },
         [](const RunConfig& c) { return std::string(c.output.csv ? "true" : "false"); }},
        {"output", "json", [](RunConfig& c, const Reader& r) { c.output.json = r.boolean(); },
         [](const RunConfig& c) { return std::string(c.output.json ? "true" : "false"); }},
        {"output", "svg", [](RunConfig& c, const Reader& r) { c.output.svg = r.boolean(); },
         [](const RunConfig& c) { return std::string(c.output.svg ? "true" : "false"); }},
    };
    return table;
}

#undef REAL_FIELD

const Field* find_field(std::string_view section, std::string_view key) {
    for (const Field& f : fields()) {
        if (section == f.section && key == f.key) {
            return &f;
        }
    }
    return nullptr;
}

constexpr std::array<std::string_view, 3> kSections{"model", "experiment", "output"};

} // namespace

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) {
        throw ValidationError("format_double: conversion failed");
    }
    return std::string(buf.data(), ptr);
}

RunConfig parse_config(std::string_view text) {
    std::vector<Entry> entries;
    std::optional<Entry> preset;
    std::map<std::string, std::size_t> seen;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(std::string(line), line_no, "malformed section header");
            }
            const std::string name(trim(line.substr(1, line.size() - 2)));
            bool known = false;
            for (std::string_view s : kSections) {
                known = known || s == name;
            }
            if (!known) {
                throw ConfigError(name, line_no, "unknown section");
            }
            section = name;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), line_no, "expected key = value");
        }
        Entry e{section, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
        if (e.key.empty()) {
            throw ConfigError("", line_no, "missing key before '='");
        }
        const std::string qualified = section.empty() ? e.key : section + "." + e.key;
        if (const auto it = seen.find(qualified); it != seen.end()) {
            throw ConfigError(e.key, line_no, "duplicate key (first set on line " + std::to_string(it->second) + ")");
        }
        seen.emplace(qualified, line_no);
        if (section.empty() && e.key == "preset") {
            preset = e;
            continue;
        }
        if (find_field(section, e.key) == nullptr) {
            throw ConfigError(e.key, line_no,
                              section.empty() ? "unknown top-level key" : "unknown key in [" + section + "]");
        }
        entries.push_back(std::move(e));
    }

    RunConfig config;
    if (preset) {
        if (preset->value == "general") {
            config.model = table1_general();
        } else if (preset->value == "speculative") {
            config.model = table1_speculative();
        } else {
            throw ConfigError("preset", preset->line,
                              "expected general or speculative, got '" + preset->value + "'");
        }
    }
    std::map<std::string, std::size_t> model_lines;
    for (const Entry& e : entries) {
        find_field(e.section, e.key)->set(config, Reader(e));
        if (e.section == "model") {
            model_lines[e.key] = e.line;
        }
    }
    try {
        config.model.validate();
    } catch (const ValidationError& err) {
        const std::string msg = err.what();
        const std::string key = msg.substr(0, msg.find(':'));
        const auto it = model_lines.find(key);
        const std::string detail = msg.size() > key.size() + 2 ? msg.substr(key.size() + 2) : msg;
        throw ConfigError(key, it == model_lines.end() ? 0 : it->second, detail);
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw ValidationError("config: cannot open " + file.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    std::string current = "";
    for (const Field& f : fields()) {
        if (current != f.section) {
            current = f.section;
            out += "\n[" + current + "]\n";
        }
        out += std::string(f.key) + " = " + f.get(config) + "\n";
    }
    return out;
}

} // namespace specmarket
