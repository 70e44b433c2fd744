#pragma once

// Run configuration: an INI-style document with four sections.
//
//   [model]       alpha, r, a, lambda, k                      (all required)
//   [grid]        x_max (required), x_step, r_step             (optional; absent = default)
//   [simulation]  x0, R0, n_paths, horizon, base_seed, time_points, threads   (all optional)
//   [output]      directory                                     (optional)
//
// Lines are `key = value`; `#` and `;` start comments. Unknown sections and keys are rejected.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hotelling/errors.hpp"
#include "hotelling/model.hpp"

namespace hotelling {

struct SimulationBlock {
    std::optional<double> x0;  ///< default: x_max
    std::optional<double> r0;  ///< default: midway between R*(x0) and R*(0)
    std::size_t n_paths = 1000;
    double horizon = 100.0;
    std::uint64_t base_seed = 1;
    std::size_t time_points = 200;  ///< intervals of the sampling grid
    unsigned threads = 0;
};

struct RunConfig {
    ModelParams model;
    double x_max = 1.0;
    std::optional<double> x_step;
    std::optional<double> r_step;
    SimulationBlock simulation;
    std::string output_directory = "out";

    bool operator==(const RunConfig& o) const {
        return model.alpha == o.model.alpha && model.r == o.model.r && model.a == o.model.a &&
               model.lambda == o.model.lambda && model.k == o.model.k && x_max == o.x_max && x_step == o.x_step &&
               r_step == o.r_step && simulation.x0 == o.simulation.x0 && simulation.r0 == o.simulation.r0 &&
               simulation.n_paths == o.simulation.n_paths && simulation.horizon == o.simulation.horizon &&
               simulation.base_seed == o.simulation.base_seed && simulation.time_points == o.simulation.time_points &&
               simulation.threads == o.simulation.threads && output_directory == o.output_directory;
    }
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view text, int line, const std::string& field) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError("'" + field + "' expects a number, got '" + std::string(text) + "'", line, field);
    }
    return v;
}

template <class Int>
Int parse_integer(std::string_view text, int line, const std::string& field) {
    Int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError("'" + field + "' expects a non-negative integer, got '" + std::string(text) + "'", line,
                         field);
    }
    return v;
}

}  // namespace detail

/// Parses and validates a configuration. Model checks from validate() are applied; AdmissibilityError
/// and DomainError propagate unchanged.
inline RunConfig parse_config(std::string_view text) {
    struct Entry {
        std::string value;
        int line;
    };
    static const std::map<std::string, std::vector<std::string>> schema = {
        {"model", {"alpha", "r", "a", "lambda", "k"}},
        {"grid", {"x_max", "x_step", "r_step"}},
        {"simulation", {"x0", "R0", "n_paths", "horizon", "base_seed", "time_points", "threads"}},
        {"output", {"directory"}},
    };
    static const std::vector<std::string> required = {"model.alpha", "model.r", "model.a", "model.lambda", "model.k",
                                                      "grid.x_max"};

    std::map<std::string, Entry> entries;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        if (const auto c = s.find_first_of("#;"); c != std::string_view::npos) s = s.substr(0, c);
        s = detail::trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError("unterminated section header", line);
            section = std::string(detail::trim(s.substr(1, s.size() - 2)));
            if (!schema.count(section)) throw ParseError("unknown section [" + section + "]", line, section);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line);
        const std::string key(detail::trim(s.substr(0, eq)));
        const std::string_view value = detail::trim(s.substr(eq + 1));
        if (section.empty()) throw ParseError("key '" + key + "' appears before any section", line, key);
        const auto& keys = schema.at(section);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ParseError("unknown key '" + key + "' in [" + section + "]", line, section + "." + key);
        }
        const std::string full = section + "." + key;
        if (entries.count(full)) throw ParseError("duplicate key '" + full + "'", line, full);
        if (value.empty()) throw ParseError("key '" + full + "' has no value", line, full);
        entries[full] = {std::string(value), line};
    }

    std::vector<std::string> missing;
    for (const auto& k : required) {
        if (!entries.count(k)) missing.push_back(k);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
        throw ParseError("missing required keys: " + list, 0, missing.front());
    }

    auto num = [&](const std::string& k) {
        const auto& e = entries.at(k);
        return detail::parse_double(e.value, e.line, k);
    };
    auto opt = [&](const std::string& k) -> std::optional<double> {
        if (!entries.count(k)) return std::nullopt;
        return num(k);
    };
    auto positive = [&](const std::string& k, double v) {
        if (!(v > 0.0)) throw ParseError("'" + k + "' must be positive", entries.at(k).line, k);
    };

    RunConfig cfg;
    cfg.model = validate(num("model.alpha"), num("model.r"), num("model.a"), num("model.lambda"), num("model.k"));
    cfg.x_max = num("grid.x_max");
    if (!(cfg.x_max >= 0.0)) throw ParseError("'grid.x_max' must be non-negative", entries.at("grid.x_max").line,
                                              "grid.x_max");
    cfg.x_step = opt("grid.x_step");
    if (cfg.x_step) positive("grid.x_step", *cfg.x_step);
    cfg.r_step = opt("grid.r_step");
    if (cfg.r_step) positive("grid.r_step", *cfg.r_step);

    auto& sim = cfg.simulation;
    sim.x0 = opt("simulation.x0");
    if (sim.x0 && (*sim.x0 < 0.0 || *sim.x0 > cfg.x_max)) {
        throw ParseError("'simulation.x0' must lie in [0, x_max]", entries.at("simulation.x0").line, "simulation.x0");
    }
    sim.r0 = opt("simulation.R0");
    if (sim.r0 && *sim.r0 < 0.0) {
        throw ParseError("'simulation.R0' must be non-negative", entries.at("simulation.R0").line, "simulation.R0");
    }
    auto integer = [&](const std::string& k, auto fallback) {
        using T = decltype(fallback);
        if (!entries.count(k)) return fallback;
        const auto& e = entries.at(k);
        return detail::parse_integer<T>(e.value, e.line, k);
    };
    sim.n_paths = integer("simulation.n_paths", sim.n_paths);
    if (auto h = opt("simulation.horizon")) {
        positive("simulation.horizon", *h);
        sim.horizon = *h;
    }
    sim.base_seed = integer("simulation.base_seed", sim.base_seed);
    sim.time_points = integer("simulation.time_points", sim.time_points);
    if (sim.time_points == 0) {
        throw ParseError("'simulation.time_points' must be at least 1", entries.at("simulation.time_points").line,
                         "simulation.time_points");
    }
    sim.threads = integer("simulation.threads", sim.threads);
    if (entries.count("output.directory")) cfg.output_directory = entries.at("output.directory").value;
    return cfg;
}

/// Writes a document that parse_config reads back to an equal RunConfig.
inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[model]\n"
        << "alpha = " << format_double(cfg.model.alpha) << "\n"
        << "r = " << format_double(cfg.model.r) << "\n"
        << "a = " << format_double(cfg.model.a) << "\n"
        << "lambda = " << format_double(cfg.model.lambda) << "\n"
        << "k = " << format_double(cfg.model.k) << "\n\n"
        << "[grid]\n"
        << "x_max = " << format_double(cfg.x_max) << "\n";
    if (cfg.x_step) out << "x_step = " << format_double(*cfg.x_step) << "\n";
    if (cfg.r_step) out << "r_step = " << format_double(*cfg.r_step) << "\n";
    const auto& sim = cfg.simulation;
    out << "\n[simulation]\n";
    if (sim.x0) out << "x0 = " << format_double(*sim.x0) << "\n";
    if (sim.r0) out << "R0 = " << format_double(*sim.r0) << "\n";
    out << "n_paths = " << sim.n_paths << "\n"
        << "horizon = " << format_double(sim.horizon) << "\n"
        << "base_seed = " << sim.base_seed << "\n"
        << "time_points = " << sim.time_points << "\n"
        << "threads = " << sim.threads << "\n\n"
        << "[output]\n"
        << "directory = " << cfg.output_directory << "\n";
    return out.str();
}

}  // namespace hotelling
