#pragma once

// CSV exports (header row, '.' decimals, shortest round-trip doubles, '\n' line ends) and JSON
// metadata sidecars.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hotelling/config.hpp"
#include "hotelling/errors.hpp"
#include "hotelling/monte_carlo.hpp"
#include "hotelling/solver.hpp"
#include "hotelling/strategy.hpp"

namespace hotelling {

inline constexpr std::string_view artifact_version = "0.1.0";
inline constexpr int schema_version = 1;

class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string_view> columns) : out_(out) {
        bool first = true;
        for (auto c : columns) {
            out_ << (first ? "" : ",") << c;
            first = false;
        }
        out_ << '\n';
    }

    CsvWriter& cell(double v) { return raw(format_double(v)); }
    CsvWriter& cell(std::string_view s) { return raw(s); }
    CsvWriter& cell(long long v) { return raw(std::to_string(v)); }
    CsvWriter& cell(std::size_t v) { return raw(std::to_string(v)); }
    CsvWriter& cell(int v) { return raw(std::to_string(v)); }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    CsvWriter& raw(std::string_view s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }

    std::ostream& out_;
    bool first_ = true;
};

inline nlohmann::ordered_json params_json(const ModelParams& p) {
    nlohmann::ordered_json j;
    j["alpha"] = p.alpha;
    j["r"] = p.r;
    j["a"] = p.a;
    j["lambda"] = p.lambda;
    j["k"] = p.k;
    j["epsilon"] = p.derived.epsilon;
    j["c_star"] = p.derived.c_star;
    return j;
}

inline nlohmann::ordered_json grid_json(const SolverGrid& g) {
    nlohmann::ordered_json j;
    j["x_max"] = g.x_max();
    j["x_step"] = g.x_step;
    j["x_nodes"] = g.n_x();
    j["r_step"] = g.r_step;
    j["r_max"] = g.r_max();
    j["r_nodes"] = g.n_r;
    return j;
}

/// Metadata common to every export.
inline nlohmann::ordered_json sidecar(std::string_view table, std::initializer_list<std::string_view> columns,
                                      const ModelParams& p, const SolverGrid& g) {
    nlohmann::ordered_json j;
    j["table"] = table;
    j["artifact_version"] = artifact_version;
    j["schema_version"] = schema_version;
    j["columns"] = nlohmann::ordered_json::array();
    for (auto c : columns) j["columns"].push_back(c);
    j["params"] = params_json(p);
    j["grid"] = grid_json(g);
    return j;
}

/// Surface table: (x, R, V, MV, region, price) over the x nodes and the reserve nodes up to r_max.
/// price is inf at R = 0.
inline void write_surface_csv(std::ostream& out, const ValueSurface& s) {
    CsvWriter w(out, {"x", "R", "V", "MV", "region", "price"});
    const auto& g = s.grid();
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        const auto v = s.v_row(i);
        const auto mv = s.mv_row(i);
        for (std::size_t j = 0; j < g.n_r; ++j) {
            const double R = g.r_node(j);
            const bool explore = s.in_exploration_region(i, R);
            const double price = R > 0.0 ? s.row_price(i, R) : std::numeric_limits<double>::infinity();
            w.cell(g.x_nodes[i]).cell(R).cell(v[j]).cell(mv[j]).cell(explore ? "E" : "C").cell(price);
            w.end_row();
        }
    }
}

/// Frontier table: (x, r_star, p_star); the x = 0 row carries R*(0) and U'(R*(0)).
inline void write_frontier_csv(std::ostream& out, const ValueSurface& s) {
    CsvWriter w(out, {"x", "r_star", "p_star"});
    const auto& f = s.frontier();
    for (std::size_t i = 0; i < f.size(); ++i) {
        w.cell(f.x_nodes[i]).cell(f.r_star[i]).cell(f.p_star[i]);
        w.end_row();
    }
}

inline void write_events_csv(std::ostream& out, const Path& path) {
    CsvWriter w(out, {"index", "kind", "time", "x_before", "x_after", "r_before", "r_after", "finds", "price_before",
                      "price_after", "discounted_cost"});
    for (std::size_t i = 0; i < path.events.size(); ++i) {
        const auto& e = path.events[i];
        w.cell(i).cell(to_string(e.kind)).cell(e.time).cell(e.x_before).cell(e.x_after).cell(e.r_before);
        w.cell(e.r_after).cell(e.finds).cell(e.price_before).cell(e.price_after).cell(e.cost);
        w.end_row();
    }
}

inline void write_series_csv(std::ostream& out, const std::vector<PathSample>& samples) {
    CsvWriter w(out, {"time", "price", "reserves", "explored_area", "consumption_rate", "exhausted"});
    for (const auto& s : samples) {
        w.cell(s.time).cell(s.price).cell(s.reserves).cell(s.explored_area).cell(s.consumption_rate);
        w.cell(s.exhausted ? 1 : 0);
        w.end_row();
    }
}

/// Long-format ensemble statistics: (time, statistic, value, stderr). stderr is nan where not defined.
inline void write_stats_csv(std::ostream& out, const Ensemble& e) {
    const auto& st = e.stats;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CsvWriter w(out, {"time", "statistic", "value", "stderr"});
    for (std::size_t m = 0; m < st.times.size(); ++m) {
        const double t = st.times[m];
        auto row = [&](std::string_view name, double value, double se) {
            w.cell(t).cell(name).cell(value).cell(se);
            w.end_row();
        };
        row("hotelling_reference", e.p0 * std::exp(e.r * t), nan);
        row("mean_price", st.mean_price[m], st.se_price[m]);
        row("mean_price_conditional", st.mean_price_conditional[m], st.se_price_conditional[m]);
        row("mean_price_exhausted", st.mean_price_exhausted[m], nan);
        row("price_q05", st.q05[m], nan);
        row("price_q25", st.q25[m], nan);
        row("price_q50", st.q50[m], nan);
        row("price_q75", st.q75[m], nan);
        row("price_q95", st.q95[m], nan);
        row("mean_reserves", st.mean_reserves[m], st.se_reserves[m]);
        row("mean_explored_area", st.mean_explored[m], st.se_explored[m]);
        row("mean_consumption", st.mean_consumption[m], st.se_consumption[m]);
        row("survival", st.survival[m], nan);
    }
}

inline void write_json(const std::filesystem::path& file, const nlohmann::ordered_json& j) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open " + file.string() + " for writing");
    out << j.dump(2) << '\n';
}

/// Opens `dir/name` for binary writing, creating dir as needed.
inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot open " + (dir / name).string() + " for writing");
    return out;
}

}  // namespace hotelling
