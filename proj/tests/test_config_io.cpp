#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "hotelling/commands.hpp"
#include "hotelling/config.hpp"
#include "fixtures.hpp"

using namespace hotelling;

namespace {

std::string read_file(const std::filesystem::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig load(const std::string& name) { return parse_config(read_file(std::string(HOTELLING_CONFIG_DIR) + "/" + name)); }

std::filesystem::path scratch_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / ("hotelling_test_" + name);
    std::filesystem::remove_all(d);
    return d;
}

}  // namespace

TEST(Config, RoundTrip) {
    auto cfg = load("set_b.cfg");
    cfg.simulation.x0 = 0.75;
    cfg.simulation.r0 = 1.0 / 3.0;
    cfg.r_step = 0.01;
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(Config, ShippedConfigsParse) {
    for (const char* name : {"set_a.cfg", "set_b.cfg", "sample_path.cfg"}) EXPECT_NO_THROW(load(name)) << name;
    EXPECT_DOUBLE_EQ(load("set_a.cfg").model.a, 2.5);
    EXPECT_DOUBLE_EQ(load("sample_path.cfg").model.lambda, 5.0);
}

TEST(Config, EmptyDocumentListsEveryMissingKey) {
    try {
        parse_config("");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        for (const char* key : {"model.alpha", "model.r", "model.a", "model.lambda", "model.k", "grid.x_max"}) {
            EXPECT_NE(msg.find(key), std::string::npos) << key;
        }
    }
}

TEST(Config, RejectsMalformedInput) {
    const std::string base = "[model]\nalpha=0.5\nr=0.02\na=2.5\nlambda=2\nk=5\n[grid]\nx_max=1\n";
    EXPECT_NO_THROW(parse_config(base));
    EXPECT_THROW(parse_config(base + "colour = red\n"), ParseError);
    EXPECT_THROW(parse_config(base + "[extra]\n"), ParseError);
    EXPECT_THROW(parse_config(base + "x_max = 2\n"), ParseError);
    EXPECT_THROW(parse_config(base + "x_step =\n"), ParseError);
    EXPECT_THROW(parse_config(base + "x_step = fast\n"), ParseError);
    EXPECT_THROW(parse_config(base + "[simulation]\nn_paths = -3\n"), ParseError);
    EXPECT_THROW(parse_config(base + "[simulation]\nx0 = 5\n"), ParseError);
    try {
        parse_config(base + "[simulation]\nhorizon = soon\n");
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 10);
        EXPECT_EQ(e.field(), "simulation.horizon");
    }
    EXPECT_THROW(parse_config("[model]\nalpha=0.5\nr=0.02\na=2.5\nlambda=2\nk=1e6\n[grid]\nx_max=1\n"),
                 AdmissibilityError);
}

TEST(Config, DoubleFormatRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Commands, FrontierFirstRowIsAnchor) {
  for (const char* name : {"set_a.cfg", "set_b.cfg"}) {
    auto cfg = load(name);
    CommandOptions o;
    o.quiet = true;
    o.out_dir = scratch_dir("frontier").string();
    std::ostringstream log;
    ASSERT_EQ(cmd_frontier(cfg, o, log), exit_ok);
    std::ifstream in(std::filesystem::path(*o.out_dir) / "frontier.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "x,r_star,p_star");
    const auto c1 = row.find(',');
    const auto c2 = row.find(',', c1 + 1);
    EXPECT_EQ(std::stod(row.substr(0, c1)), 0.0);
    EXPECT_NEAR(std::stod(row.substr(c1 + 1, c2 - c1 - 1)) / frontier_at_zero(cfg.model), 1.0, 1e-4);
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(*o.out_dir) / "frontier.json"));
  }
}

TEST(Commands, EmptyEnsembleIsUsageError) {
    auto cfg = load("set_b.cfg");
    cfg.simulation.n_paths = 0;
    CommandOptions o;
    o.quiet = true;
    o.out_dir = scratch_dir("empty").string();
    std::ostringstream log;
    EXPECT_THROW(cmd_ensemble(cfg, o, log), UsageError);
}

TEST(Commands, SimulateWritesEventsAndSeries) {
    auto cfg = load("sample_path.cfg");
    CommandOptions o;
    o.quiet = true;
    o.out_dir = scratch_dir("simulate").string();
    std::ostringstream log;
    ASSERT_EQ(cmd_simulate(cfg, o, log), exit_ok);
    const std::filesystem::path dir(*o.out_dir);
    const auto series = read_file(dir / "series.csv");
    EXPECT_EQ(series.substr(0, series.find('\n')), "time,price,reserves,explored_area,consumption_rate,exhausted");
    EXPECT_EQ(std::count(series.begin(), series.end(), '\n'),
              static_cast<long>(cfg.simulation.time_points) + 2);
    const auto meta = nlohmann::json::parse(read_file(dir / "events.json"));
    EXPECT_EQ(meta["table"], "events");
    EXPECT_EQ(meta["params"]["k"], 5.0);
}

TEST(Commands, ValidatePassesForSetA) {
    auto cfg = load("set_a.cfg");
    CommandOptions o;
    o.quiet = true;
    o.out_dir = scratch_dir("validate").string();
    std::ostringstream log;
    EXPECT_EQ(cmd_validate(cfg, o, log), exit_ok);
}
