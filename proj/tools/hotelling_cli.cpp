// Command-line front end: hotelling_cli <solve|frontier|simulate|ensemble|validate> --config FILE [options]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hotelling/commands.hpp"
#include "hotelling/config.hpp"
#include "hotelling/errors.hpp"

namespace {

std::string error_kind(const std::exception& e) {
    using namespace hotelling;
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const UsageError*>(&e)) return "UsageError";
    if (dynamic_cast<const AdmissibilityError*>(&e)) return "AdmissibilityError";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const GridError*>(&e)) return "GridError";
    if (dynamic_cast<const FrontierNotBracketed*>(&e)) return "FrontierNotBracketed";
    if (dynamic_cast<const NonMonotoneFrontier*>(&e)) return "NonMonotoneFrontier";
    if (dynamic_cast<const NoRoot*>(&e)) return "NoRoot";
    if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
    if (dynamic_cast<const RegionError*>(&e)) return "RegionError";
    if (dynamic_cast<const TimeOutOfRange*>(&e)) return "TimeOutOfRange";
    if (dynamic_cast<const InsufficientData*>(&e)) return "InsufficientData";
    return "Error";
}

void report_error(const std::exception& e) {
    nlohmann::ordered_json j;
    j["error"] = error_kind(e);
    j["message"] = e.what();
    if (const auto* pe = dynamic_cast<const hotelling::ParseError*>(&e)) {
        j["line"] = pe->line();
        j["field"] = pe->field();
    }
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal exploration of an exhaustible resource: solver, simulator and checks"};
    app.require_subcommand(1);

    std::string config_path;
    hotelling::CommandOptions opts;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides [output] directory)");
        sub->add_option("--seed", seed, "seed override");
        sub->add_option("--threads", threads, "worker threads for ensembles (0 = all cores)");
        sub->add_flag("--quiet", opts.quiet, "suppress progress output");
    };
    auto* solve = app.add_subcommand("solve", "solve the value function; write surface and frontier tables");
    auto* frontier = app.add_subcommand("frontier", "write the frontier table only");
    auto* simulate = app.add_subcommand("simulate", "simulate one path; write events and sampled series");
    auto* ensemble = app.add_subcommand("ensemble", "simulate an ensemble; write statistics");
    auto* validate = app.add_subcommand("validate", "run residual, bound and frontier checks");
    for (auto* sub : {solve, frontier, simulate, ensemble, validate}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : hotelling::exit_usage;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--out")) opts.out_dir = out_dir;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--threads")) opts.threads = threads;

    try {
        std::ifstream in(config_path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        const auto cfg = hotelling::parse_config(buf.str());
        if (sub == solve) return hotelling::cmd_solve(cfg, opts, std::cout);
        if (sub == frontier) return hotelling::cmd_frontier(cfg, opts, std::cout);
        if (sub == simulate) return hotelling::cmd_simulate(cfg, opts, std::cout);
        if (sub == ensemble) return hotelling::cmd_ensemble(cfg, opts, std::cout);
        return hotelling::cmd_validate(cfg, opts, std::cout);
    } catch (const hotelling::UsageError& e) {
        report_error(e);
        return hotelling::exit_usage;
    } catch (const std::exception& e) {
        report_error(e);
        return hotelling::exit_error;
    }
}
