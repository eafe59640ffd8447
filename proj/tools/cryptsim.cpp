#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cryptsim/error.hpp"
#include "cryptsim/experiment/config.hpp"
#include "cryptsim/experiment/experiment.hpp"
#include "cryptsim/nrbn/design.hpp"
#include "cryptsim/nrbn/network_io.hpp"
#include "cryptsim/util/format.hpp"

namespace fs = std::filesystem;
using namespace cryptsim;

namespace {

enum Exit { Ok = 0, ConfigError = 1, NoNetwork = 2, RuntimeFailure = 3 };

struct Overrides {
    std::string config;
    long long seed = -1;
    long long replicates = -1;
    long long workers = -1;
    std::string out;
    bool live_nrbn = false;
    std::vector<std::string> sets;
};

void add_common(CLI::App* app, Overrides& o)
{
    app->add_option("config", o.config, "Configuration file")->required()->check(CLI::ExistingFile);
    app->add_option("--seed", o.seed, "Base seed (replicate i uses seed + i)");
    app->add_option("--replicates", o.replicates, "Replicate count");
    app->add_option("--workers", o.workers, "Concurrent replicates");
    app->add_option("--out", o.out, "Output directory");
    app->add_flag("--live-nrbn", o.live_nrbn, "Flip and relax the network explicitly on every noise event");
    app->add_option("--set", o.sets, "Extra key=value override (repeatable)");
}

experiment::SimulationConfig configure(const Overrides& o)
{
    auto cfg = experiment::load_config(o.config);
    if (o.seed >= 0)
        experiment::set_config_value(cfg, "run.seed", std::to_string(o.seed));
    if (o.replicates >= 0)
        experiment::set_config_value(cfg, "run.replicates", std::to_string(o.replicates));
    if (o.workers >= 0)
        experiment::set_config_value(cfg, "run.workers", std::to_string(o.workers));
    if (!o.out.empty())
        experiment::set_config_value(cfg, "run.output_dir", o.out);
    if (o.live_nrbn)
        experiment::set_config_value(cfg, "coupling.live_nrbn", "true");
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::Config, "--set expects key=value, got '" + s + "'");
        experiment::set_config_value(cfg, util::trim(s.substr(0, eq)), util::trim(s.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

void report(const experiment::RunSummary& s, const std::string& label)
{
    std::cout << label << ": " << s.completed << "/" << s.replicates.size() << " replicates completed in "
              << s.dir.string() << " (config " << s.config_hash << ")\n";
    for (const auto& r : s.replicates) {
        std::cout << "  replicate " << r.index << " seed=" << r.seed << " initial=" << r.initial;
        if (!r.ok) {
            std::cout << " FAILED: " << r.error << '\n';
            continue;
        }
        std::cout << " cells=" << r.final_cells;
        if (r.stationarity)
            std::cout << " stationary=" << (r.stationarity->stationary ? "yes" : "no")
                      << " window_l1=" << util::format_metric(r.stationarity->l1);
        std::cout << '\n';
    }
    if (s.max_pairwise_l1)
        std::cout << "  max pairwise final-window L1: " << util::format_metric(*s.max_pairwise_l1) << '\n';
}

std::vector<std::vector<std::size_t>> read_flips(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Config, "cannot open " + path);
    std::vector<std::vector<std::size_t>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        std::istringstream ss(line);
        std::vector<std::size_t> row;
        long long v = 0;
        while (ss >> v) {
            if (v < 0)
                throw Error(ErrorCode::Config, "flip counts must be non-negative");
            row.push_back(static_cast<std::size_t>(v));
        }
        if (!ss.eof())
            throw Error(ErrorCode::Config, "bad number in " + path);
        if (!row.empty())
            rows.push_back(row);
    }
    return rows;
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"Multiscale intestinal crypt simulator"};
    app.require_subcommand(1);

    Overrides run_opts;
    auto* run = app.add_subcommand("run", "Run replicate simulations");
    add_common(run, run_opts);

    Overrides ko_opts;
    std::size_t ko_node = 0;
    int ko_value = 0;
    auto* ko = app.add_subcommand("knockout", "Paired control and gene-knockout runs");
    add_common(ko, ko_opts);
    ko->add_option("--node", ko_node, "Node to clamp")->required();
    ko->add_option("--value", ko_value, "Clamp value")->required()->check(CLI::IsMember({0, 1}));

    Overrides an_opts;
    auto* analyze = app.add_subcommand("analyze-nrbn", "Select a network and write attractors, ATM and hierarchy");
    add_common(analyze, an_opts);

    std::string snap_dir, recompute_out;
    auto* recompute = app.add_subcommand("recompute-metrics", "Recompute metrics from saved snapshots");
    recompute->add_option("snapshot-dir", snap_dir, "Replicate or snapshot directory")->required()->check(CLI::ExistingDirectory);
    recompute->add_option("--out", recompute_out, "Output CSV (default <dir>/recomputed_metrics.csv)");

    std::string flips_file, design_out;
    std::size_t design_nodes = 12;
    std::uint64_t design_seed = 1;
    auto* design = app.add_subcommand("design-network", "Build a network with prescribed fixed points and flip transitions");
    design->add_option("flips", flips_file, "Square matrix of flip counts between fixed points")->required()->check(CLI::ExistingFile);
    design->add_option("--nodes", design_nodes, "Node count");
    design->add_option("--seed", design_seed, "Layout search seed");
    design->add_option("--out", design_out, "Network file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : ConfigError;
    }

    try {
        if (*run) {
            const auto cfg = configure(run_opts);
            const auto s = experiment::run_replicates(cfg);
            report(s, "run");
            return s.completed == s.replicates.size() ? Ok : RuntimeFailure;
        }
        if (*ko) {
            const auto cfg = configure(ko_opts);
            const auto k = experiment::run_knockout_experiment(cfg, ko_node, ko_value != 0);
            report(k.control, "control");
            report(k.knockout, "knockout");
            std::cout << "degenerate mode: " << (k.degenerate ? "yes" : "no")
                      << ", hierarchies identical: " << (k.hierarchies_identical ? "yes" : "no") << '\n';
            const bool ok = k.control.completed == k.control.replicates.size() &&
                            k.knockout.completed == k.knockout.replicates.size();
            return ok ? Ok : RuntimeFailure;
        }
        if (*analyze) {
            const auto cfg = configure(an_opts);
            const auto ex = experiment::setup_experiment(cfg, cfg.run.seed);
            const fs::path dir = cfg.run.output_dir;
            experiment::write_model_files(ex.model, dir);
            std::cout << "network: " << ex.source << " after " << ex.attempts << " attempt(s)\n"
                      << "attractors: " << ex.model.attractors.size() << '\n'
                      << "lineage shape: " << ex.model.tree.shape() << '\n';
            for (std::size_t i = 0; i < ex.model.tree.nodes.size(); ++i)
                std::cout << "  node " << i << ": " << type_name(ex.model.type_of(i)) << " delta="
                          << util::format_double(ex.model.delta_of(i)) << '\n';
            std::cout << "files written to " << dir.string() << '\n';
            return Ok;
        }
        if (*recompute) {
            const auto rows = experiment::recompute_metrics(snap_dir);
            const fs::path out = recompute_out.empty() ? fs::path(snap_dir) / "recomputed_metrics.csv" : fs::path(recompute_out);
            std::ofstream o(out);
            if (!o)
                throw Error(ErrorCode::Io, "cannot write " + out.string());
            experiment::write_metrics_header(o);
            for (const auto& r : rows)
                experiment::write_metrics_row(o, r);
            std::cout << rows.size() << " snapshot(s) recomputed into " << out.string() << '\n';
            return Ok;
        }
        if (*design) {
            nrbn::FlipDesign d;
            d.node_count = design_nodes;
            d.flips = read_flips(flips_file);
            d.seed = design_seed;
            const auto net = nrbn::design_network(d);
            std::ofstream o(design_out);
            if (!o)
                throw Error(ErrorCode::Io, "cannot write " + design_out);
            nrbn::write_network(o, net.network);
            std::cout << "fixed points:";
            for (auto c : net.fixed_points)
                std::cout << ' ' << nrbn::NetworkState::from_code(design_nodes, c).to_string();
            std::cout << "\nwritten to " << design_out << '\n';
            return Ok;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
        case ErrorCode::Config: return ConfigError;
        case ErrorCode::NoCompatibleNetwork: return NoNetwork;
        default: return RuntimeFailure;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return RuntimeFailure;
    }
    return Ok;
}

}  // namespace

int main(int argc, char** argv)
{
    return run_cli(argc, argv);
}
