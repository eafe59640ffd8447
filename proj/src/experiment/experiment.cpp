#include "cryptsim/experiment/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cryptsim/cpm/snapshot.hpp"
#include "cryptsim/error.hpp"
#include "cryptsim/nrbn/network_io.hpp"
#include "cryptsim/util/format.hpp"

namespace cryptsim::experiment {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

coupling::ModelSettings model_settings(const SimulationConfig& cfg)
{
    coupling::ModelSettings s;
    if (cfg.nrbn.sampled)
        s.enumeration = nrbn::Sampled{cfg.nrbn.sample_count, cfg.run.seed, cfg.nrbn.step_cap};
    else
        s.enumeration = nrbn::Exhaustive{};
    s.delta_schedule = cfg.nrbn.delta_schedule;
    s.step_cap = cfg.nrbn.step_cap;
    return s;
}

coupling::TickSettings tick_settings(const SimulationConfig& cfg)
{
    coupling::TickSettings s;
    s.energy = cfg.energy;
    s.energy.contact = cfg.lattice.contact;
    s.energy.copy = cfg.lattice.copy;
    s.coupling = cfg.coupling;
    s.shed_band = cfg.lattice.shed_band;
    return s;
}

Experiment setup_experiment(const SimulationConfig& cfg, std::uint64_t seed)
{
    const auto topology = cfg.topology();
    auto settings = model_settings(cfg);
    Experiment ex;
    if (!cfg.nrbn.network_file.empty()) {
        ex.source = cfg.nrbn.network_file;
        ex.attempts = 1;
        const auto net = nrbn::load_network(cfg.resolve(cfg.nrbn.network_file));
        try {
            ex.model = coupling::build_model(net, settings, topology);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Io || e.code() == ErrorCode::Config)
                throw;
            throw Error(ErrorCode::NoCompatibleNetwork,
                        "network file " + cfg.nrbn.network_file + " rejected: " + std::string(e.what()));
        }
        return ex;
    }

    ex.source = "random";
    Rng rng(seed);
    for (std::size_t attempt = 0; attempt < cfg.nrbn.retry_cap; ++attempt) {
        ++ex.attempts;
        const auto net_seed = rng.next();
        if (cfg.nrbn.sampled)
            std::get<nrbn::Sampled>(settings.enumeration).seed = net_seed;
        try {
            const auto net = nrbn::generate_random_network(cfg.nrbn.node_count, cfg.nrbn.in_degree, cfg.nrbn.bias,
                                                           net_seed);
            ex.model = coupling::build_model(net, settings, topology);
            return ex;
        } catch (const Error& e) {
            ++ex.rejections[std::string(to_string(e.code()))];
        }
    }
    std::string why = "no compatible network after " + std::to_string(ex.attempts) + " attempts";
    for (const auto& [reason, n] : ex.rejections)
        why += "; " + reason + ": " + std::to_string(n);
    throw Error(ErrorCode::NoCompatibleNetwork, why);
}

std::array<double, kTypeSlots> moran_coding(const SimulationConfig& cfg)
{
    if (cfg.metrics.moran_coding != "depth")
        return metrics::one_vs_rest(*parse_cell_type(cfg.metrics.moran_coding));
    const auto topology = cfg.topology();
    std::array<double, kTypeSlots> c{};
    for (auto t : kPopulations) {
        int depth = 0;
        CellType cur = t;
        for (bool moved = true; moved && depth < static_cast<int>(kTypeSlots);) {
            moved = false;
            for (const auto& [p, ch] : topology.edges)
                if (ch == cur) {
                    cur = p;
                    ++depth;
                    moved = true;
                    break;
                }
        }
        c[slot(t)] = depth;
    }
    return c;
}

MetricsRow compute_metrics_row(long tick, const cpm::Lattice& lattice, const std::vector<cpm::CellRecord>& now,
                               const std::vector<cpm::CellRecord>& before, int window, const SimulationConfig& cfg)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    MetricsRow row;
    row.tick = tick;
    try {
        row.proportions = metrics::population_proportions(now);
    } catch (const Error&) {
        row.proportions.fill(nan);
    }
    try {
        row.morans_i = metrics::morans_index(lattice, now, moran_coding(cfg), cfg.metrics.moran_adjacency);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UndefinedStatistic)
            throw;
        row.morans_i = nan;
    }
    const auto field = metrics::velocity_field(before, now, window, lattice.width());
    try {
        const auto m = metrics::neighbor_velocity_correlation(
            field, metrics::contact_pairs(lattice, cfg.metrics.contact_adjacency));
        row.pearson_r = m.pearson_r;
        row.mean_direction_cosine = m.mean_direction_cosine;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientData)
            throw;
        row.pearson_r = row.mean_direction_cosine = nan;
    }
    double speed = 0.0;
    for (const auto& v : field.cells)
        speed += field.speed(v);
    row.mean_speed = field.cells.empty() ? nan : speed / field.cells.size();
    return row;
}

void write_metrics_header(std::ostream& out)
{
    out << "tick";
    for (auto t : kPopulations)
        out << ',' << type_key(t);
    out << ",morans_i,pearson_r,mean_dir_cosine,mean_speed\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& row)
{
    out << row.tick;
    for (double p : row.proportions)
        out << ',' << util::format_metric(p);
    for (double v : {row.morans_i, row.pearson_r, row.mean_direction_cosine, row.mean_speed})
        out << ',' << util::format_metric(v);
    out << '\n';
}

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    return out;
}

/// Config as stored beside results: file references made absolute.
void write_stored_config(const fs::path& path, const SimulationConfig& cfg)
{
    auto stored = cfg;
    auto absolute = [&](const std::string& file) {
        return file.empty() ? file : fs::absolute(cfg.resolve(file)).lexically_normal().string();
    };
    stored.nrbn.network_file = absolute(cfg.nrbn.network_file);
    stored.topology_file = absolute(cfg.topology_file);
    for (auto& text : stored.run.initial) {
        auto spec = coupling::parse_initial_spec(text);
        if (spec.kind == coupling::InitialSpec::Kind::Snapshot) {
            spec.snapshot_path = absolute(spec.snapshot_path);
            text = coupling::format_initial_spec(spec);
        }
    }
    auto out = open_out(path);
    write_config(out, stored);
}

void write_snapshot(const fs::path& dir, long tick, const cpm::Lattice& lattice,
                    const std::vector<cpm::CellRecord>& now, const std::vector<cpm::CellRecord>& before,
                    const cpm::CellTable* cells, std::vector<std::string>& files, const fs::path& root)
{
    const auto t = std::to_string(tick);
    auto lat = open_out(dir / ("lattice_" + t + ".txt"));
    cpm::write_lattice(lat, lattice);
    auto cur = open_out(dir / ("cells_" + t + ".csv"));
    cpm::write_cells_csv(cur, now);
    auto prev = open_out(dir / ("cells_" + t + "_prev.csv"));
    cpm::write_cells_csv(prev, before);
    for (const char* name : {"lattice_", "cells_"})
        files.push_back(fs::relative(dir / (std::string(name) + t + (name[0] == 'l' ? ".txt" : ".csv")), root).string());
    files.push_back(fs::relative(dir / ("cells_" + t + "_prev.csv"), root).string());
    if (cells) {
        auto img = open_out(dir / ("lattice_" + t + ".ppm"), std::ios::binary);
        cpm::write_ppm(img, lattice, *cells);
        files.push_back(fs::relative(dir / ("lattice_" + t + ".ppm"), root).string());
    }
}

}  // namespace

ReplicateOutcome run_replicate(const SimulationConfig& cfg, const coupling::DifferentiationModel& model,
                               std::size_t index, const fs::path& dir)
{
    ReplicateOutcome out;
    out.index = index;
    out.seed = cfg.run.seed + index;
    out.initial = cfg.run.initial[index % cfg.run.initial.size()];
    out.dir = dir;
    try {
        fs::create_directories(dir / "snapshots");
        write_stored_config(dir / "config.txt", cfg);
        out.files.push_back("config.txt");
        auto spec = coupling::parse_initial_spec(out.initial);
        if (spec.kind == coupling::InitialSpec::Kind::Snapshot)
            spec.snapshot_path = cfg.resolve(spec.snapshot_path);
        spec.niche_rows = cfg.run.niche_rows;
        spec.cell_side = cfg.run.cell_side;
        spec.mix = cfg.run.mix;

        Rng rng(out.seed);
        const auto settings = tick_settings(cfg);
        auto world = coupling::make_world(spec, cfg.lattice.width, cfg.lattice.height, model, settings.coupling, rng);

        auto metrics_csv = open_out(dir / "metrics.csv");
        write_metrics_header(metrics_csv);
        out.files.push_back("metrics.csv");
        std::ofstream events_csv;
        if (cfg.run.event_log) {
            events_csv = open_out(dir / "events.csv");
            coupling::write_event_log_header(events_csv);
            out.files.push_back("events.csv");
        }

        const int width = cfg.lattice.width;
        auto before = cpm::cell_records(world.cells, width);
        metrics::PopulationSeries series;
        std::vector<metrics::VelocityField> history;
        std::vector<coupling::Event> events;
        const fs::path snaps = dir / "snapshots";
        const auto* image_cells = cfg.run.images ? &world.cells : nullptr;

        for (long t = 1; t <= cfg.run.ticks; ++t) {
            events.clear();
            coupling::simulation_tick(world, model, settings, rng, cfg.run.event_log ? &events : nullptr);
            for (const auto& e : events)
                coupling::write_event(events_csv, e);
            out.ticks_run = t;
            if (t % cfg.run.metrics_every != 0)
                continue;
            auto now = cpm::cell_records(world.cells, width);
            const auto row = compute_metrics_row(t, world.lattice, now, before, cfg.run.metrics_every, cfg);
            write_metrics_row(metrics_csv, row);
            series.push_back(row.proportions);
            history.push_back(metrics::velocity_field(before, now, cfg.run.metrics_every, width));
            const bool last = t + cfg.run.metrics_every > cfg.run.ticks;
            if ((cfg.run.snapshot_every > 0 && t % cfg.run.snapshot_every == 0) || last)
                write_snapshot(snaps, t, world.lattice, now, before, image_cells, out.files, dir);
            before = std::move(now);
        }

        {
            auto lat = open_out(dir / "final_lattice.txt");
            cpm::write_lattice(lat, world.lattice);
            auto cells = open_out(dir / "final_cells.csv");
            cpm::write_cells_csv(cells, world.cells, width);
            auto stats = open_out(dir / "type_stats.csv");
            metrics::write_type_stats_csv(stats, metrics::speed_size_stats(history));
            out.files.insert(out.files.end(), {"final_lattice.txt", "final_cells.csv", "type_stats.csv"});
        }
        out.final_cells = world.cells.live_count();
        const auto window = static_cast<std::size_t>(cfg.run.stationarity_window / cfg.run.metrics_every);
        if (series.size() >= 2 * window)
            out.stationarity = metrics::stationarity_test(series, window, cfg.run.stationarity_tol);
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

std::vector<std::string> write_model_files(const coupling::DifferentiationModel& model, const fs::path& dir)
{
    fs::create_directories(dir);
    {
        auto o = open_out(dir / "network.txt");
        nrbn::write_network(o, model.network);
    }
    {
        auto o = open_out(dir / "attractors.txt");
        nrbn::write_attractors(o, model.attractors);
    }
    {
        auto o = open_out(dir / "atm.csv");
        nrbn::write_atm_csv(o, model.atm);
    }
    {
        auto o = open_out(dir / "hierarchy.txt");
        nrbn::write_hierarchy(o, model.hierarchy);
    }
    {
        auto o = open_out(dir / "lineage.txt");
        for (std::size_t i = 0; i < model.tree.nodes.size(); ++i) {
            const auto& n = model.tree.nodes[i];
            o << "node " << i << " type=" << type_key(model.type_of(i)) << " level=" << n.level
              << " delta=" << util::format_double(n.delta) << " parent=";
            if (n.parent)
                o << *n.parent;
            else
                o << "none";
            o << " attractors=";
            for (std::size_t k = 0; k < n.attractors.size(); ++k)
                o << (k ? "," : "") << "A" << n.attractors[k] + 1;
            o << (n.synthetic ? " synthetic" : "") << '\n';
        }
    }
    return {"network.txt", "attractors.txt", "atm.csv", "hierarchy.txt", "lineage.txt"};
}

namespace {

json proportions_json(const metrics::Proportions& p)
{
    json j = json::object();
    for (std::size_t i = 0; i < p.size(); ++i)
        j[std::string(type_key(kPopulations[i]))] = p[i];
    return j;
}

void check_output_dir(const fs::path& dir, const std::string& hash)
{
    const auto manifest = dir / "manifest.json";
    if (!fs::exists(manifest))
        return;
    std::ifstream in(manifest);
    json old;
    try {
        in >> old;
    } catch (const std::exception&) {
        throw Error(ErrorCode::Config, "unreadable manifest in " + dir.string());
    }
    const auto previous = old.value("config_hash", std::string());
    if (previous != hash)
        throw Error(ErrorCode::Config, "output directory " + dir.string() + " holds results of config " + previous +
                                           ", current config is " + hash + "; choose another --out");
}

// Runs the replicate set of one model (or one model per replicate) into dir.
RunSummary run_set(const SimulationConfig& cfg, const fs::path& dir, const Experiment* shared,
                   const std::function<Experiment(std::size_t)>& per_replicate, json extra)
{
    RunSummary summary;
    summary.config_hash = config_hash(cfg);
    summary.dir = dir;
    check_output_dir(dir, summary.config_hash);
    fs::create_directories(dir);

    json manifest;
    manifest["config_hash"] = summary.config_hash;
    manifest["config"] = "config.txt";
    write_stored_config(dir / "config.txt", cfg);
    for (auto& [k, v] : extra.items())
        manifest[k] = v;

    const std::size_t n = cfg.run.replicates;
    summary.replicates.resize(n);
    std::vector<json> networks(n);
    auto name = [](std::size_t i) {
        std::ostringstream s;
        s << "replicate_" << (i < 10 ? "00" : i < 100 ? "0" : "") << i;
        return s.str();
    };
    auto describe = [](const Experiment& ex) {
        json j;
        j["source"] = ex.source;
        j["attempts"] = ex.attempts;
        j["rejections"] = ex.rejections;
        j["attractors"] = ex.model.attractors.size();
        j["tree_shape"] = ex.model.tree.shape();
        j["degenerate"] = ex.model.degenerate;
        return j;
    };
    if (shared) {
        json net = describe(*shared);
        net["files"] = write_model_files(shared->model, dir / "network");
        manifest["network"] = net;
        summary.degenerate = shared->model.degenerate;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const fs::path rdir = dir / name(i);
            if (shared) {
                summary.replicates[i] = run_replicate(cfg, shared->model, i, rdir);
                continue;
            }
            try {
                const auto ex = per_replicate(i);
                networks[i] = describe(ex);
                networks[i]["files"] = write_model_files(ex.model, rdir / "network");
                summary.replicates[i] = run_replicate(cfg, ex.model, i, rdir);
            } catch (const std::exception& e) {
                auto& r = summary.replicates[i];
                r.index = i;
                r.seed = cfg.run.seed + i;
                r.initial = cfg.run.initial[i % cfg.run.initial.size()];
                r.dir = rdir;
                r.error = e.what();
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.run.workers, n));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    json reps = json::array();
    std::vector<const metrics::Proportions*> finals;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = summary.replicates[i];
        json j;
        j["index"] = r.index;
        j["seed"] = r.seed;
        j["initial"] = r.initial;
        j["dir"] = name(i);
        j["status"] = r.ok ? "ok" : "failed";
        if (!r.ok)
            j["error"] = r.error;
        if (!shared && !networks[i].is_null())
            j["network"] = networks[i];
        j["ticks"] = r.ticks_run;
        j["final_cells"] = r.final_cells;
        if (r.stationarity) {
            const auto& s = *r.stationarity;
            j["stationary"] = s.stationary;
            j["window_l1"] = s.l1;
            j["final_max_sd"] = s.max_sd;
            j["final_mean"] = proportions_json(s.final_mean);
            if (r.ok)
                finals.push_back(&s.final_mean);
        }
        j["files"] = r.files;
        j["config_hash"] = summary.config_hash;
        reps.push_back(j);
        summary.completed += r.ok;
    }
    manifest["replicates"] = reps;
    manifest["completed"] = summary.completed;
    manifest["requested"] = n;
    if (finals.size() >= 2) {
        double worst = 0.0;
        for (std::size_t a = 0; a < finals.size(); ++a)
            for (std::size_t b = a + 1; b < finals.size(); ++b)
                worst = std::max(worst, metrics::l1_distance(*finals[a], *finals[b]));
        summary.max_pairwise_l1 = worst;
        manifest["max_pairwise_final_l1"] = worst;
    }
    auto m = open_out(dir / "manifest.json");
    m << manifest.dump(2) << '\n';
    return summary;
}

}  // namespace

RunSummary run_replicates(const SimulationConfig& cfg)
{
    const fs::path dir = cfg.run.output_dir;
    if (cfg.run.shared_network) {
        const auto ex = setup_experiment(cfg, cfg.run.seed);
        return run_set(cfg, dir, &ex, {}, json::object());
    }
    return run_set(cfg, dir, nullptr, [&](std::size_t i) { return setup_experiment(cfg, cfg.run.seed + i); },
                   json::object());
}

KnockoutSummary run_knockout_experiment(const SimulationConfig& cfg, std::size_t node, bool value)
{
    const auto control = setup_experiment(cfg, cfg.run.seed);
    if (node >= control.model.network.node_count())
        throw Error(ErrorCode::InvalidParameter, "knockout node " + std::to_string(node) + " out of range [0, " +
                                                     std::to_string(control.model.network.node_count()) + ")");
    Experiment perturbed;
    perturbed.source = control.source + " with node " + std::to_string(node) + " fixed to " + (value ? "1" : "0");
    perturbed.attempts = 1;
    perturbed.model = coupling::build_perturbed_model(nrbn::apply_knockout(control.model.network, node, value),
                                                      model_settings(cfg), cfg.topology(), control.model);

    KnockoutSummary k;
    k.degenerate = perturbed.model.degenerate;
    k.hierarchies_identical = perturbed.model.hierarchy == control.model.hierarchy;
    const fs::path dir = cfg.run.output_dir;
    json extra;
    extra["role"] = "control";
    k.control = run_set(cfg, dir / "control", &control, {}, extra);
    extra["role"] = "knockout";
    extra["knockout"] = {{"node", node}, {"value", value}};
    k.knockout = run_set(cfg, dir / "knockout", &perturbed, {}, extra);

    json top;
    top["config_hash"] = config_hash(cfg);
    top["node"] = node;
    top["value"] = value;
    top["degenerate_mode"] = k.degenerate;
    top["hierarchies_identical"] = k.hierarchies_identical;
    top["control_shape"] = control.model.tree.shape();
    top["knockout_shape"] = perturbed.model.tree.shape();
    top["control"] = "control/manifest.json";
    top["knockout"] = "knockout/manifest.json";
    auto o = open_out(dir / "knockout.json");
    o << top.dump(2) << '\n';
    return k;
}

std::vector<MetricsRow> recompute_metrics(const fs::path& dir)
{
    fs::path snaps = dir;
    if (fs::exists(dir / "snapshots"))
        snaps = dir / "snapshots";
    fs::path config_path;
    for (const auto& candidate : {dir / "config.txt", snaps / "config.txt", snaps.parent_path() / "config.txt"})
        if (fs::exists(candidate)) {
            config_path = candidate;
            break;
        }
    if (config_path.empty())
        throw Error(ErrorCode::Io, "no config.txt next to snapshots in " + dir.string());
    const auto cfg = load_config(config_path.string());

    std::vector<long> ticks;
    for (const auto& entry : fs::directory_iterator(snaps)) {
        const auto file = entry.path().filename().string();
        if (file.rfind("lattice_", 0) == 0 && entry.path().extension() == ".txt")
            ticks.push_back(std::stol(file.substr(8, file.size() - 12)));
    }
    if (ticks.empty())
        throw Error(ErrorCode::Io, "no lattice snapshots in " + snaps.string());
    std::sort(ticks.begin(), ticks.end());

    auto read = [](const fs::path& p, auto fn) {
        std::ifstream in(p);
        if (!in)
            throw Error(ErrorCode::Io, "cannot read " + p.string());
        return fn(in);
    };
    std::vector<MetricsRow> rows;
    for (long t : ticks) {
        const auto s = std::to_string(t);
        const auto lattice = read(snaps / ("lattice_" + s + ".txt"), [](std::istream& in) { return cpm::read_lattice(in); });
        const auto now = read(snaps / ("cells_" + s + ".csv"), [](std::istream& in) { return cpm::read_cells_csv(in); });
        const auto before =
            read(snaps / ("cells_" + s + "_prev.csv"), [](std::istream& in) { return cpm::read_cells_csv(in); });
        rows.push_back(compute_metrics_row(t, lattice, now, before, cfg.run.metrics_every, cfg));
    }
    return rows;
}

}  // namespace cryptsim::experiment
