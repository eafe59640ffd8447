#include "cryptsim/experiment/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "cryptsim/error.hpp"
#include "cryptsim/util/format.hpp"

namespace cryptsim::experiment {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected)
{
    throw Error(ErrorCode::Config, key + ": expected " + expected + ", got '" + value + "'");
}

long long to_int(const std::string& key, const std::string& v)
{
    long long out = 0;
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end)
        bad_value(key, v, "an integer");
    return out;
}

std::size_t to_count(const std::string& key, const std::string& v)
{
    const auto n = to_int(key, v);
    if (n < 0)
        bad_value(key, v, "a non-negative integer");
    return static_cast<std::size_t>(n);
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size())
            return d;
    } catch (const std::exception&) {
    }
    bad_value(key, v, "a number");
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    bad_value(key, v, "true or false");
}

cpm::Neighborhood to_neighborhood(const std::string& key, const std::string& v)
{
    if (v == "moore" || v == "2")
        return cpm::Neighborhood::Moore;
    if (v == "von-neumann" || v == "1")
        return cpm::Neighborhood::VonNeumann;
    bad_value(key, v, "moore or von-neumann");
}

std::string from_neighborhood(cpm::Neighborhood n)
{
    return n == cpm::Neighborhood::Moore ? "moore" : "von-neumann";
}

std::string from_bool(bool b)
{
    return b ? "true" : "false";
}

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += (i ? "," : "") + items[i];
    return out;
}

struct Key {
    std::string name;
    std::function<std::string(const SimulationConfig&)> get;
    std::function<void(SimulationConfig&, const std::string&)> set;
};

template <class T>
Key int_key(std::string name, T SimulationConfig::*group, int T::*field)
{
    return {name, [=](const SimulationConfig& c) { return std::to_string(c.*group.*field); },
            [=](SimulationConfig& c, const std::string& v) { c.*group.*field = static_cast<int>(to_int(name, v)); }};
}

template <class T>
Key long_key(std::string name, T SimulationConfig::*group, long T::*field)
{
    return {name, [=](const SimulationConfig& c) { return std::to_string(c.*group.*field); },
            [=](SimulationConfig& c, const std::string& v) { c.*group.*field = static_cast<long>(to_int(name, v)); }};
}

template <class T>
Key count_key(std::string name, T SimulationConfig::*group, std::size_t T::*field)
{
    return {name, [=](const SimulationConfig& c) { return std::to_string(c.*group.*field); },
            [=](SimulationConfig& c, const std::string& v) { c.*group.*field = to_count(name, v); }};
}

template <class T>
Key double_key(std::string name, T SimulationConfig::*group, double T::*field)
{
    return {name, [=](const SimulationConfig& c) { return util::format_double(c.*group.*field); },
            [=](SimulationConfig& c, const std::string& v) { c.*group.*field = to_double(name, v); }};
}

template <class T>
Key bool_key(std::string name, T SimulationConfig::*group, bool T::*field)
{
    return {name, [=](const SimulationConfig& c) { return from_bool(c.*group.*field); },
            [=](SimulationConfig& c, const std::string& v) { c.*group.*field = to_bool(name, v); }};
}

template <class T>
Key string_key(std::string name, T SimulationConfig::*group, std::string T::*field)
{
    return {name, [=](const SimulationConfig& c) { return c.*group.*field; },
            [=](SimulationConfig& c, const std::string& v) { c.*group.*field = v; }};
}

template <class T>
Key neighborhood_key(std::string name, T SimulationConfig::*group, cpm::Neighborhood T::*field)
{
    return {name, [=](const SimulationConfig& c) { return from_neighborhood(c.*group.*field); },
            [=](SimulationConfig& c, const std::string& v) { c.*group.*field = to_neighborhood(name, v); }};
}

std::vector<Key> build_keys()
{
    using C = SimulationConfig;
    std::vector<Key> k;
    k.push_back(int_key("lattice.width", &C::lattice, &LatticeConfig::width));
    k.push_back(int_key("lattice.height", &C::lattice, &LatticeConfig::height));
    k.push_back(int_key("lattice.shed_band", &C::lattice, &LatticeConfig::shed_band));
    k.push_back(neighborhood_key("lattice.contact_neighborhood", &C::lattice, &LatticeConfig::contact));
    k.push_back(neighborhood_key("lattice.copy_neighborhood", &C::lattice, &LatticeConfig::copy));

    k.push_back(count_key("nrbn.node_count", &C::nrbn, &NrbnConfig::node_count));
    k.push_back(count_key("nrbn.in_degree", &C::nrbn, &NrbnConfig::in_degree));
    k.push_back(double_key("nrbn.bias", &C::nrbn, &NrbnConfig::bias));
    k.push_back({"nrbn.delta_schedule",
                 [](const C& c) {
                     std::vector<std::string> parts;
                     for (double d : c.nrbn.delta_schedule)
                         parts.push_back(util::format_double(d));
                     return join(parts);
                 },
                 [](C& c, const std::string& v) {
                     c.nrbn.delta_schedule.clear();
                     for (const auto& part : util::split(v, ','))
                         c.nrbn.delta_schedule.push_back(to_double("nrbn.delta_schedule", util::trim(part)));
                 }});
    k.push_back({"nrbn.enumeration", [](const C& c) { return std::string(c.nrbn.sampled ? "sampled" : "exhaustive"); },
                 [](C& c, const std::string& v) {
                     if (v != "sampled" && v != "exhaustive")
                         bad_value("nrbn.enumeration", v, "exhaustive or sampled");
                     c.nrbn.sampled = v == "sampled";
                 }});
    k.push_back(count_key("nrbn.sample_count", &C::nrbn, &NrbnConfig::sample_count));
    k.push_back(count_key("nrbn.step_cap", &C::nrbn, &NrbnConfig::step_cap));
    k.push_back(count_key("nrbn.retry_cap", &C::nrbn, &NrbnConfig::retry_cap));
    k.push_back(string_key("nrbn.network_file", &C::nrbn, &NrbnConfig::network_file));

    k.push_back({"energy.temperature", [](const C& c) { return util::format_double(c.energy.temperature); },
                 [](C& c, const std::string& v) { c.energy.temperature = to_double("energy.temperature", v); }});
    k.push_back({"energy.lambda_volume", [](const C& c) { return util::format_double(c.energy.lambda_volume); },
                 [](C& c, const std::string& v) { c.energy.lambda_volume = to_double("energy.lambda_volume", v); }});
    k.push_back({"energy.reject_fragmenting", [](const C& c) { return from_bool(c.energy.reject_fragmenting); },
                 [](C& c, const std::string& v) { c.energy.reject_fragmenting = to_bool("energy.reject_fragmenting", v); }});
    for (std::size_t a = 0; a < kTypeSlots; ++a)
        for (std::size_t b = a; b < kTypeSlots; ++b) {
            const auto ta = static_cast<CellType>(a), tb = static_cast<CellType>(b);
            const std::string name = "energy.J." + std::string(type_key(ta)) + "." + std::string(type_key(tb));
            k.push_back({name, [=](const C& c) { return util::format_double(c.energy.J(ta, tb)); },
                         [=](C& c, const std::string& v) { c.energy.set_adhesion(ta, tb, to_double(name, v)); }});
        }
    for (auto t : kPopulations) {
        const std::string name = "energy.motility." + std::string(type_key(t));
        k.push_back({name, [=](const C& c) { return util::format_double(c.energy.mu(t)); },
                     [=](C& c, const std::string& v) { c.energy.motility[slot(t)] = to_double(name, v); }});
    }

    k.push_back(int_key("coupling.base_cycle", &C::coupling, &coupling::CouplingParams::base_cycle));
    k.push_back(double_key("coupling.noise_rate", &C::coupling, &coupling::CouplingParams::noise_rate));
    k.push_back(int_key("coupling.birth_volume", &C::coupling, &coupling::CouplingParams::birth_volume));
    k.push_back(int_key("coupling.division_volume", &C::coupling, &coupling::CouplingParams::division_volume));
    k.push_back(int_key("coupling.division_threshold", &C::coupling, &coupling::CouplingParams::division_threshold));
    k.push_back(bool_key("coupling.live_nrbn", &C::coupling, &coupling::CouplingParams::live_nrbn));
    k.push_back({"coupling.topology_file", [](const C& c) { return c.topology_file; },
                 [](C& c, const std::string& v) { c.topology_file = v; }});
    for (auto t : kPopulations) {
        const std::string name = "coupling.cycle." + std::string(type_key(t));
        k.push_back({name, [=](const C& c) { return std::to_string(c.coupling.cycle_override[slot(t)]); },
                     [=](C& c, const std::string& v) {
                         c.coupling.cycle_override[slot(t)] = static_cast<int>(to_int(name, v));
                     }});
    }

    k.push_back(long_key("run.ticks", &C::run, &RunConfig::ticks));
    k.push_back({"run.seed", [](const C& c) { return std::to_string(c.run.seed); },
                 [](C& c, const std::string& v) { c.run.seed = to_count("run.seed", v); }});
    k.push_back(count_key("run.replicates", &C::run, &RunConfig::replicates));
    k.push_back(count_key("run.workers", &C::run, &RunConfig::workers));
    k.push_back({"run.initial", [](const C& c) { return join(c.run.initial); },
                 [](C& c, const std::string& v) {
                     c.run.initial.clear();
                     for (const auto& part : util::split(v, ','))
                         c.run.initial.push_back(util::trim(part));
                 }});
    k.push_back(int_key("run.niche_rows", &C::run, &RunConfig::niche_rows));
    k.push_back(int_key("run.cell_side", &C::run, &RunConfig::cell_side));
    for (auto t : kPopulations) {
        const std::string name = "run.mix." + std::string(type_key(t));
        k.push_back({name, [=](const C& c) { return std::to_string(c.run.mix[slot(t)]); },
                     [=](C& c, const std::string& v) { c.run.mix[slot(t)] = static_cast<int>(to_int(name, v)); }});
    }
    k.push_back(int_key("run.metrics_every", &C::run, &RunConfig::metrics_every));
    k.push_back(int_key("run.snapshot_every", &C::run, &RunConfig::snapshot_every));
    k.push_back(long_key("run.stationarity_window", &C::run, &RunConfig::stationarity_window));
    k.push_back(double_key("run.stationarity_tol", &C::run, &RunConfig::stationarity_tol));
    k.push_back(bool_key("run.shared_network", &C::run, &RunConfig::shared_network));
    k.push_back(bool_key("run.event_log", &C::run, &RunConfig::event_log));
    k.push_back(bool_key("run.images", &C::run, &RunConfig::images));
    k.push_back(string_key("run.output_dir", &C::run, &RunConfig::output_dir));

    k.push_back(string_key("metrics.moran_coding", &C::metrics, &MetricsConfig::moran_coding));
    k.push_back(neighborhood_key("metrics.moran_adjacency", &C::metrics, &MetricsConfig::moran_adjacency));
    k.push_back(neighborhood_key("metrics.contact_adjacency", &C::metrics, &MetricsConfig::contact_adjacency));
    return k;
}

const std::vector<Key>& keys()
{
    static const std::vector<Key> k = build_keys();
    return k;
}

void require(bool ok, const std::string& key, const std::string& rule)
{
    if (!ok)
        throw Error(ErrorCode::Config, key + " " + rule);
}

}  // namespace

SimulationConfig::SimulationConfig()
{
    energy.lambda_volume = 2.0;
    energy.temperature = 15.0;
    for (std::size_t a = 1; a < kTypeSlots; ++a) {
        const auto ta = static_cast<CellType>(a);
        energy.set_adhesion(ta, CellType::Medium, 12.0);
        for (std::size_t b = a; b < kTypeSlots; ++b)
            energy.set_adhesion(ta, static_cast<CellType>(b), a == b ? 6.0 : 9.0);
    }
    energy.set_adhesion(CellType::Stem, CellType::Paneth, 6.0);
    for (auto t : kPopulations)
        if (t != CellType::Stem && t != CellType::Paneth)
            energy.motility[slot(t)] = 8.0;

    coupling.base_cycle = 35;
    coupling.noise_rate = 0.006;
    coupling.birth_volume = 8;
    coupling.division_volume = 16;
    coupling.division_threshold = 13;

    run.mix[slot(CellType::Stem)] = 150;
    run.mix[slot(CellType::TA1)] = 100;
    run.mix[slot(CellType::TA2A)] = 60;
    run.mix[slot(CellType::TA2B)] = 60;
    run.mix[slot(CellType::Paneth)] = 40;
    run.mix[slot(CellType::Goblet)] = 60;
    run.mix[slot(CellType::Enterocyte)] = 60;
    run.mix[slot(CellType::Enteroendocrine)] = 40;
}

void SimulationConfig::validate() const
{
    require(lattice.width >= 2, "lattice.width", "must be >= 2");
    require(lattice.height >= 2, "lattice.height", "must be >= 2");
    require(lattice.shed_band > 0 && lattice.shed_band < lattice.height, "lattice.shed_band", "must lie in (0, height)");

    require(nrbn.node_count >= 1 && nrbn.node_count <= 64, "nrbn.node_count", "must lie in [1, 64]");
    require(nrbn.in_degree < nrbn.node_count, "nrbn.in_degree", "must be smaller than nrbn.node_count");
    require(nrbn.bias >= 0.0 && nrbn.bias <= 1.0, "nrbn.bias", "must lie in [0, 1]");
    require(!nrbn.delta_schedule.empty(), "nrbn.delta_schedule", "must not be empty");
    for (std::size_t i = 0; i < nrbn.delta_schedule.size(); ++i) {
        const double d = nrbn.delta_schedule[i];
        require(d >= 0.0 && d <= 1.0, "nrbn.delta_schedule", "entries must lie in [0, 1]");
        require(i == 0 || d > nrbn.delta_schedule[i - 1], "nrbn.delta_schedule", "must be strictly increasing");
    }
    require(nrbn.sample_count >= 1, "nrbn.sample_count", "must be >= 1");
    require(nrbn.step_cap >= 1, "nrbn.step_cap", "must be >= 1");

    try {
        energy.validate();
        coupling.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::Config, e.what());
    }

    require(run.ticks >= 0, "run.ticks", "must be >= 0");
    require(run.replicates >= 1, "run.replicates", "must be >= 1");
    require(run.workers >= 1, "run.workers", "must be >= 1");
    require(!run.initial.empty(), "run.initial", "must name at least one configuration");
    for (const auto& spec : run.initial) {
        try {
            coupling::parse_initial_spec(spec);
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, std::string("run.initial: ") + e.what());
        }
    }
    require(run.cell_side >= 1 && run.cell_side <= std::min(lattice.width, lattice.height), "run.cell_side",
            "must fit the lattice");
    require(run.niche_rows >= run.cell_side && run.niche_rows <= lattice.height, "run.niche_rows",
            "must lie in [run.cell_side, lattice.height]");
    for (auto t : kPopulations)
        require(run.mix[slot(t)] >= 0, "run.mix." + std::string(type_key(t)), "must be >= 0");
    for (auto t : kPopulations)
        require(coupling.cycle_override[slot(t)] >= 0, "coupling.cycle." + std::string(type_key(t)), "must be >= 0");
    require(run.metrics_every >= 1, "run.metrics_every", "must be >= 1");
    require(run.snapshot_every >= 0, "run.snapshot_every", "must be >= 0");
    require(run.stationarity_window >= run.metrics_every && run.stationarity_window % run.metrics_every == 0,
            "run.stationarity_window", "must be a positive multiple of run.metrics_every");
    require(run.stationarity_tol > 0.0, "run.stationarity_tol", "must be positive");
    require(!run.output_dir.empty(), "run.output_dir", "must not be empty");

    if (metrics.moran_coding != "depth") {
        const auto t = parse_cell_type(metrics.moran_coding);
        require(t && *t != CellType::Medium, "metrics.moran_coding", "must be depth or a cell type name");
    }
}

coupling::LineageTopology SimulationConfig::topology() const
{
    if (topology_file.empty())
        return coupling::LineageTopology::standard();
    return coupling::load_topology(resolve(topology_file));
}

std::string SimulationConfig::resolve(const std::string& path) const
{
    const std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty())
        return path;
    return (std::filesystem::path(base_dir) / p).string();
}

bool operator==(const SimulationConfig& a, const SimulationConfig& b)
{
    return serialize_config(a) == serialize_config(b);
}

void set_config_value(SimulationConfig& cfg, const std::string& key, const std::string& value)
{
    for (const auto& k : keys()) {
        if (k.name == key) {
            k.set(cfg, value);
            return;
        }
    }
    throw Error(ErrorCode::Config, "unknown key '" + key + "'");
}

SimulationConfig parse_config(std::istream& in, const std::string& base_dir)
{
    SimulationConfig cfg;
    cfg.base_dir = base_dir;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = util::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": expected key = value");
        const auto key = util::trim(std::string_view(line).substr(0, eq));
        const auto value = util::trim(std::string_view(line).substr(eq + 1));
        try {
            set_config_value(cfg, key, value);
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

SimulationConfig parse_config_text(const std::string& text, const std::string& base_dir)
{
    std::istringstream in(text);
    return parse_config(in, base_dir);
}

SimulationConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Config, "cannot open config file " + path);
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse_config(in, dir.empty() ? "." : dir);
}

void write_config(std::ostream& out, const SimulationConfig& cfg)
{
    for (const auto& k : keys())
        out << k.name << " = " << k.get(cfg) << '\n';
}

std::string serialize_config(const SimulationConfig& cfg)
{
    std::ostringstream out;
    write_config(out, cfg);
    return out.str();
}

std::string config_hash(const SimulationConfig& cfg)
{
    std::string text;
    for (const auto& k : keys())
        if (k.name != "run.workers" && k.name != "run.output_dir")
            text += k.name + "=" + k.get(cfg) + "\n";
    return util::fnv1a_hex(text);
}

}  // namespace cryptsim::experiment
