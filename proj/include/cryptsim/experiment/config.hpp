#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cryptsim/coupling/lineage.hpp"
#include "cryptsim/coupling/world.hpp"
#include "cryptsim/cpm/energy.hpp"

namespace cryptsim::experiment {

struct LatticeConfig {
    int width = 64;
    int height = 128;
    int shed_band = 4;
    cpm::Neighborhood contact = cpm::Neighborhood::Moore;
    cpm::Neighborhood copy = cpm::Neighborhood::VonNeumann;
    bool operator==(const LatticeConfig&) const = default;
};

struct NrbnConfig {
    std::size_t node_count = 12;
    std::size_t in_degree = 2;
    double bias = 0.5;
    std::vector<double> delta_schedule{0.0, 0.1, 0.2, 0.3};
    bool sampled = false;
    std::size_t sample_count = 1000;
    std::size_t step_cap = 100000;
    std::size_t retry_cap = 1000;
    /// Fixed network instead of random generation; relative to the config file.
    std::string network_file;
    bool operator==(const NrbnConfig&) const = default;
};

struct RunConfig {
    long ticks = 10000;
    std::uint64_t seed = 1;
    std::size_t replicates = 1;
    std::size_t workers = 1;
    /// Initial configurations, cycled over replicates.
    std::vector<std::string> initial{"stem-niche"};
    int niche_rows = 12;
    int cell_side = 3;
    std::array<int, kTypeSlots> mix{};
    int metrics_every = 10;
    int snapshot_every = 100;
    long stationarity_window = 1000;
    double stationarity_tol = 0.1;
    bool shared_network = true;
    bool event_log = true;
    bool images = false;
    std::string output_dir = "out";
    bool operator==(const RunConfig&) const = default;
};

struct MetricsConfig {
    /// "depth" codes each type by its lineage depth; a type name gives a
    /// one-vs-rest indicator.
    std::string moran_coding = "depth";
    cpm::Neighborhood moran_adjacency = cpm::Neighborhood::VonNeumann;
    cpm::Neighborhood contact_adjacency = cpm::Neighborhood::Moore;
    bool operator==(const MetricsConfig&) const = default;
};

struct SimulationConfig {
    LatticeConfig lattice;
    NrbnConfig nrbn;
    cpm::EnergyParams energy;
    coupling::CouplingParams coupling;
    /// Empty: the built-in default topology.
    std::string topology_file;
    RunConfig run;
    MetricsConfig metrics;
    /// Directory that relative paths resolve against; not serialized.
    std::string base_dir;

    SimulationConfig();

    /// Throws invalid-parameter naming the offending key.
    void validate() const;
    coupling::LineageTopology topology() const;
    std::string resolve(const std::string& path) const;
};

bool operator==(const SimulationConfig& a, const SimulationConfig& b);

/// key = value lines, '#' comments. Unknown keys, bad values and failed
/// validation raise config errors with the line number or key.
SimulationConfig parse_config(std::istream& in, const std::string& base_dir = ".");
SimulationConfig parse_config_text(const std::string& text, const std::string& base_dir = ".");
SimulationConfig load_config(const std::string& path);
/// Applies one key=value override (CLI flags); throws config errors.
void set_config_value(SimulationConfig& cfg, const std::string& key, const std::string& value);

/// Every key, one per line, in a fixed order.
void write_config(std::ostream& out, const SimulationConfig& cfg);
std::string serialize_config(const SimulationConfig& cfg);

/// Hash of the serialized config without run.workers and run.output_dir.
std::string config_hash(const SimulationConfig& cfg);

}  // namespace cryptsim::experiment
