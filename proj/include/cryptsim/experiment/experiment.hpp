#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cryptsim/coupling/model.hpp"
#include "cryptsim/experiment/config.hpp"
#include "cryptsim/metrics/metrics.hpp"

namespace cryptsim::experiment {

struct Experiment {
    coupling::DifferentiationModel model;
    /// Networks generated, including the accepted one.
    std::size_t attempts = 0;
    /// Rejected networks per error kind.
    std::map<std::string, std::size_t> rejections;
    /// "random" or the network file path.
    std::string source;
};

coupling::ModelSettings model_settings(const SimulationConfig& cfg);
coupling::TickSettings tick_settings(const SimulationConfig& cfg);

/// Random network -> attractors -> ATM -> hierarchy -> lineage match, retried
/// up to nrbn.retry_cap times; with nrbn.network_file set, that network only.
/// Throws no-compatible-network with per-cause counts when nothing fits.
Experiment setup_experiment(const SimulationConfig& cfg, std::uint64_t seed);

/// Type coding for Moran's I: lineage depth or one-vs-rest.
std::array<double, kTypeSlots> moran_coding(const SimulationConfig& cfg);

struct MetricsRow {
    long tick = 0;
    metrics::Proportions proportions{};
    double morans_i = 0.0;
    double pearson_r = 0.0;
    double mean_direction_cosine = 0.0;
    double mean_speed = 0.0;
};

/// All per-sample metrics from one snapshot and the cell records `window`
/// MCS earlier. Undefined statistics come out as NaN.
MetricsRow compute_metrics_row(long tick, const cpm::Lattice& lattice, const std::vector<cpm::CellRecord>& now,
                               const std::vector<cpm::CellRecord>& before, int window, const SimulationConfig& cfg);

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);

struct ReplicateOutcome {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::string initial;
    std::filesystem::path dir;
    bool ok = false;
    std::string error;
    std::vector<std::string> files;
    long ticks_run = 0;
    std::size_t final_cells = 0;
    std::optional<metrics::StationarityReport> stationarity;
};

/// One simulation into `dir`: config.txt, metrics.csv, events.csv,
/// type_stats.csv, snapshots/ and the final snapshot. Failures are reported,
/// never thrown.
ReplicateOutcome run_replicate(const SimulationConfig& cfg, const coupling::DifferentiationModel& model,
                               std::size_t index, const std::filesystem::path& dir);

struct RunSummary {
    std::string config_hash;
    std::filesystem::path dir;
    std::vector<ReplicateOutcome> replicates;
    std::size_t completed = 0;
    /// Largest L1 distance between final-window means of completed replicates.
    std::optional<double> max_pairwise_l1;
    bool degenerate = false;
};

/// Replicates seed, seed+1, ... over run.workers threads, then manifest.json.
/// Refuses an output directory whose manifest carries a different config hash.
RunSummary run_replicates(const SimulationConfig& cfg);

struct KnockoutSummary {
    RunSummary control;
    RunSummary knockout;
    bool degenerate = false;
    bool hierarchies_identical = false;
};

/// Control and knocked-out replicate sets under run.output_dir/control and
/// run.output_dir/knockout, plus knockout.json.
KnockoutSummary run_knockout_experiment(const SimulationConfig& cfg, std::size_t node, bool value);

/// Writes the network, attractors, ATM, hierarchy and type map into dir.
std::vector<std::string> write_model_files(const coupling::DifferentiationModel& model, const std::filesystem::path& dir);

/// Recomputes metrics rows from lattice_<t>.txt, cells_<t>.csv and
/// cells_<t>_prev.csv under dir (or dir/snapshots), using the config.txt
/// found in dir or its parent. Rows are in tick order.
std::vector<MetricsRow> recompute_metrics(const std::filesystem::path& dir);

}  // namespace cryptsim::experiment
