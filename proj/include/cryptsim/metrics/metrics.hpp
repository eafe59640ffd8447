#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "cryptsim/cpm/lattice.hpp"
#include "cryptsim/cpm/snapshot.hpp"

namespace cryptsim::metrics {

using Proportions = std::array<double, kPopulationCount>;
using PopulationSeries = std::vector<Proportions>;

/// Fraction of live cells of each population, in kPopulations order. With
/// `site_weighted`, each cell counts by its volume.
Proportions population_proportions(const std::vector<cpm::CellRecord>& cells, bool site_weighted = false);
Proportions population_proportions(const cpm::CellTable& cells, bool site_weighted = false);

struct StationarityReport {
    bool stationary = false;
    /// L1 distance between the means of the last two windows.
    double l1 = 0.0;
    Proportions previous_mean{};
    Proportions final_mean{};
    Proportions final_sd{};
    double max_sd = 0.0;
};

/// Stationary iff the last two disjoint windows have mean vectors closer than
/// tol in L1 and every population's standard deviation in the final window is
/// below tol. Needs at least 2 * window samples.
StationarityReport stationarity_test(const PopulationSeries& series, std::size_t window, double tol);

double l1_distance(const Proportions& a, const Proportions& b);

/// Site-level Moran's I over non-medium sites; neighbors under `adjacency`
/// (x periodic) weigh 1. `coding` gives the value of each type slot.
double morans_index(const cpm::Lattice& lattice, const cpm::CellTable& cells,
                    const std::array<double, kTypeSlots>& coding, cpm::Neighborhood adjacency);
double morans_index(const cpm::Lattice& lattice, const std::vector<cpm::CellRecord>& cells,
                    const std::array<double, kTypeSlots>& coding, cpm::Neighborhood adjacency);

/// 1 for `type`, 0 for the other cell types.
std::array<double, kTypeSlots> one_vs_rest(CellType type);

struct CellVelocity {
    cpm::CellId id = cpm::kMedium;
    CellType type = CellType::Medium;
    /// Center-of-mass displacement over the window, x taken across the seam
    /// by the shortest image.
    cpm::Vec2 displacement;
    int volume = 0;
};

struct VelocityField {
    int window = 1;
    std::vector<CellVelocity> cells;  // ascending id

    double speed(const CellVelocity& v) const;
};

/// Cells alive in both snapshots, `window` MCS apart.
VelocityField velocity_field(const std::vector<cpm::CellRecord>& before, const std::vector<cpm::CellRecord>& after,
                             int window, int lattice_width);

/// Unordered pairs (a < b) of distinct cells sharing at least one site contact.
std::vector<std::pair<cpm::CellId, cpm::CellId>> contact_pairs(const cpm::Lattice& lattice,
                                                               cpm::Neighborhood adjacency);

struct MotionCorrelation {
    /// Pearson r of paired velocity components, x and y pooled, each pair
    /// entered in both orders. NaN when the components have no variance.
    double pearson_r = 0.0;
    /// Mean cosine between the two velocities of pairs with nonzero speeds;
    /// NaN when no such pair exists.
    double mean_direction_cosine = 0.0;
    std::size_t pairs = 0;
};

/// Needs at least 2 contacting pairs with velocities; throws insufficient-data otherwise.
MotionCorrelation neighbor_velocity_correlation(const VelocityField& field,
                                                const std::vector<std::pair<cpm::CellId, cpm::CellId>>& contacts);

struct Distribution {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double q10 = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
};

/// Linear-interpolated quantiles; an empty sample gives zeros.
Distribution describe(std::vector<double> values);

struct TypeStats {
    CellType type = CellType::Medium;
    Distribution speed;   // sites per MCS
    Distribution volume;  // sites
};

/// Per-population speed and size distributions pooled over every window.
std::vector<TypeStats> speed_size_stats(const std::vector<VelocityField>& history);

void write_type_stats_csv(std::ostream& out, const std::vector<TypeStats>& stats);

}  // namespace cryptsim::metrics
