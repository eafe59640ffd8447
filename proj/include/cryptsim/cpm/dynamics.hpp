#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cryptsim/cpm/energy.hpp"
#include "cryptsim/rng.hpp"

namespace cryptsim::cpm {

/// Metropolis rule: accept with probability min(1, exp(-delta_h / temperature)).
bool metropolis_accept(double delta_h, double temperature, Rng& rng);

struct SweepReport {
    std::size_t attempts = 0;
    std::size_t acceptances = 0;
};

/// True when removing `target` from its cell would split the cell's sites
/// around it into more than one 4-connected group.
bool would_fragment(const Lattice& lattice, Site target);

/// Writes the candidate spin into the target site and updates both bodies.
void apply_copy(Lattice& lattice, CellTable& cells, const ProposedCopy& move);

/// One Monte Carlo step: width * height copy attempts. A cell never loses
/// its last site.
SweepReport monte_carlo_sweep(Lattice& lattice, CellTable& cells, const EnergyParams& p, Rng& rng);

/// Sites currently owned by a cell, in scan order.
std::vector<Site> cell_sites(const Lattice& lattice, CellId id);

/// Splits a cell across its longest inertia axis. Returns (kept id, new id).
std::pair<CellId, CellId> divide_cell(Lattice& lattice, CellTable& cells, CellId id, Rng& rng);

/// Removes every live cell whose center of mass has y >= height - shed_band.
/// Returns the removed ids in ascending order.
std::vector<CellId> shed_apical_cells(Lattice& lattice, CellTable& cells, int shed_band);

}  // namespace cryptsim::cpm
