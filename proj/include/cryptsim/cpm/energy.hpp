#pragma once

#include "cryptsim/cpm/lattice.hpp"

#include <array>

namespace cryptsim::cpm {

struct EnergyParams {
    /// Contact energy J(a, b) per unlike-spin neighbor pair, row-major over
    /// the 9 type slots (Medium first). Kept symmetric by set_adhesion.
    std::array<double, kTypeSlots * kTypeSlots> adhesion{};
    double lambda_volume = 1.0;
    double temperature = 10.0;
    /// Upward-bias coefficient per type; Medium, Stem and Paneth stay 0.
    std::array<double, kTypeSlots> motility{};
    Neighborhood contact = Neighborhood::Moore;
    Neighborhood copy = Neighborhood::VonNeumann;
    bool reject_fragmenting = false;

    double J(CellType a, CellType b) const { return adhesion[slot(a) * kTypeSlots + slot(b)]; }
    void set_adhesion(CellType a, CellType b, double value);
    double mu(CellType t) const { return motility[slot(t)]; }

    /// Throws invalid-parameter naming the offending field.
    void validate() const;
};

/// Copy of the spin at `source` into the neighboring `target` site.
struct ProposedCopy {
    Site target;
    Site source;
    CellId candidate = kMedium;

    /// Throws invalid-proposal unless the sites are neighbors under
    /// `params.copy` and hold different spins.
    static ProposedCopy make(const Lattice& lattice, Site target, Site source, Neighborhood copy);
};

struct EnergyBreakdown {
    double adhesion = 0.0;
    double volume = 0.0;
    double motility = 0.0;

    double total() const { return adhesion + volume + motility; }
};

/// Contact + volume-constraint Hamiltonian. Contact pairs are counted once per
/// (site, neighbor offset) and halved, so a pair seen through two offsets
/// (narrow periodic lattices) counts twice.
double total_energy(const Lattice& lattice, const CellTable& cells, const EnergyParams& p);

/// Incremental change for a proposed copy, from the target's neighborhood and
/// the two affected volumes, plus the directed-motility work term.
EnergyBreakdown delta_energy_terms(const Lattice& lattice, const CellTable& cells, const ProposedCopy& move,
                                   const EnergyParams& p);

inline double delta_energy(const Lattice& lattice, const CellTable& cells, const ProposedCopy& move,
                           const EnergyParams& p)
{
    return delta_energy_terms(lattice, cells, move, p).total();
}

}  // namespace cryptsim::cpm
