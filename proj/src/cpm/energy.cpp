#include "cryptsim/cpm/energy.hpp"

#include "cryptsim/error.hpp"

#include <cmath>
#include <string>

namespace cryptsim::cpm {

void EnergyParams::set_adhesion(CellType a, CellType b, double value)
{
    adhesion[slot(a) * kTypeSlots + slot(b)] = value;
    adhesion[slot(b) * kTypeSlots + slot(a)] = value;
}

void EnergyParams::validate() const
{
    for (std::size_t a = 0; a < kTypeSlots; ++a)
        for (std::size_t b = 0; b < kTypeSlots; ++b)
            if (adhesion[a * kTypeSlots + b] != adhesion[b * kTypeSlots + a] || !std::isfinite(adhesion[a * kTypeSlots + b]))
                throw Error(ErrorCode::InvalidParameter, "energy.adhesion must be finite and symmetric");
    if (!(lambda_volume >= 0.0))
        throw Error(ErrorCode::InvalidParameter, "energy.lambda_volume must be non-negative");
    if (!(temperature > 0.0))
        throw Error(ErrorCode::InvalidParameter, "energy.temperature must be positive");
    for (std::size_t t = 0; t < kTypeSlots; ++t)
        if (!(motility[t] >= 0.0))
            throw Error(ErrorCode::InvalidParameter,
                        "energy.motility." + std::string(type_key(static_cast<CellType>(t))) + " must be non-negative");
    for (CellType t : {CellType::Medium, CellType::Stem, CellType::Paneth})
        if (motility[slot(t)] != 0.0)
            throw Error(ErrorCode::InvalidParameter,
                        "energy.motility." + std::string(type_key(t)) + " must be 0 (this population does not migrate)");
}

ProposedCopy ProposedCopy::make(const Lattice& lattice, Site target, Site source, Neighborhood copy)
{
    bool adjacent = false;
    for (Site d : neighbor_offsets(copy)) {
        Site n;
        if (lattice.neighbor(target, d, n) && n == source)
            adjacent = true;
    }
    if (!adjacent)
        throw Error(ErrorCode::InvalidProposal, "source is not a neighbor of target");
    const CellId candidate = lattice.at(source);
    if (candidate == lattice.at(target))
        throw Error(ErrorCode::InvalidProposal, "source and target hold the same spin");
    return {target, source, candidate};
}

double total_energy(const Lattice& lattice, const CellTable& cells, const EnergyParams& p)
{
    check_bookkeeping(lattice, cells);
    double contact = 0.0;
    const auto offsets = neighbor_offsets(p.contact);
    for (std::size_t i = 0; i < lattice.site_count(); ++i) {
        const Site s = lattice.site(i);
        const CellId a = lattice.at(s);
        for (Site d : offsets) {
            Site n;
            if (!lattice.neighbor(s, d, n))
                continue;
            const CellId b = lattice.at(n);
            if (a != b)
                contact += p.J(cells.type_of(a), cells.type_of(b));
        }
    }
    double volume = 0.0;
    for (CellId id : cells.live_ids()) {
        const double dev = cells[id].volume - cells[id].target_volume;
        volume += dev * dev;
    }
    return 0.5 * contact + p.lambda_volume * volume;
}

EnergyBreakdown delta_energy_terms(const Lattice& lattice, const CellTable& cells, const ProposedCopy& move,
                                   const EnergyParams& p)
{
    const CellId current = lattice.at(move.target);
    const CellId incoming = move.candidate;
    if (current == incoming || lattice.at(move.source) != incoming)
        throw Error(ErrorCode::InvalidProposal, "stale or degenerate copy proposal");
    const CellType t_cur = cells.type_of(current);
    const CellType t_in = cells.type_of(incoming);

    EnergyBreakdown d;
    for (Site off : neighbor_offsets(p.contact)) {
        Site n;
        if (!lattice.neighbor(move.target, off, n) || n == move.target)
            continue;
        const CellId s = lattice.at(n);
        const CellType t = cells.type_of(s);
        if (s != incoming)
            d.adhesion += p.J(t_in, t);
        if (s != current)
            d.adhesion -= p.J(t_cur, t);
    }

    if (incoming != kMedium) {
        const CellBody& c = cells[incoming];
        d.volume += p.lambda_volume * (2.0 * (c.volume - c.target_volume) + 1.0);
    }
    if (current != kMedium) {
        const CellBody& c = cells[current];
        d.volume += p.lambda_volume * (-2.0 * (c.volume - c.target_volume) + 1.0);
    }

    // Both the growing and the retreating cell shift their centers along
    // (target - source), so both do work against an upward bias.
    const double dy = static_cast<double>(move.target.y - move.source.y);
    d.motility = -(p.mu(t_in) + p.mu(t_cur)) * dy;
    return d;
}

}  // namespace cryptsim::cpm
