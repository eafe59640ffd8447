#include "cryptsim/cpm/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cryptsim/error.hpp"

namespace cryptsim::cpm {

bool metropolis_accept(double delta_h, double temperature, Rng& rng)
{
    if (!(temperature > 0.0))
        throw Error(ErrorCode::InvalidParameter, "temperature must be positive");
    if (delta_h <= 0.0)
        return true;
    return rng.uniform() < std::exp(-delta_h / temperature);
}

bool would_fragment(const Lattice& lattice, Site target)
{
    static constexpr std::array<Site, 8> ring = {
        {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
    const CellId id = lattice.at(target);
    std::array<bool, 8> mine{};
    int count = 0;
    for (std::size_t k = 0; k < ring.size(); ++k) {
        Site n;
        mine[k] = lattice.neighbor(target, ring[k], n) && lattice.at(n) == id;
        count += mine[k];
    }
    if (count == 0 || count == 8)
        return false;
    int runs = 0;
    for (std::size_t k = 0; k < ring.size(); ++k)
        if (mine[k] && !mine[(k + 7) % 8])
            ++runs;
    return runs > 1;
}

void apply_copy(Lattice& lattice, CellTable& cells, const ProposedCopy& move)
{
    const CellId old = lattice.at(move.target);
    if (old != kMedium)
        detach_site(cells[old], move.target, lattice.width());
    if (move.candidate != kMedium)
        attach_site(cells[move.candidate], move.target, lattice.width());
    lattice.set(move.target, move.candidate);
}

SweepReport monte_carlo_sweep(Lattice& lattice, CellTable& cells, const EnergyParams& p, Rng& rng)
{
    SweepReport report;
    const auto offsets = neighbor_offsets(p.copy);
    const std::size_t n = lattice.site_count();
    for (std::size_t attempt = 0; attempt < n; ++attempt) {
        ++report.attempts;
        const Site target = lattice.site(rng.below(n));
        Site source;
        if (!lattice.neighbor(target, offsets[rng.below(offsets.size())], source))
            continue;
        const CellId current = lattice.at(target);
        const CellId candidate = lattice.at(source);
        if (current == candidate)
            continue;
        if (current != kMedium && cells[current].volume <= 1)
            continue;
        if (p.reject_fragmenting && current != kMedium && would_fragment(lattice, target))
            continue;
        const ProposedCopy move{target, source, candidate};
        if (!metropolis_accept(delta_energy(lattice, cells, move, p), p.temperature, rng))
            continue;
        apply_copy(lattice, cells, move);
        ++report.acceptances;
    }
    return report;
}

std::vector<Site> cell_sites(const Lattice& lattice, CellId id)
{
    std::vector<Site> out;
    const auto& spins = lattice.spins();
    for (std::size_t i = 0; i < spins.size(); ++i)
        if (spins[i] == id)
            out.push_back(lattice.site(i));
    return out;
}

namespace {

double wrapped_dx(double x, double cx, int width)
{
    double d = x - cx;
    d -= width * std::round(d / width);
    return d;
}

}  // namespace

std::pair<CellId, CellId> divide_cell(Lattice& lattice, CellTable& cells, CellId id, Rng& rng)
{
    if (!cells.contains(id))
        throw Error(ErrorCode::MissingCell, "no live cell " + std::to_string(id));
    CellBody& parent = cells[id];
    if (parent.volume < 2)
        throw Error(ErrorCode::TooSmallToDivide,
                    "cell " + std::to_string(id) + " has volume " + std::to_string(parent.volume));

    const auto sites = cell_sites(lattice, id);
    const Vec2 com = parent.center_of_mass();
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& s : sites) {
        const double dx = wrapped_dx(s.x, com.x, lattice.width());
        const double dy = s.y - com.y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // Principal axis of the larger second moment; the cut runs perpendicular to it.
    double ax = 1.0, ay = 0.0;
    const double scale = std::max({sxx, syy, 1.0});
    if (std::abs(sxy) > 1e-12 * scale) {
        const double lambda = 0.5 * (sxx + syy) + std::sqrt(0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy);
        ax = sxy;
        ay = lambda - sxx;
    } else if (syy > sxx) {
        ax = 0.0;
        ay = 1.0;
    }

    std::vector<bool> moves(sites.size());
    std::size_t moved = 0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const double dx = wrapped_dx(sites[i].x, com.x, lattice.width());
        const double dy = sites[i].y - com.y;
        moves[i] = dx * ax + dy * ay > 1e-9;
        moved += moves[i];
    }
    if (moved == 0 || moved == sites.size()) {
        std::vector<std::size_t> order(sites.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);
        std::fill(moves.begin(), moves.end(), false);
        for (std::size_t k = 0; k < sites.size() / 2; ++k)
            moves[order[k]] = true;
    }

    const int half = (parent.target_volume + 1) / 2;
    const CellId child = cells.create(parent.type, half);
    CellBody& kept = cells[id];
    kept.target_volume = half;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (!moves[i])
            continue;
        detach_site(kept, sites[i], lattice.width());
        attach_site(cells[child], sites[i], lattice.width());
        lattice.set(sites[i], child);
    }
    return {id, child};
}

std::vector<CellId> shed_apical_cells(Lattice& lattice, CellTable& cells, int shed_band)
{
    if (shed_band <= 0 || shed_band >= lattice.height())
        throw Error(ErrorCode::InvalidParameter, "shed_band must lie in (0, height)");
    const double limit = lattice.height() - shed_band;
    std::vector<CellId> removed;
    for (CellId id : cells.live_ids())
        if (cells[id].center_of_mass().y >= limit)
            removed.push_back(id);
    if (removed.empty())
        return removed;
    for (std::size_t i = 0; i < lattice.site_count(); ++i) {
        const Site s = lattice.site(i);
        const CellId spin = lattice.at(s);
        if (spin != kMedium && std::binary_search(removed.begin(), removed.end(), spin))
            lattice.set(s, kMedium);
    }
    for (CellId id : removed)
        cells.retire(id);
    return removed;
}

}  // namespace cryptsim::cpm
