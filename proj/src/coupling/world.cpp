#include "cryptsim/coupling/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "cryptsim/cpm/snapshot.hpp"
#include "cryptsim/error.hpp"

namespace cryptsim::coupling {

void CouplingParams::validate() const
{
    auto fail = [](const std::string& field, const std::string& rule) {
        throw Error(ErrorCode::InvalidParameter, "coupling." + field + " " + rule);
    };
    if (base_cycle < 1)
        fail("base_cycle", "must be >= 1");
    if (!(noise_rate >= 0.0) || !std::isfinite(noise_rate))
        fail("noise_rate", "must be >= 0");
    if (birth_volume < 1)
        fail("birth_volume", "must be >= 1");
    if (division_volume < birth_volume)
        fail("division_volume", "must be >= birth_volume");
    if (division_threshold < 2)
        fail("division_threshold", "must be >= 2");
    for (std::size_t i = 0; i < cycle_override.size(); ++i)
        if (cycle_override[i] < 0)
            fail("cycle." + std::string(type_key(static_cast<CellType>(i))), "must be >= 0");
}

int cycle_length(const CryptCell& cell, CellType type, const DifferentiationModel& model, const CouplingParams& p)
{
    if (const int o = p.cycle_override[slot(type)]; o > 0)
        return o;
    return p.base_cycle * static_cast<int>(model.period_of(cell.attractor));
}

CryptCell make_cell(cpm::CellId id, CellType type, const DifferentiationModel& model, const CouplingParams& p)
{
    CryptCell c;
    c.id = id;
    c.node = model.entry_node(type);
    c.attractor = model.initial_attractor(c.node);
    c.delta = model.delta_of(c.node);
    c.cycle_length = cycle_length(c, model.type_of(c.node), model, p);
    return c;
}

NoiseOutcome noise_event(CryptCell& cell, const DifferentiationModel& model, Rng& rng, bool live)
{
    const auto to = sample_destination(model, cell.attractor, live, rng);
    if (to == cell.attractor)
        return NoiseOutcome::Unchanged;
    const auto& node = model.tree.nodes.at(cell.node);
    if (!node.contains(to)) {
        if (model.atm.weight(cell.attractor, to) <= cell.delta)
            return NoiseOutcome::Suppressed;
        throw Error(ErrorCode::Inconsistency, "attractor " + std::to_string(to + 1) +
                                                  " escapes the ergodic set of lineage node " +
                                                  std::to_string(cell.node));
    }
    cell.attractor = to;
    for (auto c : node.children) {
        if (model.tree.nodes[c].contains(to)) {
            cell.node = c;
            cell.delta = model.delta_of(c);
            return NoiseOutcome::Differentiated;
        }
    }
    return NoiseOutcome::Moved;
}

Directive advance_cycle(CryptCell& cell, cpm::CellBody& body, const DifferentiationModel& model,
                        const CouplingParams& p)
{
    ++cell.cycle_clock;
    const double progress = std::min(1.0, static_cast<double>(cell.cycle_clock) / cell.cycle_length);
    body.target_volume =
        static_cast<int>(std::lround(p.birth_volume + (p.division_volume - p.birth_volume) * progress));
    if (cell.cycle_clock < cell.cycle_length)
        return Directive::Grow;
    if (model.types.post_mitotic(model.type_of(cell.node)))
        return Directive::Rest;
    return body.volume >= p.division_threshold ? Directive::Divide : Directive::Grow;
}

std::pair<CryptCell, CryptCell> on_division(const CryptCell& parent, std::pair<cpm::CellId, cpm::CellId> daughters,
                                            const DifferentiationModel& model, const CouplingParams& p)
{
    CryptCell a = parent;
    a.cycle_clock = 0;
    a.cycle_length = cycle_length(a, model.type_of(a.node), model, p);
    CryptCell b = a;
    a.id = daughters.first;
    b.id = daughters.second;
    return {a, b};
}

void write_event_log_header(std::ostream& out)
{
    out << "tick,cell_id,event,from_type,to_type\n";
}

void write_event(std::ostream& out, const Event& e)
{
    out << e.tick << ',' << e.cell << ',' << e.kind << ',' << type_key(e.from) << ',' << type_key(e.to) << '\n';
}

CryptCell& World::state(cpm::CellId id)
{
    return crypt.at(static_cast<std::size_t>(id));
}

const CryptCell& World::state(cpm::CellId id) const
{
    return crypt.at(static_cast<std::size_t>(id));
}

void World::adopt(const CryptCell& c)
{
    const auto i = static_cast<std::size_t>(c.id);
    if (crypt.size() <= i)
        crypt.resize(i + 1);
    crypt[i] = c;
}

TickReport simulation_tick(World& world, const DifferentiationModel& model, const TickSettings& s, Rng& rng,
                           std::vector<Event>* events, const std::function<void(const World&)>& hook)
{
    TickReport report;
    ++world.tick;
    report.sweep = cpm::monte_carlo_sweep(world.lattice, world.cells, s.energy, rng);

    const auto ids = world.cells.live_ids();
    for (auto id : ids) {
        auto& cell = world.state(id);
        const auto hits = rng.poisson(s.coupling.noise_rate);
        for (std::uint64_t k = 0; k < hits; ++k) {
            ++report.noise_events;
            const CellType before = model.type_of(cell.node);
            if (noise_event(cell, model, rng, s.coupling.live_nrbn) != NoiseOutcome::Differentiated)
                continue;
            const CellType after = model.type_of(cell.node);
            cell.cycle_length = cycle_length(cell, after, model, s.coupling);
            world.cells[id].type = after;
            ++report.differentiations;
            if (events && after != before)
                events->push_back({world.tick, id, "differentiate", before, after});
        }
    }

    for (auto id : ids) {
        auto& cell = world.state(id);
        const auto directive = advance_cycle(cell, world.cells[id], model, s.coupling);
        if (directive != Directive::Divide || !s.divisions)
            continue;
        const CryptCell parent = cell;
        const auto pair = cpm::divide_cell(world.lattice, world.cells, id, rng);
        auto [a, b] = on_division(parent, pair, model, s.coupling);
        world.cells[a.id].target_volume = s.coupling.birth_volume;
        world.cells[b.id].target_volume = s.coupling.birth_volume;
        world.adopt(a);
        world.adopt(b);
        ++report.divisions;
        if (events)
            events->push_back({world.tick, pair.second, "divide", world.cells[id].type, world.cells[id].type});
    }

    if (s.shedding) {
        for (auto id : cpm::shed_apical_cells(world.lattice, world.cells, s.shed_band)) {
            ++report.shed;
            if (events)
                events->push_back({world.tick, id, "shed", world.cells[id].type, CellType::Medium});
        }
    }

    if (hook)
        hook(world);
    return report;
}

void check_world(const World& world, const DifferentiationModel& model)
{
    cpm::check_bookkeeping(world.lattice, world.cells);
    for (auto id : world.cells.live_ids()) {
        const auto& c = world.state(id);
        const auto& node = model.tree.nodes.at(c.node);
        std::string problem;
        if (c.id != id)
            problem = "state id mismatch";
        else if (!node.contains(c.attractor))
            problem = "attractor outside its lineage set";
        else if (c.delta != node.delta)
            problem = "delta differs from its level";
        else if (world.cells[id].type != model.type_of(c.node))
            problem = "type differs from its lineage node";
        if (!problem.empty())
            throw Error(ErrorCode::InternalConsistency, "cell " + std::to_string(id) + ": " + problem);
    }
}

InitialSpec parse_initial_spec(const std::string& text)
{
    InitialSpec spec;
    if (text == "stem-niche")
        spec.kind = InitialSpec::Kind::StemNiche;
    else if (text == "random-mix")
        spec.kind = InitialSpec::Kind::RandomMix;
    else if (text.rfind("snapshot:", 0) == 0 && text.size() > 9) {
        spec.kind = InitialSpec::Kind::Snapshot;
        spec.snapshot_path = text.substr(9);
    } else
        throw Error(ErrorCode::InvalidParameter,
                    "initial configuration must be stem-niche, random-mix or snapshot:<path>, got '" + text + "'");
    return spec;
}

std::string format_initial_spec(const InitialSpec& spec)
{
    switch (spec.kind) {
    case InitialSpec::Kind::StemNiche: return "stem-niche";
    case InitialSpec::Kind::RandomMix: return "random-mix";
    case InitialSpec::Kind::Snapshot: return "snapshot:" + spec.snapshot_path;
    }
    return {};
}

std::string cells_path_for(const std::string& lattice_path)
{
    std::string out = lattice_path;
    const auto slash = out.find_last_of('/');
    const auto base = slash == std::string::npos ? 0 : slash + 1;
    if (out.compare(base, 8, "lattice_") == 0)
        out.replace(base, 8, "cells_");
    if (out.size() >= 4 && out.compare(out.size() - 4, 4, ".txt") == 0)
        out.replace(out.size() - 4, 4, ".csv");
    else
        out += ".csv";
    return out;
}

namespace {

void seed_cell(World& w, cpm::CellId id, CellType type, const DifferentiationModel& model, const CouplingParams& p,
               Rng& rng)
{
    auto c = make_cell(id, type, model, p);
    c.cycle_clock = static_cast<int>(rng.below(static_cast<std::uint64_t>(c.cycle_length)));
    w.cells[id].type = model.type_of(c.node);
    w.adopt(c);
}

}  // namespace

World make_world(const InitialSpec& spec, int width, int height, const DifferentiationModel& model,
                 const CouplingParams& p, Rng& rng)
{
    World w;
    if (spec.kind == InitialSpec::Kind::Snapshot) {
        std::ifstream lin(spec.snapshot_path);
        const auto cells_path = cells_path_for(spec.snapshot_path);
        std::ifstream cin(cells_path);
        if (!lin || !cin)
            throw Error(ErrorCode::Io, "cannot read snapshot " + spec.snapshot_path + " / " + cells_path);
        w.lattice = cpm::read_lattice(lin);
        if (w.lattice.width() != width || w.lattice.height() != height)
            throw Error(ErrorCode::InvalidParameter, "snapshot lattice size differs from lattice.width/height");
        const auto records = cpm::read_cells_csv(cin);
        w.cells = cpm::restore_cells(w.lattice, records);
        for (const auto& r : records)
            seed_cell(w, r.id, r.type, model, p, rng);
        return w;
    }

    w.lattice = cpm::Lattice(width, height);
    const int side = spec.cell_side;
    if (side < 1 || side > width || side > height)
        throw Error(ErrorCode::InvalidParameter, "run.cell_side must fit the lattice");
    if (spec.kind == InitialSpec::Kind::StemNiche) {
        if (spec.niche_rows < side || spec.niche_rows > height)
            throw Error(ErrorCode::InvalidParameter, "run.niche_rows must lie in [cell_side, height]");
        for (int y = 0; y + side <= spec.niche_rows; y += side)
            for (int x = 0; x + side <= width; x += side) {
                const auto id = cpm::place_block(w.lattice, w.cells, CellType::Stem, x, y, side, side,
                                                 p.birth_volume);
                seed_cell(w, id, CellType::Stem, model, p, rng);
            }
        return w;
    }

    // Random mix: shuffled grid slots, filled in type order.
    std::vector<std::pair<int, int>> slots;
    for (int y = 0; y + side <= height; y += side)
        for (int x = 0; x + side <= width; x += side)
            slots.emplace_back(x, y);
    for (std::size_t i = slots.size(); i > 1; --i)
        std::swap(slots[i - 1], slots[rng.below(i)]);
    std::size_t next = 0;
    for (auto t : kPopulations) {
        for (int k = 0; k < spec.mix[slot(t)]; ++k) {
            if (next == slots.size())
                throw Error(ErrorCode::InvalidParameter, "run.mix counts exceed the lattice capacity");
            const auto [x, y] = slots[next++];
            const auto id = cpm::place_block(w.lattice, w.cells, t, x, y, side, side, p.birth_volume);
            seed_cell(w, id, t, model, p, rng);
        }
    }
    return w;
}

}  // namespace cryptsim::coupling
