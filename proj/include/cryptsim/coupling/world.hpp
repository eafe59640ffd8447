#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cryptsim/coupling/model.hpp"
#include "cryptsim/cpm/dynamics.hpp"
#include "cryptsim/cpm/energy.hpp"
#include "cryptsim/cpm/lattice.hpp"
#include "cryptsim/rng.hpp"

namespace cryptsim::coupling {

/// Gene-network state of one cell. `node` indexes the lineage tree.
struct CryptCell {
    cpm::CellId id = cpm::kMedium;
    nrbn::AttractorId attractor = 0;
    std::size_t node = 0;
    double delta = 0.0;
    int cycle_clock = 0;
    int cycle_length = 1;

    friend bool operator==(const CryptCell&, const CryptCell&) = default;
};

struct CouplingParams {
    int base_cycle = 100;
    /// Expected noise events per cell per MCS.
    double noise_rate = 0.01;
    int birth_volume = 20;
    int division_volume = 40;
    /// Minimum actual volume for a division.
    int division_threshold = 34;
    bool live_nrbn = false;
    /// Per-type cycle length in MCS; 0 means base_cycle * attractor period.
    std::array<int, kTypeSlots> cycle_override{};

    void validate() const;
};

int cycle_length(const CryptCell& cell, CellType type, const DifferentiationModel& model, const CouplingParams& p);

/// A cell of `type` entering the lineage at that type's shallowest node.
CryptCell make_cell(cpm::CellId id, CellType type, const DifferentiationModel& model, const CouplingParams& p);

enum class NoiseOutcome { Unchanged, Suppressed, Moved, Differentiated };

/// One noise hit. A destination inside the cell's set moves the attractor and
/// commits the cell to the child set holding it, if any; a destination
/// outside is suppressed when its weight is at most the cell's delta.
NoiseOutcome noise_event(CryptCell& cell, const DifferentiationModel& model, Rng& rng, bool live = false);

enum class Directive { Grow, Divide, Rest };

/// Ticks the clock, ramps the target volume and decides on mitosis.
/// Post-mitotic types never divide.
Directive advance_cycle(CryptCell& cell, cpm::CellBody& body, const DifferentiationModel& model,
                        const CouplingParams& p);

std::pair<CryptCell, CryptCell> on_division(const CryptCell& parent, std::pair<cpm::CellId, cpm::CellId> daughters,
                                            const DifferentiationModel& model, const CouplingParams& p);

struct Event {
    long tick = 0;
    cpm::CellId cell = cpm::kMedium;
    std::string kind;
    CellType from = CellType::Medium;
    CellType to = CellType::Medium;
};

void write_event_log_header(std::ostream& out);
void write_event(std::ostream& out, const Event& e);

struct World {
    cpm::Lattice lattice;
    cpm::CellTable cells;
    /// Indexed by cell id; entries of dead cells are stale.
    std::vector<CryptCell> crypt;
    long tick = 0;

    CryptCell& state(cpm::CellId id);
    const CryptCell& state(cpm::CellId id) const;
    void adopt(const CryptCell& c);
};

struct TickSettings {
    cpm::EnergyParams energy;
    CouplingParams coupling;
    int shed_band = 4;
    bool divisions = true;
    bool shedding = true;
};

struct TickReport {
    cpm::SweepReport sweep;
    std::size_t noise_events = 0;
    std::size_t differentiations = 0;
    std::size_t divisions = 0;
    std::size_t shed = 0;
};

/// Sweep, noise, cycle and divisions, shedding, then the hook.
TickReport simulation_tick(World& world, const DifferentiationModel& model, const TickSettings& s, Rng& rng,
                           std::vector<Event>* events = nullptr,
                           const std::function<void(const World&)>& hook = {});

/// Throws internal-consistency if any cell's attractor, delta or type
/// disagrees with its lineage node, or the lattice bookkeeping is off.
void check_world(const World& world, const DifferentiationModel& model);

struct InitialSpec {
    enum class Kind { StemNiche, RandomMix, Snapshot };
    Kind kind = Kind::StemNiche;
    /// Lattice file of a snapshot; the cells CSV sits beside it.
    std::string snapshot_path;
    /// Stem blocks fill the bottom niche_rows rows.
    int niche_rows = 12;
    int cell_side = 5;
    std::array<int, kTypeSlots> mix{};
};

/// `stem-niche`, `random-mix` or `snapshot:<lattice file>`; sizes and counts keep their defaults.
InitialSpec parse_initial_spec(const std::string& text);
std::string format_initial_spec(const InitialSpec& spec);
/// `.../lattice_<t>.txt` -> `.../cells_<t>.csv`.
std::string cells_path_for(const std::string& lattice_path);

World make_world(const InitialSpec& spec, int width, int height, const DifferentiationModel& model,
                 const CouplingParams& p, Rng& rng);

}  // namespace cryptsim::coupling
