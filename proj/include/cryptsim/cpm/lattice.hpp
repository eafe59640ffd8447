#pragma once

#include "cryptsim/cell_type.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cryptsim::cpm {

using CellId = std::int32_t;
inline constexpr CellId kMedium = 0;

struct Site {
    int x = 0;
    int y = 0;
    friend bool operator==(const Site&, const Site&) = default;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Neighborhood order: 1 = von Neumann (4 sites), 2 = Moore (8 sites).
enum class Neighborhood : int { VonNeumann = 1, Moore = 2 };

std::span<const Site> neighbor_offsets(Neighborhood n);

/// Unrolled crypt wall: periodic in x, closed at the base (y = 0) and the
/// apex (y = height - 1). Each site holds a cell id, 0 being medium.
class Lattice {
public:
    Lattice() = default;
    Lattice(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t site_count() const { return spins_.size(); }

    CellId at(Site s) const { return spins_[index(s)]; }
    CellId at(int x, int y) const { return spins_[index({x, y})]; }
    void set(Site s, CellId id) { spins_[index(s)] = id; }

    std::size_t index(Site s) const { return static_cast<std::size_t>(s.y) * width_ + s.x; }
    Site site(std::size_t index) const
    {
        return {static_cast<int>(index % width_), static_cast<int>(index / width_)};
    }

    /// Neighbor of s at offset d with x wrapped; false past the base or apex.
    bool neighbor(Site s, Site d, Site& out) const;

    const std::vector<CellId>& spins() const { return spins_; }

    friend bool operator==(const Lattice&, const Lattice&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<CellId> spins_;
};

/// Mechanical state of one cell. Coordinate sums are kept as integers with x
/// unwrapped across the seam, so the center of mass is exact and continuous.
struct CellBody {
    CellId id = kMedium;
    CellType type = CellType::Medium;
    int volume = 0;
    int target_volume = 1;
    std::int64_t sum_x = 0;
    std::int64_t sum_y = 0;
    bool alive = false;

    Vec2 center_of_mass() const;

    friend bool operator==(const CellBody&, const CellBody&) = default;
};

/// Cells indexed by id; slot 0 is a placeholder for medium.
class CellTable {
public:
    CellTable();

    CellId create(CellType type, int target_volume);
    /// Registers a cell under a given id (snapshot loading).
    void insert(const CellBody& body);
    /// Marks a cell dead; its sites must already be cleared.
    void retire(CellId id);

    bool contains(CellId id) const;
    CellBody& operator[](CellId id) { return cells_[static_cast<std::size_t>(id)]; }
    const CellBody& operator[](CellId id) const { return cells_[static_cast<std::size_t>(id)]; }

    CellType type_of(CellId id) const { return cells_[static_cast<std::size_t>(id)].type; }

    std::vector<CellId> live_ids() const;
    std::size_t live_count() const;
    CellId next_id() const { return static_cast<CellId>(cells_.size()); }

    friend bool operator==(const CellTable&, const CellTable&) = default;

private:
    std::vector<CellBody> cells_;
};

/// Adds site s to cell id (volume and center-of-mass bookkeeping only).
void attach_site(CellBody& cell, Site s, int lattice_width);
void detach_site(CellBody& cell, Site s, int lattice_width);

/// Puts a cell on a rectangle of sites; returns the new id.
CellId place_block(Lattice& lattice, CellTable& cells, CellType type, int x0, int y0, int w, int h,
                   int target_volume);

/// Recounts volumes from the grid and throws internal-consistency on mismatch,
/// or when a nonzero spin has no live cell.
void check_bookkeeping(const Lattice& lattice, const CellTable& cells);

}  // namespace cryptsim::cpm
