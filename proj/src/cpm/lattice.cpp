#include "cryptsim/cpm/lattice.hpp"

#include "cryptsim/error.hpp"

#include <cmath>

namespace cryptsim::cpm {

namespace {

constexpr std::array<Site, 4> kVonNeumann = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<Site, 8> kMoore = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

}  // namespace

std::span<const Site> neighbor_offsets(Neighborhood n)
{
    if (n == Neighborhood::Moore)
        return kMoore;
    return kVonNeumann;
}

Lattice::Lattice(int width, int height) : width_(width), height_(height)
{
    if (width < 1 || height < 1)
        throw Error(ErrorCode::InvalidParameter, "lattice dimensions must be positive");
    spins_.assign(static_cast<std::size_t>(width) * height, kMedium);
}

bool Lattice::neighbor(Site s, Site d, Site& out) const
{
    const int y = s.y + d.y;
    if (y < 0 || y >= height_)
        return false;
    int x = s.x + d.x;
    if (x < 0)
        x += width_;
    else if (x >= width_)
        x -= width_;
    out = {x, y};
    return true;
}

Vec2 CellBody::center_of_mass() const
{
    if (volume <= 0)
        return {};
    return {static_cast<double>(sum_x) / volume, static_cast<double>(sum_y) / volume};
}

CellTable::CellTable()
{
    cells_.push_back(CellBody{});
}

CellId CellTable::create(CellType type, int target_volume)
{
    CellBody body;
    body.id = static_cast<CellId>(cells_.size());
    body.type = type;
    body.target_volume = target_volume;
    body.alive = true;
    cells_.push_back(body);
    return body.id;
}

void CellTable::insert(const CellBody& body)
{
    if (body.id <= 0)
        throw Error(ErrorCode::InvalidParameter, "cell ids must be positive");
    const auto slot = static_cast<std::size_t>(body.id);
    if (slot >= cells_.size()) {
        cells_.resize(slot + 1);
        for (std::size_t i = 1; i < cells_.size(); ++i)
            cells_[i].id = static_cast<CellId>(i);
    }
    if (cells_[slot].alive)
        throw Error(ErrorCode::InvalidParameter, "duplicate cell id " + std::to_string(body.id));
    cells_[slot] = body;
}

void CellTable::retire(CellId id)
{
    if (!contains(id))
        throw Error(ErrorCode::MissingCell, "no live cell " + std::to_string(id));
    auto& c = cells_[static_cast<std::size_t>(id)];
    c.alive = false;
    c.volume = 0;
    c.sum_x = c.sum_y = 0;
}

bool CellTable::contains(CellId id) const
{
    return id > 0 && static_cast<std::size_t>(id) < cells_.size() && cells_[static_cast<std::size_t>(id)].alive;
}

std::vector<CellId> CellTable::live_ids() const
{
    std::vector<CellId> out;
    for (const auto& c : cells_)
        if (c.alive)
            out.push_back(c.id);
    return out;
}

std::size_t CellTable::live_count() const
{
    std::size_t n = 0;
    for (const auto& c : cells_)
        n += c.alive;
    return n;
}

namespace {

// x shifted by a multiple of the width to lie nearest the cell's current center.
std::int64_t unwrap_x(const CellBody& cell, int x, int width)
{
    if (cell.volume <= 0)
        return x;
    const double cx = static_cast<double>(cell.sum_x) / cell.volume;
    const double k = std::round((cx - x) / width);
    return x + static_cast<std::int64_t>(k) * width;
}

}  // namespace

void attach_site(CellBody& cell, Site s, int lattice_width)
{
    cell.sum_x += unwrap_x(cell, s.x, lattice_width);
    cell.sum_y += s.y;
    ++cell.volume;
}

void detach_site(CellBody& cell, Site s, int lattice_width)
{
    cell.sum_x -= unwrap_x(cell, s.x, lattice_width);
    cell.sum_y -= s.y;
    --cell.volume;
    if (cell.volume == 0)
        cell.sum_x = cell.sum_y = 0;
}

CellId place_block(Lattice& lattice, CellTable& cells, CellType type, int x0, int y0, int w, int h,
                   int target_volume)
{
    const CellId id = cells.create(type, target_volume);
    CellBody& body = cells[id];
    for (int dy = 0; dy < h; ++dy) {
        for (int dx = 0; dx < w; ++dx) {
            const Site s{(x0 + dx) % lattice.width(), y0 + dy};
            if (s.y < 0 || s.y >= lattice.height())
                throw Error(ErrorCode::InvalidParameter, "block leaves the lattice");
            if (lattice.at(s) != kMedium)
                throw Error(ErrorCode::InvalidParameter, "block overlaps an existing cell");
            lattice.set(s, id);
            attach_site(body, s, lattice.width());
        }
    }
    return id;
}

void check_bookkeeping(const Lattice& lattice, const CellTable& cells)
{
    std::vector<int> counts(static_cast<std::size_t>(cells.next_id()), 0);
    for (CellId spin : lattice.spins()) {
        if (spin == kMedium)
            continue;
        if (!cells.contains(spin))
            throw Error(ErrorCode::InternalConsistency, "spin " + std::to_string(spin) + " has no live cell");
        ++counts[static_cast<std::size_t>(spin)];
    }
    for (CellId id : cells.live_ids())
        if (counts[static_cast<std::size_t>(id)] != cells[id].volume)
            throw Error(ErrorCode::InternalConsistency,
                        "cell " + std::to_string(id) + " records volume " + std::to_string(cells[id].volume) +
                            " but occupies " + std::to_string(counts[static_cast<std::size_t>(id)]) + " sites");
}

}  // namespace cryptsim::cpm
