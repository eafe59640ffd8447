#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cryptsim/cpm/lattice.hpp"

namespace cryptsim::cpm {

/// `W H` header, then H rows of W space-separated ids, base row (y = 0) first.
void write_lattice(std::ostream& out, const Lattice& lattice);
Lattice read_lattice(std::istream& in);

struct CellRecord {
    CellId id = kMedium;
    CellType type = CellType::Medium;
    int volume = 0;
    int target_volume = 1;
    Vec2 com;
};

/// Live cells in id order, com_x wrapped into [0, W).
std::vector<CellRecord> cell_records(const CellTable& cells, int lattice_width);

/// CSV `id,type,volume,target_volume,com_x,com_y`, exact round trip.
void write_cells_csv(std::ostream& out, const std::vector<CellRecord>& records);
void write_cells_csv(std::ostream& out, const CellTable& cells, int lattice_width);
std::vector<CellRecord> read_cells_csv(std::istream& in);

/// Rebuilds the cell table of a loaded lattice; volumes must agree with the records.
CellTable restore_cells(const Lattice& lattice, const std::vector<CellRecord>& records);

/// RGB color of each type slot in image output.
const std::array<std::array<std::uint8_t, 3>, kTypeSlots>& type_palette();

/// Binary PPM, apex row at the top; cell borders are darkened.
void write_ppm(std::ostream& out, const Lattice& lattice, const CellTable& cells);

}  // namespace cryptsim::cpm
