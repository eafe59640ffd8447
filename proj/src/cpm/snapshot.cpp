#include "cryptsim/cpm/snapshot.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "cryptsim/error.hpp"
#include "cryptsim/util/format.hpp"

namespace cryptsim::cpm {

void write_lattice(std::ostream& out, const Lattice& lattice)
{
    out << lattice.width() << ' ' << lattice.height() << '\n';
    for (int y = 0; y < lattice.height(); ++y) {
        for (int x = 0; x < lattice.width(); ++x) {
            if (x)
                out << ' ';
            out << lattice.at(x, y);
        }
        out << '\n';
    }
}

Lattice read_lattice(std::istream& in)
{
    int w = 0, h = 0;
    if (!(in >> w >> h) || w < 1 || h < 1)
        throw Error(ErrorCode::Io, "lattice snapshot: bad header");
    Lattice lattice(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            CellId id = 0;
            if (!(in >> id) || id < 0)
                throw Error(ErrorCode::Io, "lattice snapshot: bad spin at row " + std::to_string(y));
            lattice.set({x, y}, id);
        }
    return lattice;
}

std::vector<CellRecord> cell_records(const CellTable& cells, int lattice_width)
{
    std::vector<CellRecord> out;
    for (CellId id : cells.live_ids()) {
        const auto& c = cells[id];
        Vec2 com = c.center_of_mass();
        com.x = std::fmod(com.x, lattice_width);
        if (com.x < 0)
            com.x += lattice_width;
        out.push_back({id, c.type, c.volume, c.target_volume, com});
    }
    return out;
}

void write_cells_csv(std::ostream& out, const std::vector<CellRecord>& records)
{
    out << "id,type,volume,target_volume,com_x,com_y\n";
    for (const auto& r : records)
        out << r.id << ',' << type_key(r.type) << ',' << r.volume << ',' << r.target_volume << ','
            << util::format_double(r.com.x) << ',' << util::format_double(r.com.y) << '\n';
}

void write_cells_csv(std::ostream& out, const CellTable& cells, int lattice_width)
{
    write_cells_csv(out, cell_records(cells, lattice_width));
}

std::vector<CellRecord> read_cells_csv(std::istream& in)
{
    std::vector<CellRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = util::trim(line);
        if (line.empty() || (lineno == 1 && line.rfind("id,", 0) == 0))
            continue;
        const auto f = util::split(line, ',');
        if (f.size() != 6)
            throw Error(ErrorCode::Io, "cells csv line " + std::to_string(lineno) + ": expected 6 fields");
        try {
            CellRecord r;
            r.id = std::stoi(f[0]);
            const auto type = parse_cell_type(f[1]);
            if (!type || *type == CellType::Medium)
                throw Error(ErrorCode::Io, "cells csv line " + std::to_string(lineno) + ": unknown type " + f[1]);
            r.type = *type;
            r.volume = std::stoi(f[2]);
            r.target_volume = std::stoi(f[3]);
            r.com = Vec2{std::stod(f[4]), std::stod(f[5])};
            out.push_back(r);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error(ErrorCode::Io, "cells csv line " + std::to_string(lineno) + ": bad number");
        }
    }
    return out;
}

CellTable restore_cells(const Lattice& lattice, const std::vector<CellRecord>& records)
{
    CellTable cells;
    for (const auto& r : records) {
        CellBody b;
        b.id = r.id;
        b.type = r.type;
        b.target_volume = r.target_volume;
        b.alive = true;
        cells.insert(b);
    }
    // Attach sites starting from the recorded center so seam-crossing cells stay contiguous.
    for (const auto& r : records) {
        auto& b = cells[r.id];
        for (std::size_t i = 0; i < lattice.site_count(); ++i) {
            if (lattice.spins()[i] != r.id)
                continue;
            const Site s = lattice.site(i);
            const double k = std::round((r.com.x - s.x) / lattice.width());
            b.sum_x += s.x + static_cast<std::int64_t>(k) * lattice.width();
            b.sum_y += s.y;
            ++b.volume;
        }
        if (b.volume != r.volume)
            throw Error(ErrorCode::InternalConsistency,
                        "cell " + std::to_string(r.id) + " records volume " + std::to_string(r.volume) +
                            " but occupies " + std::to_string(b.volume) + " sites");
    }
    check_bookkeeping(lattice, cells);
    return cells;
}

const std::array<std::array<std::uint8_t, 3>, kTypeSlots>& type_palette()
{
    static const std::array<std::array<std::uint8_t, 3>, kTypeSlots> palette = {{
        {235, 235, 235},  // medium
        {200, 30, 30},    // stem
        {240, 150, 40},   // TA1
        {240, 220, 60},   // TA2-A
        {150, 210, 70},   // TA2-B
        {120, 40, 160},   // Paneth
        {40, 160, 200},   // goblet
        {40, 80, 200},    // enterocyte
        {30, 150, 100},   // enteroendocrine
    }};
    return palette;
}

void write_ppm(std::ostream& out, const Lattice& lattice, const CellTable& cells)
{
    const int w = lattice.width(), h = lattice.height();
    out << "P6\n" << w << ' ' << h << "\n255\n";
    for (int y = h - 1; y >= 0; --y) {
        for (int x = 0; x < w; ++x) {
            const CellId id = lattice.at(x, y);
            auto rgb = type_palette()[slot(cells.type_of(id))];
            Site n;
            const bool border = id != kMedium && ((lattice.neighbor({x, y}, {1, 0}, n) && lattice.at(n) != id) ||
                                                  (lattice.neighbor({x, y}, {0, 1}, n) && lattice.at(n) != id));
            if (border)
                for (auto& c : rgb)
                    c = static_cast<std::uint8_t>(c * 0.6);
            out.write(reinterpret_cast<const char*>(rgb.data()), 3);
        }
    }
}

}  // namespace cryptsim::cpm
