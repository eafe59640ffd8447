#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cryptsim/coupling/model.hpp"
#include "cryptsim/cpm/energy.hpp"
#include "cryptsim/error.hpp"
#include "cryptsim/nrbn/network.hpp"

namespace support {

/// Code of the library error thrown by f, if any.
template <class F>
std::optional<cryptsim::ErrorCode> error_code(F&& f)
{
    try {
        f();
    } catch (const cryptsim::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

using cryptsim::nrbn::BooleanNetwork;

// Brute-force reference dynamics. Deliberately written against the raw
// wiring and tables, with states as '0'/'1' strings, node 0 first.

inline std::string bits_of(std::uint64_t code, std::size_t n)
{
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i)
        if (code >> i & 1u)
            s[i] = '1';
    return s;
}

inline std::uint64_t code_of(const std::string& s)
{
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] == '1')
            c |= std::uint64_t{1} << i;
    return c;
}

inline std::uint64_t oracle_step(const BooleanNetwork& net, std::uint64_t code)
{
    std::uint64_t next = 0;
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        bool out;
        if (net.clamp(i)) {
            out = *net.clamp(i);
        } else {
            std::size_t row = 0;
            const auto& in = net.inputs(i);
            for (std::size_t m = 0; m < in.size(); ++m)
                row += static_cast<std::size_t>(code >> in[m] & 1u) << m;
            out = net.truth_table(i)[row];
        }
        if (out)
            next |= std::uint64_t{1} << i;
    }
    return next;
}

struct OracleDynamics {
    std::size_t n = 0;
    std::vector<std::uint64_t> successor;
    /// Canonical cycles (rotated to the smallest bit string), sorted.
    std::vector<std::vector<std::string>> cycles;
    /// Cycle index of every state lying on a cycle.
    std::map<std::uint64_t, std::size_t> on_cycle;

    std::size_t relax(std::uint64_t code) const
    {
        while (!on_cycle.count(code))
            code = successor[code];
        return on_cycle.at(code);
    }
};

inline OracleDynamics oracle_dynamics(const BooleanNetwork& net)
{
    OracleDynamics d;
    d.n = net.node_count();
    const std::uint64_t total = std::uint64_t{1} << d.n;
    d.successor.resize(total);
    for (std::uint64_t c = 0; c < total; ++c)
        d.successor[c] = oracle_step(net, c);

    // 0 unvisited, 1 on current path, 2 finished
    std::vector<std::uint8_t> mark(total, 0);
    std::vector<std::vector<std::string>> found;
    for (std::uint64_t start = 0; start < total; ++start) {
        std::vector<std::uint64_t> path;
        std::uint64_t c = start;
        while (mark[c] == 0) {
            mark[c] = 1;
            path.push_back(c);
            c = d.successor[c];
        }
        if (mark[c] == 1) {
            std::vector<std::string> cycle;
            auto it = std::find(path.begin(), path.end(), c);
            for (; it != path.end(); ++it)
                cycle.push_back(bits_of(*it, d.n));
            std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
            found.push_back(cycle);
        }
        for (auto p : path)
            mark[p] = 2;
    }
    std::sort(found.begin(), found.end());
    d.cycles = found;
    for (std::size_t k = 0; k < d.cycles.size(); ++k)
        for (const auto& s : d.cycles[k])
            d.on_cycle[code_of(s)] = k;
    return d;
}

/// counts[a][b]: perturbations of attractor a that settle on b.
inline std::vector<std::vector<std::uint64_t>> oracle_atm_counts(const OracleDynamics& d)
{
    const std::size_t m = d.cycles.size();
    std::vector<std::vector<std::uint64_t>> counts(m, std::vector<std::uint64_t>(m, 0));
    for (std::size_t a = 0; a < m; ++a)
        for (const auto& s : d.cycles[a])
            for (std::size_t j = 0; j < d.n; ++j)
                ++counts[a][d.relax(code_of(s) ^ (std::uint64_t{1} << j))];
    return counts;
}

/// Full Hamiltonian recomputed from the grid alone: every ordered pair of
/// neighboring sites, halved, plus the volume penalty from a fresh census.
inline double oracle_energy(const cryptsim::cpm::Lattice& lat, const cryptsim::cpm::CellTable& cells,
                            const cryptsim::cpm::EnergyParams& p)
{
    using namespace cryptsim::cpm;
    const int w = lat.width(), h = lat.height();
    std::vector<Site> offsets;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0)
                continue;
            if (p.contact == Neighborhood::VonNeumann && dx != 0 && dy != 0)
                continue;
            offsets.push_back({dx, dy});
        }
    double contact = 0.0;
    std::map<CellId, int> census;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const CellId a = lat.at(x, y);
            if (a != kMedium)
                ++census[a];
            for (auto d : offsets) {
                const int ny = y + d.y;
                if (ny < 0 || ny >= h)
                    continue;
                const int nx = ((x + d.x) % w + w) % w;
                const CellId b = lat.at(nx, ny);
                if (a != b)
                    contact += p.J(cells.type_of(a), cells.type_of(b));
            }
        }
    double volume = 0.0;
    for (auto [id, v] : census) {
        const double dv = v - cells[id].target_volume;
        volume += p.lambda_volume * dv * dv;
    }
    return contact / 2.0 + volume;
}

/// Master switch m with two mutually repressing targets:
/// m' = m, p' = m and not q, q' = m and not p. Optional inert fourth node
/// that reads m and always outputs 0.
inline BooleanNetwork master_switch_network(bool inert_node = false)
{
    std::vector<std::vector<cryptsim::nrbn::NodeIndex>> inputs{{0}, {0, 2}, {0, 1}};
    // table row j = input0 + 2 * input1
    std::vector<std::vector<bool>> tables{{false, true}, {false, true, false, false}, {false, true, false, false}};
    if (inert_node) {
        inputs.push_back({0});
        tables.push_back({false, false});
    }
    return BooleanNetwork(inputs, tables);
}

inline std::string two_leaf_topology_text()
{
    return "root: Stem\nStem -> Paneth\nStem -> TA1\n";
}

inline cryptsim::coupling::DifferentiationModel master_switch_model(bool inert_node = false)
{
    cryptsim::coupling::ModelSettings s;
    s.delta_schedule = {0.0, 0.4};
    return cryptsim::coupling::build_model(master_switch_network(inert_node), s,
                                           cryptsim::coupling::parse_topology(two_leaf_topology_text()));
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("cryptsim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace support
