#include "cryptsim/nrbn/design.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <optional>

#include "cryptsim/error.hpp"
#include "cryptsim/nrbn/attractor.hpp"
#include "cryptsim/rng.hpp"

namespace cryptsim::nrbn {
namespace {

std::uint64_t project(std::uint64_t x, std::size_t j)
{
    const std::uint64_t low = x & ((std::uint64_t{1} << j) - 1);
    return low | ((x >> (j + 1)) << j);
}

std::optional<std::vector<std::uint64_t>> pick_codes(std::size_t n, std::size_t m,
                                                     std::size_t min_distance, Rng& rng)
{
    std::vector<std::uint64_t> codes;
    for (std::size_t attempt = 0; attempt < 10000 && codes.size() < m; ++attempt) {
        const std::uint64_t c = rng.next() & ((std::uint64_t{1} << n) - 1);
        bool far = true;
        for (auto d : codes)
            far = far && static_cast<std::size_t>(std::popcount(c ^ d)) >= min_distance;
        if (far)
            codes.push_back(c);
    }
    if (codes.size() < m)
        return std::nullopt;
    return codes;
}

// target[a][i] = fixed point reached by flipping bit i of a.
std::optional<std::vector<std::vector<std::size_t>>> assign_bits(
    const FlipDesign& d, const std::vector<std::uint64_t>& codes, Rng& rng)
{
    const std::size_t n = d.node_count, m = codes.size();
    std::vector<std::vector<std::size_t>> target(m, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < m; ++a) {
        std::vector<bool> used(n, false);
        std::fill(target[a].begin(), target[a].end(), a);
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        auto agree = [&](std::size_t b) {
            return n - static_cast<std::size_t>(std::popcount(codes[a] ^ codes[b]));
        };
        std::sort(order.begin(), order.end(), [&](auto x, auto y) { return agree(x) < agree(y); });
        for (auto b : order) {
            if (b == a || d.flips[a][b] == 0)
                continue;
            std::vector<std::size_t> free;
            for (std::size_t i = 0; i < n; ++i)
                if (!used[i] && ((codes[a] ^ codes[b]) >> i & 1u) == 0)
                    free.push_back(i);
            if (free.size() < d.flips[a][b])
                return std::nullopt;
            for (std::size_t k = 0; k < d.flips[a][b]; ++k) {
                const std::size_t pick = k + rng.below(free.size() - k);
                std::swap(free[k], free[pick]);
                used[free[k]] = true;
                target[a][free[k]] = b;
            }
        }
    }
    return target;
}

std::optional<BooleanNetwork> build(const FlipDesign& d, const std::vector<std::uint64_t>& codes,
                                    const std::vector<std::vector<std::size_t>>& target)
{
    const std::size_t n = d.node_count, m = codes.size();
    const std::size_t rows = std::size_t{1} << (n - 1);
    std::vector<std::vector<int>> table(n, std::vector<int>(rows, -1));

    auto require = [&](std::uint64_t x, std::uint64_t next) {
        for (std::size_t j = 0; j < n; ++j) {
            int& e = table[j][project(x, j)];
            const int v = static_cast<int>(next >> j & 1u);
            if (e != -1 && e != v)
                return false;
            e = v;
        }
        return true;
    };
    for (std::size_t a = 0; a < m; ++a) {
        if (!require(codes[a], codes[a]))
            return std::nullopt;
        for (std::size_t i = 0; i < n; ++i)
            if (!require(codes[a] ^ (std::uint64_t{1} << i), codes[target[a][i]]))
                return std::nullopt;
    }

    // Unconstrained entries drain toward the fixed point with the fewest exits.
    std::size_t sink = 0, fewest = n + 1;
    for (std::size_t a = 0; a < m; ++a) {
        const auto exits = static_cast<std::size_t>(
            std::count_if(target[a].begin(), target[a].end(), [&](auto b) { return b != a; }));
        if (exits < fewest) {
            fewest = exits;
            sink = a;
        }
    }
    std::vector<std::vector<NodeIndex>> inputs(n);
    std::vector<std::vector<bool>> tables(n, std::vector<bool>(rows));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k)
            if (k != j)
                inputs[j].push_back(static_cast<NodeIndex>(k));
        for (std::size_t r = 0; r < rows; ++r)
            tables[j][r] = table[j][r] == -1 ? ((codes[sink] >> j) & 1u) : table[j][r] == 1;
    }
    return BooleanNetwork(std::move(inputs), std::move(tables));
}

bool only_designed_attractors(const BooleanNetwork& net, const std::vector<std::uint64_t>& codes)
{
    const auto set = enumerate_attractors(net, Exhaustive{});
    if (set.size() != codes.size())
        return false;
    for (const auto& att : set.attractors)
        if (att.period() != 1 ||
            std::find(codes.begin(), codes.end(), att.first().code()) == codes.end())
            return false;
    return true;
}

}  // namespace

DesignedNetwork design_network(const FlipDesign& d)
{
    const std::size_t n = d.node_count, m = d.flips.size();
    if (n < 2 || n > 20)
        throw Error(ErrorCode::InvalidParameter, "design node_count must be in [2, 20]");
    if (m == 0)
        throw Error(ErrorCode::InvalidParameter, "design needs at least one fixed point");
    for (std::size_t a = 0; a < m; ++a) {
        if (d.flips[a].size() != m)
            throw Error(ErrorCode::InvalidParameter, "design flip matrix must be square");
        std::size_t total = 0;
        for (std::size_t b = 0; b < m; ++b)
            if (b != a)
                total += d.flips[a][b];
        if (total > n)
            throw Error(ErrorCode::InvalidParameter, "design row exceeds node_count flips");
    }
    Rng rng(d.seed);
    for (std::size_t attempt = 0; attempt < d.max_tries; ++attempt) {
        auto codes = pick_codes(n, m, d.min_distance, rng);
        if (!codes)
            continue;
        auto target = assign_bits(d, *codes, rng);
        if (!target)
            continue;
        auto net = build(d, *codes, *target);
        if (!net || !only_designed_attractors(*net, *codes))
            continue;
        return {std::move(*net), std::move(*codes)};
    }
    throw Error(ErrorCode::ResourceLimit, "no network layout found for the requested design");
}

}  // namespace cryptsim::nrbn
