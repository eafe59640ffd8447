#pragma once
#include <cstddef>
#include <cstdint>
#include <vector>

#include "cryptsim/nrbn/network.hpp"

namespace cryptsim::nrbn {

/// Prescribed landscape: flips[a][b] is how many of the node_count single-bit
/// flips of fixed point a must relax to fixed point b (b != a). The rest
/// return to a.
struct FlipDesign {
    std::size_t node_count = 12;
    std::vector<std::vector<std::size_t>> flips;
    std::uint64_t seed = 1;
    std::size_t max_tries = 2000;
    std::size_t min_distance = 4;
};

struct DesignedNetwork {
    BooleanNetwork network;
    /// Packed code of each designed fixed point, in design order.
    std::vector<std::uint64_t> fixed_points;
};

/// Builds a fully connected network (every node reads all others) whose only
/// attractors are the designed fixed points and whose single-flip relaxations
/// follow the design. Throws resource-limit if no layout is found.
DesignedNetwork design_network(const FlipDesign& design);

}  // namespace cryptsim::nrbn
