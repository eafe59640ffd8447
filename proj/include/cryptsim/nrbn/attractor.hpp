#pragma once

#include "cryptsim/nrbn/network.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cryptsim::nrbn {

using AttractorId = std::uint32_t;

/// A cycle of the synchronous dynamics, stored with its lexicographically
/// smallest state first. Ids are 0-based; display names are A1, A2, ...
struct Attractor {
    AttractorId id = 0;
    std::vector<NetworkState> cycle;

    std::size_t period() const { return cycle.size(); }
    const NetworkState& first() const { return cycle.front(); }
    std::string name() const { return "A" + std::to_string(id + 1); }

    /// Equality ignores the label.
    friend bool operator==(const Attractor& a, const Attractor& b) { return a.cycle == b.cycle; }
};

/// Rotates an arbitrary cycle into canonical order.
Attractor canonical_attractor(std::vector<NetworkState> cycle);

Attractor find_attractor(const BooleanNetwork& net, const NetworkState& start, std::size_t step_cap);

struct Exhaustive {
    std::size_t node_cap = 20;
};

struct Sampled {
    std::size_t sample_count = 1000;
    std::uint64_t seed = 0;
    std::size_t step_cap = 100000;
};

using EnumerationMode = std::variant<Exhaustive, Sampled>;

struct AttractorSet {
    std::vector<Attractor> attractors;
    bool exhaustive = true;  // false: sampled, possibly incomplete

    std::size_t size() const { return attractors.size(); }
    const Attractor& operator[](AttractorId id) const { return attractors[id]; }

    /// Id of the attractor whose canonical first state is `first`.
    std::optional<AttractorId> find(const NetworkState& first) const;
};

AttractorSet enumerate_attractors(const BooleanNetwork& net, const EnumerationMode& mode);

}  // namespace cryptsim::nrbn
