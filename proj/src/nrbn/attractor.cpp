#include "cryptsim/nrbn/attractor.hpp"

#include "cryptsim/error.hpp"
#include "cryptsim/rng.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace cryptsim::nrbn {

Attractor canonical_attractor(std::vector<NetworkState> cycle)
{
    if (cycle.empty())
        throw Error(ErrorCode::InvalidState, "empty attractor cycle");
    const auto smallest = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), smallest, cycle.end());
    Attractor a;
    a.cycle = std::move(cycle);
    return a;
}

Attractor find_attractor(const BooleanNetwork& net, const NetworkState& start, std::size_t step_cap)
{
    if (step_cap < 1)
        throw Error(ErrorCode::InvalidParameter, "step_cap must be at least 1");
    if (start.size() != net.node_count())
        throw Error(ErrorCode::InvalidState, "start state length does not match network");

    std::unordered_map<NetworkState, std::size_t, NetworkStateHash> seen;
    std::vector<NetworkState> trajectory;
    NetworkState current = start;
    for (std::size_t t = 0;; ++t) {
        const auto [it, inserted] = seen.emplace(current, t);
        if (!inserted) {
            // transient + period == t
            std::vector<NetworkState> cycle(trajectory.begin() + static_cast<std::ptrdiff_t>(it->second),
                                            trajectory.end());
            return canonical_attractor(std::move(cycle));
        }
        if (t >= step_cap)
            throw Error(ErrorCode::CapExceeded,
                        "no cycle within " + std::to_string(step_cap) + " steps from " + start.to_string());
        trajectory.push_back(current);
        current = synchronous_step(net, current);
    }
}

std::optional<AttractorId> AttractorSet::find(const NetworkState& first) const
{
    const auto it = std::lower_bound(attractors.begin(), attractors.end(), first,
                                     [](const Attractor& a, const NetworkState& s) { return a.first() < s; });
    if (it == attractors.end() || !(it->first() == first))
        return std::nullopt;
    return it->id;
}

namespace {

AttractorSet finalize(std::vector<Attractor> found, bool exhaustive)
{
    std::sort(found.begin(), found.end(),
              [](const Attractor& a, const Attractor& b) { return a.first() < b.first(); });
    found.erase(std::unique(found.begin(), found.end()), found.end());
    for (std::size_t i = 0; i < found.size(); ++i)
        found[i].id = static_cast<AttractorId>(i);
    return AttractorSet{std::move(found), exhaustive};
}

AttractorSet enumerate_exhaustive(const BooleanNetwork& net, const Exhaustive& mode)
{
    const std::size_t n = net.node_count();
    if (n > mode.node_cap || n > 32)
        throw Error(ErrorCode::ResourceLimit, "exhaustive enumeration of " + std::to_string(n) +
                                                  " nodes exceeds the cap of " +
                                                  std::to_string(std::min<std::size_t>(mode.node_cap, 32)));
    const std::uint64_t states = std::uint64_t{1} << n;
    // mark[s] = 1 + index of the walk that first reached s, 0 when unvisited.
    std::vector<std::uint32_t> mark(states, 0);
    std::vector<Attractor> found;
    std::uint32_t walk = 0;
    for (std::uint64_t origin = 0; origin < states; ++origin) {
        if (mark[origin] != 0)
            continue;
        ++walk;
        std::uint64_t s = origin;
        while (mark[s] == 0) {
            mark[s] = walk;
            s = synchronous_step_code(net, s);
        }
        if (mark[s] != walk)
            continue;  // ran into an earlier basin
        std::vector<NetworkState> cycle;
        std::uint64_t c = s;
        do {
            cycle.push_back(NetworkState::from_code(n, c));
            c = synchronous_step_code(net, c);
        } while (c != s);
        found.push_back(canonical_attractor(std::move(cycle)));
    }
    return finalize(std::move(found), true);
}

AttractorSet enumerate_sampled(const BooleanNetwork& net, const Sampled& mode)
{
    const std::size_t n = net.node_count();
    Rng rng(mode.seed);
    std::vector<Attractor> found;
    std::unordered_set<NetworkState, NetworkStateHash> seen_firsts;

    auto relax = [&](const NetworkState& start) {
        Attractor a = find_attractor(net, start, mode.step_cap);
        if (seen_firsts.insert(a.first()).second)
            found.push_back(std::move(a));
    };

    const bool small = n < 63;
    const std::uint64_t space = small ? (std::uint64_t{1} << n) : 0;
    if (small && mode.sample_count <= space) {
        // Distinct starts (Floyd's sampling without replacement).
        std::unordered_set<std::uint64_t> chosen;
        std::vector<std::uint64_t> order;
        for (std::uint64_t j = space - mode.sample_count; j < space; ++j) {
            const std::uint64_t t = rng.below(j + 1);
            if (chosen.insert(t).second)
                order.push_back(t);
            else {
                chosen.insert(j);
                order.push_back(j);
            }
        }
        for (std::uint64_t code : order)
            relax(NetworkState::from_code(n, code));
    } else {
        for (std::size_t k = 0; k < mode.sample_count; ++k) {
            NetworkState s(n);
            for (std::size_t i = 0; i < n; ++i)
                s.set(i, rng.bernoulli(0.5));
            relax(s);
        }
    }
    return finalize(std::move(found), false);
}

}  // namespace

AttractorSet enumerate_attractors(const BooleanNetwork& net, const EnumerationMode& mode)
{
    return std::visit(
        [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Exhaustive>)
                return enumerate_exhaustive(net, m);
            else
                return enumerate_sampled(net, m);
        },
        mode);
}

}  // namespace cryptsim::nrbn
