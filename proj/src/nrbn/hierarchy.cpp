#include "cryptsim/nrbn/hierarchy.hpp"

#include "cryptsim/error.hpp"
#include "cryptsim/util/format.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <sstream>

namespace cryptsim::nrbn {

bool ThresholdErgodicSet::contains(AttractorId id) const
{
    return std::binary_search(attractors.begin(), attractors.end(), id);
}

bool ThresholdErgodicSet::subset_of(const ThresholdErgodicSet& other) const
{
    return std::includes(other.attractors.begin(), other.attractors.end(), attractors.begin(), attractors.end());
}

namespace {

std::string describe(const ThresholdErgodicSet& s)
{
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < s.attractors.size(); ++i)
        out << (i ? "," : "") << 'A' << s.attractors[i] + 1;
    out << "}@" << util::format_double(s.delta);
    return out.str();
}

/// Tarjan's algorithm, iterative. Returns component index per vertex.
std::vector<std::size_t> strongly_connected(const std::vector<std::vector<std::size_t>>& adj,
                                            std::size_t& component_count)
{
    const std::size_t n = adj.size();
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    component_count = 0;

    struct Frame {
        std::size_t v;
        std::size_t next_edge;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unset)
            continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next_edge < adj[f.v].size()) {
                const std::size_t w = adj[f.v][f.next_edge++];
                if (index[w] == unset) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const std::size_t v = f.v;
            frames.pop_back();
            if (!frames.empty())
                low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = component_count;
                } while (w != v);
                ++component_count;
            }
        }
    }
    return comp;
}

}  // namespace

std::vector<ThresholdErgodicSet> threshold_ergodic_sets(const AttractorTransitionMatrix& atm, double delta)
{
    if (!(delta >= 0.0 && delta <= 1.0))
        throw Error(ErrorCode::InvalidParameter, "delta must lie in [0, 1]");
    const std::size_t n = atm.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && atm.weight(i, j) > delta)
                adj[i].push_back(j);

    std::size_t count = 0;
    const auto comp = strongly_connected(adj, count);
    std::vector<bool> terminal(count, true);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : adj[i])
            if (comp[j] != comp[i])
                terminal[comp[i]] = false;

    std::vector<ThresholdErgodicSet> sets(count);
    for (std::size_t i = 0; i < n; ++i)
        if (terminal[comp[i]])
            sets[comp[i]].attractors.push_back(static_cast<AttractorId>(i));
    std::erase_if(sets, [](const ThresholdErgodicSet& s) { return s.attractors.empty(); });
    for (auto& s : sets)
        s.delta = delta;
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) { return a.attractors[0] < b.attractors[0]; });
    return sets;
}

DifferentiationHierarchy build_lineage_hierarchy(const AttractorTransitionMatrix& atm,
                                                 const std::vector<double>& delta_schedule)
{
    if (delta_schedule.empty())
        throw Error(ErrorCode::InvalidParameter, "delta schedule is empty");
    for (std::size_t i = 0; i < delta_schedule.size(); ++i) {
        if (!(delta_schedule[i] >= 0.0 && delta_schedule[i] <= 1.0))
            throw Error(ErrorCode::InvalidParameter, "delta schedule values must lie in [0, 1]");
        if (i > 0 && !(delta_schedule[i] > delta_schedule[i - 1]))
            throw Error(ErrorCode::InvalidParameter, "delta schedule must be strictly increasing");
    }

    DifferentiationHierarchy h;
    h.attractor_count = atm.size();
    for (double delta : delta_schedule)
        h.levels.push_back({delta, threshold_ergodic_sets(atm, delta)});

    for (std::size_t level = 0; level + 1 < h.levels.size(); ++level) {
        const auto& parents = h.levels[level].sets;
        const auto& children = h.levels[level + 1].sets;
        for (std::size_t c = 0; c < children.size(); ++c) {
            const auto parent = std::find_if(parents.begin(), parents.end(),
                                             [&](const auto& p) { return children[c].subset_of(p); });
            if (parent == parents.end()) {
                // Name the level-i set sharing the most attractors, if any.
                std::string partner = "no TES at the previous level";
                std::size_t best = 0;
                for (const auto& p : parents) {
                    std::size_t shared = 0;
                    for (AttractorId a : children[c].attractors)
                        shared += p.contains(a);
                    if (shared > best) {
                        best = shared;
                        partner = describe(p);
                    }
                }
                throw Error(ErrorCode::NonTreeStructure,
                            "TES " + describe(children[c]) + " at level " + std::to_string(level + 1) +
                                " is not contained in a TES at level " + std::to_string(level) + " (closest: " +
                                partner + ")");
            }
            h.edges.push_back({level, static_cast<std::size_t>(parent - parents.begin()), c});
        }
    }
    return h;
}

void write_hierarchy(std::ostream& out, const DifferentiationHierarchy& h)
{
    for (std::size_t i = 0; i < h.levels.size(); ++i) {
        out << "level " << i << " delta=" << util::format_double(h.levels[i].delta) << '\n';
        for (std::size_t j = 0; j < h.levels[i].sets.size(); ++j) {
            out << "tes " << i << '.' << j << " attractors=";
            const auto& ids = h.levels[i].sets[j].attractors;
            for (std::size_t k = 0; k < ids.size(); ++k)
                out << (k ? "," : "") << 'A' << ids[k] + 1;
            out << '\n';
        }
    }
    for (const auto& e : h.edges)
        out << "edge " << e.level << '.' << e.parent << " -> " << e.level + 1 << '.' << e.child << '\n';
}

}  // namespace cryptsim::nrbn
