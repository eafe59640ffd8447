#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cryptsim/coupling/lineage.hpp"
#include "cryptsim/nrbn/attractor.hpp"
#include "cryptsim/nrbn/hierarchy.hpp"
#include "cryptsim/nrbn/network.hpp"
#include "cryptsim/nrbn/transition_matrix.hpp"
#include "cryptsim/rng.hpp"

namespace cryptsim::coupling {

/// Everything a simulation needs from the gene network: attractors, their
/// transition matrix, the lineage tree and its cell-type labels.
struct DifferentiationModel {
    nrbn::BooleanNetwork network;
    nrbn::AttractorSet attractors;
    nrbn::AttractorTransitionMatrix atm;
    nrbn::DifferentiationHierarchy hierarchy;
    LineageTree tree;
    CellTypeMap types;
    /// Tree does not fit the topology; types come from a reference model.
    bool degenerate = false;

    CellType type_of(std::size_t node) const { return types.type_of(node); }
    double delta_of(std::size_t node) const { return tree.nodes[node].delta; }
    std::size_t period_of(nrbn::AttractorId a) const { return attractors[a].period(); }
    /// Lowest attractor of the node that none of its children holds, else its lowest.
    nrbn::AttractorId initial_attractor(std::size_t node) const;
    /// Shallowest node labelled t; the root when no node carries t.
    std::size_t entry_node(CellType t) const;
};

struct ModelSettings {
    nrbn::EnumerationMode enumeration = nrbn::Exhaustive{};
    std::vector<double> delta_schedule{0.0, 0.1, 0.2, 0.3};
    std::size_t step_cap = 100000;
};

/// Attractors, ATM, hierarchy, tree and type map of a network. Throws the
/// first pipeline error (incomplete set, non-tree structure, incompatible lineage).
DifferentiationModel build_model(const nrbn::BooleanNetwork& net, const ModelSettings& settings,
                                 const LineageTopology& topology);

/// Same pipeline for a perturbed network whose tree may not fit the
/// topology. Levels that break nesting are dropped from the end. When the
/// tree does not fit, every node takes the type of the reference node whose
/// attractor set is closest (symmetric difference after matching each
/// attractor to the reference attractor with the nearest state).
DifferentiationModel build_perturbed_model(const nrbn::BooleanNetwork& net, const ModelSettings& settings,
                                           const LineageTopology& topology, const DifferentiationModel& reference);

/// Destination attractor of one noise hit on attractor `from`: an ATM draw,
/// or with `live` an explicit flip of a random bit of a random cycle state
/// followed by relaxation.
nrbn::AttractorId sample_destination(const DifferentiationModel& model, nrbn::AttractorId from, bool live,
                                     Rng& rng, std::size_t step_cap = 100000);

}  // namespace cryptsim::coupling
