#pragma once

#include "cryptsim/nrbn/transition_matrix.hpp"

#include <iosfwd>
#include <vector>

namespace cryptsim::nrbn {

/// Terminal strongly connected component of the ATM graph that keeps only
/// off-diagonal edges heavier than delta. Attractor ids are sorted.
struct ThresholdErgodicSet {
    std::vector<AttractorId> attractors;
    double delta = 0.0;

    bool contains(AttractorId id) const;
    bool subset_of(const ThresholdErgodicSet& other) const;

    friend bool operator==(const ThresholdErgodicSet&, const ThresholdErgodicSet&) = default;
};

/// TESs sorted by their smallest attractor id. Attractors in non-terminal
/// components belong to none of them.
std::vector<ThresholdErgodicSet> threshold_ergodic_sets(const AttractorTransitionMatrix& atm, double delta);

struct HierarchyLevel {
    double delta = 0.0;
    std::vector<ThresholdErgodicSet> sets;

    friend bool operator==(const HierarchyLevel&, const HierarchyLevel&) = default;
};

/// Link from set `parent` at `level` to set `child` at `level + 1`.
struct HierarchyEdge {
    std::size_t level = 0;
    std::size_t parent = 0;
    std::size_t child = 0;

    friend bool operator==(const HierarchyEdge&, const HierarchyEdge&) = default;
};

struct DifferentiationHierarchy {
    std::vector<HierarchyLevel> levels;
    std::vector<HierarchyEdge> edges;
    std::size_t attractor_count = 0;

    friend bool operator==(const DifferentiationHierarchy&, const DifferentiationHierarchy&) = default;
};

/// One level per schedule entry, nested by attractor-set inclusion. Throws
/// invalid-parameter for a bad schedule and non-tree-structure when a TES is
/// not contained in any TES of the previous level.
DifferentiationHierarchy build_lineage_hierarchy(const AttractorTransitionMatrix& atm,
                                                 const std::vector<double>& delta_schedule);

/// Text export:
///   level <i> delta=<d>
///   tes <i>.<j> attractors=<a,b,...>
///   edge <i>.<j> -> <i+1>.<k>
void write_hierarchy(std::ostream& out, const DifferentiationHierarchy& h);

}  // namespace cryptsim::nrbn
