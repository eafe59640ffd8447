#pragma once

#include "cryptsim/cell_type.hpp"
#include "cryptsim/nrbn/hierarchy.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cryptsim::coupling {

/// Configured differentiation tree over cell types. Edges keep declaration
/// order, which fixes how ambiguous matches are resolved.
struct LineageTopology {
    CellType root = CellType::Stem;
    std::vector<std::pair<CellType, CellType>> edges;

    /// Stem -> {Paneth, TA1}; TA1 -> {TA2-A, TA2-B};
    /// TA2-A -> {Enterocyte, Enteroendocrine}; TA2-B -> {Goblet}.
    static LineageTopology standard();

    std::vector<CellType> children(CellType t) const;
    std::vector<CellType> types() const;  // root first, then edge order
    bool contains(CellType t) const;
    bool is_leaf(CellType t) const { return contains(t) && children(t).empty(); }

    /// Canonical nested-parenthesis shape, e.g. "((())())".
    std::string shape() const;
};

/// Text form: "root: <type>" plus one "parent -> child" line per edge.
LineageTopology parse_topology(std::istream& in);
LineageTopology parse_topology(const std::string& text);
LineageTopology load_topology(const std::string& path);
void write_topology(std::ostream& out, const LineageTopology& topology);

/// A distinct attractor set of the hierarchy. A TES that reappears unchanged
/// at deeper levels is the same node; delta is the level where it first appears.
struct LineageNode {
    std::vector<nrbn::AttractorId> attractors;
    double delta = 0.0;
    std::size_t level = 0;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
    bool synthetic = false;  // root added above a multi-TES first level

    bool contains(nrbn::AttractorId id) const;
};

/// Branching structure of a hierarchy. Node 0 is the root.
struct LineageTree {
    std::vector<LineageNode> nodes;

    std::string shape(std::size_t node = 0) const;
    std::size_t depth(std::size_t node) const;
};

LineageTree build_lineage_tree(const nrbn::DifferentiationHierarchy& hierarchy);

/// Node -> cell type assignment plus the post-mitotic flags taken from the
/// topology's leaves.
struct CellTypeMap {
    std::vector<CellType> node_types;
    std::vector<CellType> post_mitotic_types;

    CellType type_of(std::size_t node) const { return node_types.at(node); }
    bool post_mitotic(CellType t) const;
    /// Shallowest node carrying type t.
    std::optional<std::size_t> node_for(CellType t, const LineageTree& tree) const;
};

/// Succeeds iff the branching structure of the topology matches the top of
/// the lineage tree. Unary runs collapse on both sides (a topology run of m+1
/// types needs a tree run of at least m+1 nodes), every branching topology
/// node needs a tree node with the same number of children, matched
/// one-to-one, and a topology leaf absorbs the whole subtree below its node.
/// Throws incompatible-lineage otherwise.
CellTypeMap validate_and_map(const LineageTree& tree, const LineageTopology& topology);
CellTypeMap validate_and_map(const nrbn::DifferentiationHierarchy& hierarchy, const LineageTopology& topology);

}  // namespace cryptsim::coupling
