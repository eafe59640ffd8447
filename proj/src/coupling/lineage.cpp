#include "cryptsim/coupling/lineage.hpp"

#include "cryptsim/error.hpp"
#include "cryptsim/util/format.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace cryptsim::coupling {

LineageTopology LineageTopology::standard()
{
    LineageTopology t;
    t.root = CellType::Stem;
    t.edges = {
        {CellType::Stem, CellType::Paneth},     {CellType::Stem, CellType::TA1},
        {CellType::TA1, CellType::TA2A},        {CellType::TA1, CellType::TA2B},
        {CellType::TA2A, CellType::Enterocyte}, {CellType::TA2A, CellType::Enteroendocrine},
        {CellType::TA2B, CellType::Goblet},
    };
    return t;
}

std::vector<CellType> LineageTopology::children(CellType t) const
{
    std::vector<CellType> out;
    for (const auto& [p, c] : edges)
        if (p == t)
            out.push_back(c);
    return out;
}

std::vector<CellType> LineageTopology::types() const
{
    std::vector<CellType> out{root};
    for (const auto& e : edges)
        out.push_back(e.second);
    return out;
}

bool LineageTopology::contains(CellType t) const
{
    const auto all = types();
    return std::find(all.begin(), all.end(), t) != all.end();
}

std::string LineageTopology::shape() const
{
    auto rec = [&](auto&& self, CellType t) -> std::string {
        std::vector<std::string> parts;
        for (CellType c : children(t))
            parts.push_back(self(self, c));
        std::sort(parts.begin(), parts.end());
        std::string s = "(";
        for (const auto& p : parts)
            s += p;
        return s + ")";
    };
    return rec(rec, root);
}

namespace {

void validate_topology(const LineageTopology& t)
{
    std::map<CellType, CellType> parent_of;
    for (const auto& [p, c] : t.edges) {
        if (p == CellType::Medium || c == CellType::Medium)
            throw Error(ErrorCode::Config, "topology: Medium is not a cell population");
        if (c == t.root)
            throw Error(ErrorCode::Config, "topology: root " + std::string(type_name(c)) + " cannot be a child");
        if (!parent_of.emplace(c, p).second)
            throw Error(ErrorCode::Config, "topology: " + std::string(type_name(c)) + " has two parents");
    }
    // Every edge must hang off the root.
    for (const auto& [p, c] : t.edges) {
        CellType at = p;
        std::size_t hops = 0;
        while (at != t.root) {
            const auto it = parent_of.find(at);
            if (it == parent_of.end() || ++hops > t.edges.size())
                throw Error(ErrorCode::Config,
                            "topology: " + std::string(type_name(c)) + " is not reachable from the root");
            at = it->second;
        }
    }
}

}  // namespace

LineageTopology parse_topology(std::istream& in)
{
    LineageTopology t;
    t.edges.clear();
    bool have_root = false;
    std::string raw;
    std::size_t line = 0;
    auto type_at = [&](const std::string& name) {
        const auto parsed = parse_cell_type(name);
        if (!parsed || *parsed == CellType::Medium)
            throw Error(ErrorCode::Config, "topology line " + std::to_string(line) + ": unknown type '" + name + "'");
        return *parsed;
    };
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = util::trim(raw.substr(0, raw.find('#')));
        if (text.empty())
            continue;
        if (text.rfind("root:", 0) == 0) {
            t.root = type_at(util::trim(text.substr(5)));
            have_root = true;
            continue;
        }
        const auto arrow = text.find("->");
        if (arrow == std::string::npos)
            throw Error(ErrorCode::Config, "topology line " + std::to_string(line) + ": expected 'parent -> child'");
        t.edges.emplace_back(type_at(util::trim(text.substr(0, arrow))), type_at(util::trim(text.substr(arrow + 2))));
    }
    if (!have_root)
        throw Error(ErrorCode::Config, "topology: missing 'root: <type>' line");
    validate_topology(t);
    return t;
}

LineageTopology parse_topology(const std::string& text)
{
    std::istringstream in(text);
    return parse_topology(in);
}

LineageTopology load_topology(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open topology file " + path);
    return parse_topology(in);
}

void write_topology(std::ostream& out, const LineageTopology& topology)
{
    out << "root: " << type_name(topology.root) << '\n';
    for (const auto& [p, c] : topology.edges)
        out << type_name(p) << " -> " << type_name(c) << '\n';
}

bool LineageNode::contains(nrbn::AttractorId id) const
{
    return std::binary_search(attractors.begin(), attractors.end(), id);
}

std::string LineageTree::shape(std::size_t node) const
{
    std::vector<std::string> parts;
    for (std::size_t c : nodes[node].children)
        parts.push_back(shape(c));
    std::sort(parts.begin(), parts.end());
    std::string s = "(";
    for (const auto& p : parts)
        s += p;
    return s + ")";
}

std::size_t LineageTree::depth(std::size_t node) const
{
    std::size_t d = 0;
    while (nodes[node].parent) {
        node = *nodes[node].parent;
        ++d;
    }
    return d;
}

LineageTree build_lineage_tree(const nrbn::DifferentiationHierarchy& hierarchy)
{
    if (hierarchy.levels.empty())
        throw Error(ErrorCode::InvalidParameter, "hierarchy has no levels");
    LineageTree tree;
    const auto& first = hierarchy.levels.front();
    std::vector<std::size_t> current;  // node per set at the current level
    if (first.sets.size() == 1) {
        tree.nodes.push_back({first.sets[0].attractors, first.delta, 0, std::nullopt, {}, false});
        current.push_back(0);
    } else {
        LineageNode root;
        for (std::size_t a = 0; a < hierarchy.attractor_count; ++a)
            root.attractors.push_back(static_cast<nrbn::AttractorId>(a));
        root.delta = first.delta;
        root.synthetic = true;
        tree.nodes.push_back(std::move(root));
        for (const auto& s : first.sets) {
            tree.nodes[0].children.push_back(tree.nodes.size());
            current.push_back(tree.nodes.size());
            tree.nodes.push_back({s.attractors, first.delta, 0, 0, {}, false});
        }
    }
    for (std::size_t level = 0; level + 1 < hierarchy.levels.size(); ++level) {
        const auto& next_level = hierarchy.levels[level + 1];
        std::vector<std::size_t> next(next_level.sets.size());
        for (const auto& e : hierarchy.edges) {
            if (e.level != level)
                continue;
            const std::size_t parent_node = current[e.parent];
            const auto& set = next_level.sets[e.child];
            if (set.attractors == tree.nodes[parent_node].attractors) {
                next[e.child] = parent_node;
            } else {
                next[e.child] = tree.nodes.size();
                tree.nodes[parent_node].children.push_back(tree.nodes.size());
                tree.nodes.push_back({set.attractors, next_level.delta, level + 1, parent_node, {}, false});
            }
        }
        current = std::move(next);
    }
    return tree;
}

bool CellTypeMap::post_mitotic(CellType t) const
{
    return std::find(post_mitotic_types.begin(), post_mitotic_types.end(), t) != post_mitotic_types.end();
}

std::optional<std::size_t> CellTypeMap::node_for(CellType t, const LineageTree& tree) const
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < node_types.size(); ++i)
        if (node_types[i] == t && (!best || tree.depth(i) < tree.depth(*best)))
            best = i;
    return best;
}

namespace {

struct Matcher {
    const LineageTree& tree;
    const LineageTopology& topology;
    std::vector<CellType>& assignment;

    void absorb(std::size_t node, CellType t)
    {
        assignment[node] = t;
        for (std::size_t c : tree.nodes[node].children)
            absorb(c, t);
    }

    std::vector<CellType> topology_chain(CellType t) const
    {
        std::vector<CellType> chain{t};
        for (auto next = topology.children(t); next.size() == 1; next = topology.children(chain.back()))
            chain.push_back(next[0]);
        return chain;
    }

    std::vector<std::size_t> tree_chain(std::size_t node) const
    {
        std::vector<std::size_t> chain{node};
        while (tree.nodes[chain.back()].children.size() == 1)
            chain.push_back(tree.nodes[chain.back()].children[0]);
        return chain;
    }

    // Unary runs on both sides collapse: a topology chain t0..tm lays its
    // types onto the first m tree nodes of the matching tree chain and the
    // last type covers the remainder.
    bool match(CellType t, std::size_t node)
    {
        const auto types = topology_chain(t);
        const auto nodes = tree_chain(node);
        if (nodes.size() < types.size())
            return false;
        const std::size_t m = types.size() - 1;
        for (std::size_t i = 0; i < m; ++i)
            assignment[nodes[i]] = types[i];
        const auto topo_children = topology.children(types[m]);
        if (topo_children.empty()) {
            absorb(nodes[m], types[m]);
            return true;
        }
        for (std::size_t i = m; i < nodes.size(); ++i)
            assignment[nodes[i]] = types[m];
        const auto& tree_children = tree.nodes[nodes.back()].children;
        if (tree_children.size() != topo_children.size())
            return false;
        std::vector<bool> used(tree_children.size(), false);
        return assign(topo_children, 0, tree_children, used);
    }

    // Backtracking over bijections; topology children in declaration order.
    bool assign(const std::vector<CellType>& topo_children, std::size_t k,
                const std::vector<std::size_t>& tree_children, std::vector<bool>& used)
    {
        if (k == topo_children.size())
            return true;
        for (std::size_t i = 0; i < tree_children.size(); ++i) {
            if (used[i])
                continue;
            if (!match(topo_children[k], tree_children[i]))
                continue;
            used[i] = true;
            if (assign(topo_children, k + 1, tree_children, used))
                return true;
            used[i] = false;
        }
        return false;
    }
};

}  // namespace

CellTypeMap validate_and_map(const LineageTree& tree, const LineageTopology& topology)
{
    validate_topology(topology);
    CellTypeMap map;
    map.node_types.assign(tree.nodes.size(), CellType::Medium);
    Matcher m{tree, topology, map.node_types};
    if (tree.nodes.empty() || !m.match(topology.root, 0))
        throw Error(ErrorCode::IncompatibleLineage, "lineage tree shape " + (tree.nodes.empty() ? "()" : tree.shape()) +
                                                        " does not fit topology shape " + topology.shape());
    for (CellType t : topology.types())
        if (t != topology.root && topology.is_leaf(t))
            map.post_mitotic_types.push_back(t);
    return map;
}

CellTypeMap validate_and_map(const nrbn::DifferentiationHierarchy& hierarchy, const LineageTopology& topology)
{
    return validate_and_map(build_lineage_tree(hierarchy), topology);
}

}  // namespace cryptsim::coupling
