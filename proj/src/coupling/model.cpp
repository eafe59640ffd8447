#include "cryptsim/coupling/model.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "cryptsim/error.hpp"

namespace cryptsim::coupling {

nrbn::AttractorId DifferentiationModel::initial_attractor(std::size_t node) const
{
    const auto& n = tree.nodes.at(node);
    for (auto a : n.attractors) {
        bool in_child = false;
        for (auto c : n.children)
            in_child = in_child || tree.nodes[c].contains(a);
        if (!in_child)
            return a;
    }
    return n.attractors.front();
}

std::size_t DifferentiationModel::entry_node(CellType t) const
{
    return types.node_for(t, tree).value_or(0);
}

namespace {

struct Pipeline {
    nrbn::AttractorSet attractors;
    nrbn::AttractorTransitionMatrix atm;
};

Pipeline attractor_pipeline(const nrbn::BooleanNetwork& net, const ModelSettings& s)
{
    Pipeline p;
    p.attractors = nrbn::enumerate_attractors(net, s.enumeration);
    p.atm = nrbn::compute_atm(net, p.attractors, s.step_cap);
    return p;
}

int state_distance(const nrbn::NetworkState& a, const nrbn::NetworkState& b)
{
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += a.get(i) != b.get(i);
    return d;
}

// Reference attractor holding the state nearest to any state of `att`.
nrbn::AttractorId nearest_reference(const nrbn::Attractor& att, const nrbn::AttractorSet& ref)
{
    nrbn::AttractorId best = 0;
    int best_d = std::numeric_limits<int>::max();
    for (const auto& r : ref.attractors)
        for (const auto& s : r.cycle)
            for (const auto& t : att.cycle) {
                const int d = state_distance(s, t);
                if (d < best_d) {
                    best_d = d;
                    best = r.id;
                }
            }
    return best;
}

}  // namespace

DifferentiationModel build_model(const nrbn::BooleanNetwork& net, const ModelSettings& settings,
                                 const LineageTopology& topology)
{
    DifferentiationModel m;
    m.network = net;
    auto p = attractor_pipeline(net, settings);
    m.attractors = std::move(p.attractors);
    m.atm = std::move(p.atm);
    m.hierarchy = nrbn::build_lineage_hierarchy(m.atm, settings.delta_schedule);
    m.tree = build_lineage_tree(m.hierarchy);
    m.types = validate_and_map(m.tree, topology);
    return m;
}

DifferentiationModel build_perturbed_model(const nrbn::BooleanNetwork& net, const ModelSettings& settings,
                                           const LineageTopology& topology, const DifferentiationModel& reference)
{
    DifferentiationModel m;
    m.network = net;
    auto p = attractor_pipeline(net, settings);
    m.attractors = std::move(p.attractors);
    m.atm = std::move(p.atm);

    auto schedule = settings.delta_schedule;
    for (;;) {
        try {
            m.hierarchy = nrbn::build_lineage_hierarchy(m.atm, schedule);
            break;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonTreeStructure || schedule.size() <= 1)
                throw;
            schedule.pop_back();
        }
    }
    m.tree = build_lineage_tree(m.hierarchy);
    try {
        if (schedule.size() != settings.delta_schedule.size())
            throw Error(ErrorCode::IncompatibleLineage, "hierarchy truncated");
        m.types = validate_and_map(m.tree, topology);
        return m;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::IncompatibleLineage)
            throw;
    }

    m.degenerate = true;
    std::vector<nrbn::AttractorId> image(m.attractors.size());
    for (const auto& a : m.attractors.attractors)
        image[a.id] = nearest_reference(a, reference.attractors);
    m.types.post_mitotic_types = reference.types.post_mitotic_types;
    m.types.node_types.clear();
    for (const auto& node : m.tree.nodes) {
        std::vector<nrbn::AttractorId> mapped;
        for (auto a : node.attractors)
            mapped.push_back(image[a]);
        std::sort(mapped.begin(), mapped.end());
        mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());
        std::size_t best = 0, best_d = std::numeric_limits<std::size_t>::max();
        for (std::size_t r = 0; r < reference.tree.nodes.size(); ++r) {
            const auto& ra = reference.tree.nodes[r].attractors;
            std::vector<nrbn::AttractorId> diff;
            std::set_symmetric_difference(mapped.begin(), mapped.end(), ra.begin(), ra.end(),
                                          std::back_inserter(diff));
            if (diff.size() < best_d) {
                best_d = diff.size();
                best = r;
            }
        }
        m.types.node_types.push_back(reference.type_of(best));
    }
    return m;
}

nrbn::AttractorId sample_destination(const DifferentiationModel& model, nrbn::AttractorId from, bool live,
                                     Rng& rng, std::size_t step_cap)
{
    if (live) {
        const auto& att = model.attractors[from];
        auto state = att.cycle[rng.below(att.period())];
        state.flip(rng.below(state.size()));
        const auto dest = nrbn::find_attractor(model.network, state, step_cap);
        const auto id = model.attractors.find(dest.first());
        if (!id)
            throw Error(ErrorCode::Inconsistency, "noise led to an attractor outside the enumerated set");
        return *id;
    }
    const auto& atm = model.atm;
    if (!atm.counts().empty()) {
        std::uint64_t pick = rng.below(atm.trials(from));
        const auto& row = atm.counts()[from];
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (pick < row[j])
                return static_cast<nrbn::AttractorId>(j);
            pick -= row[j];
        }
    } else {
        double u = rng.uniform();
        const auto& row = atm.row(from);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (u < row[j])
                return static_cast<nrbn::AttractorId>(j);
            u -= row[j];
        }
        for (std::size_t j = row.size(); j-- > 0;)
            if (row[j] > 0)
                return static_cast<nrbn::AttractorId>(j);
    }
    throw Error(ErrorCode::Inconsistency, "empty transition row");
}

}  // namespace cryptsim::coupling
