#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cryptsim/nrbn/attractor.hpp"
#include "cryptsim/nrbn/design.hpp"
#include "cryptsim/nrbn/hierarchy.hpp"
#include "cryptsim/nrbn/network.hpp"
#include "cryptsim/nrbn/network_io.hpp"
#include "cryptsim/nrbn/transition_matrix.hpp"
#include "cryptsim/rng.hpp"
#include "support.hpp"

using namespace cryptsim;
using namespace cryptsim::nrbn;
using support::error_code;

namespace {

BooleanNetwork identity_network(std::size_t n)
{
    std::vector<std::vector<NodeIndex>> inputs;
    std::vector<std::vector<bool>> tables;
    for (std::size_t i = 0; i < n; ++i) {
        inputs.push_back({static_cast<NodeIndex>(i)});
        tables.push_back({false, true});
    }
    return BooleanNetwork(inputs, tables);
}

BooleanNetwork mutual_not()
{
    return BooleanNetwork({{1}, {0}}, {{true, false}, {true, false}});
}

BooleanNetwork constant_zero(std::size_t n)
{
    std::vector<std::vector<NodeIndex>> inputs;
    std::vector<std::vector<bool>> tables;
    for (std::size_t i = 0; i < n; ++i) {
        inputs.push_back({static_cast<NodeIndex>((i + 1) % n)});
        tables.push_back({false, false});
    }
    return BooleanNetwork(inputs, tables);
}

NetworkState bits(std::initializer_list<int> b) { return NetworkState::from_bits(b); }

std::vector<std::vector<std::string>> as_strings(const AttractorSet& set)
{
    std::vector<std::vector<std::string>> out;
    for (const auto& a : set.attractors) {
        std::vector<std::string> c;
        for (const auto& s : a.cycle)
            c.push_back(s.to_string());
        out.push_back(c);
    }
    return out;
}

}  // namespace

TEST_CASE("random networks have the requested wiring")
{
    const auto net = generate_random_network(10, 2, 0.5, 7);
    REQUIRE(net.node_count() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
        const auto& in = net.inputs(i);
        CHECK(in.size() == 2);
        CHECK(in[0] != in[1]);
        CHECK(net.truth_table(i).size() == 4);
        CHECK_FALSE(net.clamp(i).has_value());
    }
    CHECK(net == generate_random_network(10, 2, 0.5, 7));
    CHECK_FALSE(net == generate_random_network(10, 2, 0.5, 8));
}

TEST_CASE("random network parameters are checked")
{
    CHECK(error_code([] { generate_random_network(3, 3, 0.5, 1); }) == ErrorCode::InvalidParameter);
    CHECK(error_code([] { generate_random_network(3, 1, 1.5, 1); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("bias controls the density of ones")
{
    const auto all_ones = generate_random_network(8, 2, 1.0, 3);
    const auto all_zero = generate_random_network(8, 2, 0.0, 3);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(std::all_of(all_ones.truth_table(i).begin(), all_ones.truth_table(i).end(), [](bool b) { return b; }));
        CHECK(std::none_of(all_zero.truth_table(i).begin(), all_zero.truth_table(i).end(), [](bool b) { return b; }));
    }
}

TEST_CASE("synchronous step")
{
    SUBCASE("identity network keeps every state")
    {
        const auto net = identity_network(5);
        for (std::uint64_t c = 0; c < 32; ++c)
            CHECK(synchronous_step(net, NetworkState::from_code(5, c)) == NetworkState::from_code(5, c));
    }
    SUBCASE("mutual NOT")
    {
        CHECK(synchronous_step(mutual_not(), bits({0, 1})) == bits({0, 1}));
        CHECK(synchronous_step(mutual_not(), bits({0, 0})) == bits({1, 1}));
    }
    SUBCASE("constant zero")
    {
        CHECK(synchronous_step(constant_zero(4), bits({1, 1, 0, 1})) == bits({0, 0, 0, 0}));
    }
    SUBCASE("length mismatch")
    {
        CHECK(error_code([] { synchronous_step(mutual_not(), bits({0, 1, 1})); }) == ErrorCode::InvalidState);
    }
    SUBCASE("packed and unpacked steps agree with the reference evaluation")
    {
        const auto net = generate_random_network(9, 3, 0.5, 11);
        for (std::uint64_t c = 0; c < 512; ++c) {
            CHECK(synchronous_step_code(net, c) == support::oracle_step(net, c));
            CHECK(synchronous_step(net, NetworkState::from_code(9, c)).code() == support::oracle_step(net, c));
        }
    }
}

TEST_CASE("network states")
{
    auto s = NetworkState(70);
    s.set(0, true);
    s.set(69, true);
    CHECK(s.get(69));
    s.flip(69);
    CHECK_FALSE(s.get(69));
    CHECK(s.to_string().size() == 70);
    CHECK(bits({0, 1}) < bits({1, 0}));
    CHECK(lex_less(bits({0, 1}).code(), bits({1, 0}).code()));
    CHECK_FALSE(lex_less(bits({1, 0}).code(), bits({0, 1}).code()));
}

TEST_CASE("find_attractor")
{
    const auto zero = find_attractor(constant_zero(4), bits({1, 0, 1, 1}), 100);
    CHECK(zero.period() == 1);
    CHECK(zero.first() == bits({0, 0, 0, 0}));

    const auto cycle = find_attractor(mutual_not(), bits({0, 0}), 10);
    REQUIRE(cycle.period() == 2);
    CHECK(cycle.cycle[0] == bits({0, 0}));
    CHECK(cycle.cycle[1] == bits({1, 1}));
    CHECK(find_attractor(mutual_not(), bits({1, 1}), 10) == cycle);

    const auto fixed = find_attractor(mutual_not(), bits({0, 1}), 10);
    CHECK(fixed.period() == 1);
    CHECK(fixed.first() == bits({0, 1}));

    CHECK(error_code([] { find_attractor(mutual_not(), bits({0, 0}), 0); }) == ErrorCode::InvalidParameter);
    CHECK(error_code([] { find_attractor(mutual_not(), bits({0, 0}), 1); }) == ErrorCode::CapExceeded);
}

TEST_CASE("canonical rotation makes cycles compare equal")
{
    const auto a = canonical_attractor({bits({1, 1, 0}), bits({0, 1, 1}), bits({1, 0, 1})});
    const auto b = canonical_attractor({bits({0, 1, 1}), bits({1, 0, 1}), bits({1, 1, 0})});
    CHECK(a == b);
    CHECK(a.first() == bits({0, 1, 1}));
}

TEST_CASE("exhaustive enumeration")
{
    const auto set = enumerate_attractors(mutual_not(), Exhaustive{});
    CHECK(set.exhaustive);
    CHECK(as_strings(set) == std::vector<std::vector<std::string>>{{"00", "11"}, {"01"}, {"10"}});
    for (AttractorId i = 0; i < set.size(); ++i)
        CHECK(set[i].id == i);

    CHECK(enumerate_attractors(constant_zero(6), Exhaustive{}).size() == 1);
    CHECK(error_code([] { enumerate_attractors(mutual_not(), Exhaustive{1}); }) == ErrorCode::ResourceLimit);
}

TEST_CASE("exhaustive enumeration equals the successor-map oracle")
{
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const std::size_t n = 4 + seed % 9;
        const auto net = generate_random_network(n, 2, 0.5, seed);
        CAPTURE(seed);
        CHECK(as_strings(enumerate_attractors(net, Exhaustive{})) == support::oracle_dynamics(net).cycles);
    }
}

TEST_CASE("sampled enumeration covers the exhaustive set when every state is a start")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const std::size_t n = 4 + seed % 7;
        const auto net = generate_random_network(n, 2, 0.5, seed);
        const auto exhaustive = enumerate_attractors(net, Exhaustive{});
        const auto sampled = enumerate_attractors(net, Sampled{std::size_t{1} << n, seed, 1u << 12});
        CHECK_FALSE(sampled.exhaustive);
        CHECK(sampled.size() == exhaustive.size());
        for (const auto& a : exhaustive.attractors)
            CHECK(sampled.find(a.first()).has_value());
    }
}

TEST_CASE("ATM of small networks")
{
    SUBCASE("single attractor")
    {
        const auto net = constant_zero(3);
        const auto atm = compute_atm(net, enumerate_attractors(net, Exhaustive{}), 100);
        REQUIRE(atm.size() == 1);
        CHECK(atm.weight(0, 0) == 1.0);
    }
    SUBCASE("mutual NOT matches brute force")
    {
        const auto net = mutual_not();
        const auto atm = compute_atm(net, enumerate_attractors(net, Exhaustive{}), 100);
        CHECK(atm.counts() == support::oracle_atm_counts(support::oracle_dynamics(net)));
        // cycle {00,11}: every flip lands on 01 or 10
        CHECK(atm.weight(0, 0) == 0.0);
        CHECK(atm.weight(0, 1) == 0.5);
        CHECK(atm.weight(0, 2) == 0.5);
        // fixed point 01: both flips fall into the cycle
        CHECK(atm.weight(1, 0) == 1.0);
        CHECK(atm.weight(1, 1) == 0.0);
    }
    SUBCASE("incomplete attractor list")
    {
        const auto net = mutual_not();
        auto set = enumerate_attractors(net, Exhaustive{});
        set.attractors.pop_back();
        CHECK(error_code([&] { compute_atm(net, set, 100); }) == ErrorCode::IncompleteAttractorSet);
    }
}

TEST_CASE("ATM equals the perturbation oracle on random networks")
{
    for (std::uint64_t seed = 100; seed < 115; ++seed) {
        const auto net = generate_random_network(4 + seed % 7, 2, 0.5, seed);
        const auto atm = compute_atm(net, enumerate_attractors(net, Exhaustive{}), 1u << 12);
        CAPTURE(seed);
        CHECK(atm.counts() == support::oracle_atm_counts(support::oracle_dynamics(net)));
        for (std::size_t i = 0; i < atm.size(); ++i) {
            double sum = 0.0;
            for (double w : atm.row(i)) {
                CHECK(w >= 0.0);
                CHECK(w <= 1.0);
                sum += w;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("threshold ergodic sets")
{
    const auto atm = AttractorTransitionMatrix::from_weights({{0.7, 0.3, 0.0}, {0.2, 0.7, 0.1}, {0.0, 0.0, 1.0}});

    SUBCASE("at 0.15 the weak exit is pruned and {0,1} becomes terminal")
    {
        const auto sets = threshold_ergodic_sets(atm, 0.15);
        REQUIRE(sets.size() == 2);
        CHECK(sets[0].attractors == std::vector<AttractorId>{0, 1});
        CHECK(sets[1].attractors == std::vector<AttractorId>{2});
    }
    SUBCASE("at 0.05 the pair still leaks into {2}")
    {
        const auto sets = threshold_ergodic_sets(atm, 0.05);
        REQUIRE(sets.size() == 1);
        CHECK(sets[0].attractors == std::vector<AttractorId>{2});
    }
    SUBCASE("above the largest cross weight every attractor stands alone")
    {
        CHECK(threshold_ergodic_sets(atm, atm.max_off_diagonal()).size() == 3);
    }
    SUBCASE("a fully connected matrix at zero is one set")
    {
        const auto full = AttractorTransitionMatrix::from_weights({{0.5, 0.25, 0.25}, {0.1, 0.8, 0.1}, {0.3, 0.3, 0.4}});
        const auto sets = threshold_ergodic_sets(full, 0.0);
        REQUIRE(sets.size() == 1);
        CHECK(sets[0].attractors.size() == 3);
    }
    SUBCASE("the comparison is strict")
    {
        const auto two = AttractorTransitionMatrix::from_weights({{0.8, 0.2}, {0.2, 0.8}});
        CHECK(threshold_ergodic_sets(two, 0.2).size() == 2);
        CHECK(threshold_ergodic_sets(two, 0.19).size() == 1);
    }
}

TEST_CASE("TES count never decreases with delta")
{
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + rng.below(9);
        std::vector<std::vector<double>> w(m, std::vector<double>(m));
        for (auto& row : w) {
            double sum = 0.0;
            for (auto& x : row)
                sum += x = rng.uniform();
            for (auto& x : row)
                x /= sum;
            double check = 0.0;
            for (std::size_t j = 0; j + 1 < m; ++j)
                check += row[j];
            row[m - 1] = 1.0 - check;
        }
        const auto atm = AttractorTransitionMatrix::from_weights(w);
        std::size_t last = 0;
        for (int k = 0; k < 20; ++k) {
            const auto sets = threshold_ergodic_sets(atm, 0.05 * k);
            CHECK(sets.size() >= last);
            last = sets.size();
            std::vector<int> owners(m, 0);
            for (const auto& s : sets)
                for (auto a : s.attractors)
                    ++owners[a];
            CHECK(std::all_of(owners.begin(), owners.end(), [](int o) { return o <= 1; }));
        }
    }
}

TEST_CASE("lineage hierarchy")
{
    SUBCASE("a single attractor gives a path")
    {
        const auto h = build_lineage_hierarchy(AttractorTransitionMatrix::from_weights({{1.0}}), {0.0, 0.2, 0.5});
        REQUIRE(h.levels.size() == 3);
        for (const auto& level : h.levels)
            CHECK(level.sets.size() == 1);
        CHECK(h.edges.size() == 2);
    }
    SUBCASE("a hub feeding two sinks splits into two leaves")
    {
        const auto atm = AttractorTransitionMatrix::from_weights({{0.9, 0.0, 0.1}, {0.0, 0.9, 0.1}, {0.3, 0.3, 0.4}});
        const auto h = build_lineage_hierarchy(atm, {0.05, 0.2});
        REQUIRE(h.levels.size() == 2);
        REQUIRE(h.levels[0].sets.size() == 1);
        CHECK(h.levels[0].sets[0].attractors == std::vector<AttractorId>{0, 1, 2});
        REQUIRE(h.levels[1].sets.size() == 2);
        CHECK(h.levels[1].sets[0].attractors == std::vector<AttractorId>{0});
        CHECK(h.levels[1].sets[1].attractors == std::vector<AttractorId>{1});
        CHECK(h.edges == std::vector<HierarchyEdge>{{0, 0, 0}, {0, 0, 1}});

        std::ostringstream out;
        write_hierarchy(out, h);
        CHECK(out.str().find("edge 0.0 -> 1.1") != std::string::npos);
    }
    SUBCASE("fragments outside every parent set are reported")
    {
        const auto atm = AttractorTransitionMatrix::from_weights({{0.7, 0.3, 0.0}, {0.2, 0.7, 0.1}, {0.0, 0.0, 1.0}});
        CHECK(error_code([&] { build_lineage_hierarchy(atm, {0.05, 0.15, 0.35}); }) == ErrorCode::NonTreeStructure);
    }
    SUBCASE("schedule checks")
    {
        const auto atm = AttractorTransitionMatrix::from_weights({{1.0}});
        CHECK(error_code([&] { build_lineage_hierarchy(atm, {0.2, 0.1}); }) == ErrorCode::InvalidParameter);
        CHECK(error_code([&] { build_lineage_hierarchy(atm, {}); }) == ErrorCode::InvalidParameter);
        CHECK(error_code([&] { build_lineage_hierarchy(atm, {0.1, 1.5}); }) == ErrorCode::InvalidParameter);
    }
}

TEST_CASE("knockout clamps a node")
{
    const auto net = generate_random_network(8, 2, 0.5, 21);
    const auto ko = apply_knockout(net, 0, false);
    CHECK_FALSE(net.clamp(0).has_value());
    CHECK(ko.clamp(0) == std::optional<bool>(false));
    auto s = NetworkState::from_code(8, 0xff);
    for (int t = 0; t < 20; ++t) {
        s = synchronous_step(ko, s);
        CHECK_FALSE(s.get(0));
    }
    CHECK(error_code([&] { apply_knockout(net, 8, true); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("knocking out a node nobody reads leaves the others untouched")
{
    // nodes 0..2 form a small circuit; node 3 copies itself and feeds nobody
    const BooleanNetwork net({{1, 2}, {0}, {0, 1}, {3}},
                             {{false, true, true, false}, {true, false}, {false, false, false, true}, {false, true}});
    const auto ko = apply_knockout(net, 3, true);
    for (std::uint64_t c = 0; c < 16; ++c) {
        auto a = NetworkState::from_code(4, c);
        auto b = a;
        for (int t = 0; t < 10; ++t) {
            a = synchronous_step(net, a);
            b = synchronous_step(ko, b);
            for (std::size_t i = 0; i < 3; ++i)
                CHECK(a.get(i) == b.get(i));
        }
    }
}

TEST_CASE("network text round trip")
{
    const auto net = apply_knockout(generate_random_network(7, 3, 0.4, 2), 4, true);
    const auto text = format_network(net);
    CHECK(text.rfind("node 0: inputs=", 0) == 0);
    CHECK(text.find("clamp=1") != std::string::npos);
    CHECK(parse_network(text) == net);
    CHECK(parse_network("# comment\n\n" + text) == net);
    CHECK(error_code([] { parse_network("node 0: inputs=0 table=01\n"); }) == ErrorCode::Config);
    CHECK(error_code([] { parse_network("node 1: inputs=0 table=01 clamp=none\n"); }) == ErrorCode::Config);
    CHECK(error_code([] { load_network("/nonexistent/net.txt"); }) == ErrorCode::Io);
}

TEST_CASE("ATM and attractor exports")
{
    const auto net = mutual_not();
    const auto set = enumerate_attractors(net, Exhaustive{});
    std::ostringstream a, m;
    write_attractors(a, set);
    write_atm_csv(m, compute_atm(net, set, 10));
    CHECK(a.str().rfind("A1 period=2 states=00|11", 0) == 0);
    CHECK(m.str().rfind("from,A1,A2,A3\n", 0) == 0);
}

TEST_CASE("designed networks realise the requested flip landscape")
{
    FlipDesign d;
    d.node_count = 9;
    d.flips = {{0, 3, 1}, {2, 0, 0}, {0, 4, 0}};
    d.seed = 3;
    d.min_distance = 3;
    const auto designed = design_network(d);
    const auto set = enumerate_attractors(designed.network, Exhaustive{});
    REQUIRE(set.size() == 3);
    for (const auto& a : set.attractors)
        CHECK(a.period() == 1);

    const auto atm = compute_atm(designed.network, set, 1000);
    for (std::size_t a = 0; a < 3; ++a) {
        const auto from = *set.find(NetworkState::from_code(9, designed.fixed_points[a]));
        std::size_t moved = 0;
        for (std::size_t b = 0; b < 3; ++b) {
            if (a == b)
                continue;
            const auto to = *set.find(NetworkState::from_code(9, designed.fixed_points[b]));
            CHECK(atm.counts()[from][to] == d.flips[a][b]);
            moved += d.flips[a][b];
        }
        CHECK(atm.counts()[from][from] == 9 - moved);
    }
}

TEST_CASE("design input checks")
{
    FlipDesign d;
    d.node_count = 4;
    d.flips = {{0, 5}, {0, 0}};
    CHECK(error_code([&] { design_network(d); }) == ErrorCode::InvalidParameter);
    d.flips = {{0, 1}};
    CHECK(error_code([&] { design_network(d); }) == ErrorCode::InvalidParameter);
}
