// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance <cryptsim binary> <configs dir> [criterion ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "cryptsim/cpm/dynamics.hpp"
#include "cryptsim/cpm/snapshot.hpp"
#include "cryptsim/experiment/config.hpp"
#include "cryptsim/experiment/experiment.hpp"
#include "cryptsim/metrics/metrics.hpp"
#include "cryptsim/nrbn/attractor.hpp"
#include "cryptsim/nrbn/hierarchy.hpp"
#include "cryptsim/nrbn/network_io.hpp"
#include "cryptsim/nrbn/transition_matrix.hpp"
#include "cryptsim/rng.hpp"
#include "support.hpp"

using namespace cryptsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int number;
    std::string name;
    double time_limit;  // seconds, 0 = none
    std::function<Outcome()> run;
};

fs::path g_binary;
fs::path g_configs;
fs::path g_scratch;

std::string fmt(double v, int digits = 4)
{
    std::ostringstream o;
    o.precision(digits);
    o << v;
    return o.str();
}

struct MeanSe {
    double mean = 0.0;
    double sd = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs)
{
    MeanSe m;
    const double n = static_cast<double>(xs.size());
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double var = 0.0;
    for (double x : xs)
        var += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(var / (n - 1));
    m.se = m.sd / std::sqrt(n);
    return m;
}

template <class F>
void parallel_for(std::size_t n, F&& f)
{
    std::vector<std::thread> pool;
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t w = 0; w < std::min(workers, n); ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers)
                f(i);
        });
    for (auto& t : pool)
        t.join();
}

// 1
Outcome attractor_oracle()
{
    int matched = 0;
    std::size_t largest = 0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 4 + static_cast<std::size_t>(k % 9);
        const auto net = nrbn::generate_random_network(n, 2, 0.5, 1000 + static_cast<std::uint64_t>(k));
        const auto found = nrbn::enumerate_attractors(net, nrbn::Exhaustive{});
        const auto oracle = support::oracle_dynamics(net);
        std::vector<std::vector<std::string>> cycles;
        for (const auto& a : found.attractors) {
            std::vector<std::string> c;
            for (const auto& s : a.cycle)
                c.push_back(s.to_string());
            cycles.push_back(c);
        }
        std::sort(cycles.begin(), cycles.end());
        matched += cycles == oracle.cycles;
        largest = std::max(largest, cycles.size());
    }
    return {matched == 20, std::to_string(matched) + "/20 networks match, up to " + std::to_string(largest) +
                               " attractors"};
}

// 2
Outcome atm_oracle()
{
    double max_diff = 0.0, max_row_err = 0.0;
    int matched = 0;
    for (int k = 0; k < 10; ++k) {
        const std::size_t n = 4 + static_cast<std::size_t>(k % 7);
        const auto net = nrbn::generate_random_network(n, 2, 0.5, 2000 + static_cast<std::uint64_t>(k));
        const auto set = nrbn::enumerate_attractors(net, nrbn::Exhaustive{});
        const auto atm = nrbn::compute_atm(net, set, 100000);
        const auto oracle = support::oracle_dynamics(net);
        const auto counts = support::oracle_atm_counts(oracle);
        // oracle cycles are sorted by canonical string, as are the attractor ids
        bool same = atm.size() == counts.size();
        for (std::size_t i = 0; same && i < counts.size(); ++i) {
            const double trials = static_cast<double>(oracle.cycles[i].size() * n);
            double sum = 0.0;
            for (std::size_t j = 0; j < counts.size(); ++j) {
                max_diff = std::max(max_diff, std::abs(atm.weight(i, j) - counts[i][j] / trials));
                same = same && atm.counts()[i][j] == counts[i][j];
                sum += atm.weight(i, j);
            }
            max_row_err = std::max(max_row_err, std::abs(sum - 1.0));
        }
        matched += same;
    }
    return {matched == 10 && max_diff == 0.0 && max_row_err <= 1e-12,
            std::to_string(matched) + "/10 match, max |diff| " + fmt(max_diff) + ", max row-sum error " +
                fmt(max_row_err)};
}

// 3
Outcome tes_properties()
{
    Rng rng(3);
    int monotone_bad = 0, subset_bad = 0, top_bad = 0;
    for (int m = 0; m < 100; ++m) {
        const std::size_t n = 2 + static_cast<std::size_t>(m % 9);
        std::vector<std::vector<double>> w(n, std::vector<double>(n));
        for (auto& row : w) {
            double sum = 0.0;
            for (auto& x : row) {
                x = rng.bernoulli(0.3) ? 0.0 : rng.uniform();
                sum += x;
            }
            if (sum == 0.0) {
                row[rng.below(n)] = 1.0;
                sum = 1.0;
            }
            for (auto& x : row)
                x /= sum;
        }
        const auto atm = nrbn::AttractorTransitionMatrix::from_weights(w);
        std::vector<std::vector<nrbn::ThresholdErgodicSet>> levels;
        for (int i = 0; i < 20; ++i)
            levels.push_back(nrbn::threshold_ergodic_sets(atm, i / 20.0));
        bool monotone = true, nested = true;
        for (std::size_t i = 1; i < levels.size(); ++i) {
            monotone = monotone && levels[i].size() >= levels[i - 1].size();
            for (const auto& t : levels[i])
                nested = nested && std::any_of(levels[i - 1].begin(), levels[i - 1].end(),
                                               [&](const auto& p) { return t.subset_of(p); });
        }
        monotone_bad += !monotone;
        subset_bad += !nested;
        top_bad += nrbn::threshold_ergodic_sets(atm, atm.max_off_diagonal()).size() != n;
    }
    return {monotone_bad == 0 && subset_bad == 0 && top_bad == 0,
            "count non-decreasing violated in " + std::to_string(monotone_bad) + "/100, subset violated in " +
                std::to_string(subset_bad) + "/100, count at max weight wrong in " + std::to_string(top_bad) + "/100"};
}

// 4
Outcome delta_h_oracle()
{
    using namespace cpm;
    Rng rng(4);
    int checked = 0;
    double worst = 0.0;
    for (int world = 0; checked < 1000; ++world) {
        Lattice lat(32, 32);
        CellTable cells;
        for (int y = 0; y + 4 <= 32; y += 4)
            for (int x = 0; x + 4 <= 32; x += 4)
                if (!rng.bernoulli(0.15))
                    place_block(lat, cells, kPopulations[rng.below(kPopulationCount)], x, y, 4, 4,
                                10 + static_cast<int>(rng.below(12)));
        EnergyParams p;
        for (std::size_t a = 0; a < kTypeSlots; ++a)
            for (std::size_t b = a; b < kTypeSlots; ++b)
                p.set_adhesion(static_cast<CellType>(a), static_cast<CellType>(b), std::round(rng.uniform() * 200) / 10);
        p.lambda_volume = 0.5 + rng.uniform() * 3;
        p.temperature = 50.0;
        for (int i = 0; i < 3; ++i)
            monte_carlo_sweep(lat, cells, p, rng);
        p.contact = world % 2 ? Neighborhood::Moore : Neighborhood::VonNeumann;
        for (int k = 0; k < 125 && checked < 1000;) {
            const Site target = lat.site(rng.below(lat.site_count()));
            const auto offsets = neighbor_offsets(p.copy);
            Site source;
            if (!lat.neighbor(target, offsets[rng.below(offsets.size())], source) || lat.at(target) == lat.at(source))
                continue;
            if (lat.at(target) != kMedium && cells[lat.at(target)].volume == 1)
                continue;
            const auto move = ProposedCopy::make(lat, target, source, p.copy);
            const double incremental = delta_energy(lat, cells, move, p);
            Lattice after = lat;
            CellTable after_cells = cells;
            apply_copy(after, after_cells, move);
            const double full = support::oracle_energy(after, after_cells, p) - support::oracle_energy(lat, cells, p);
            worst = std::max(worst, std::abs(incremental - full));
            ++checked;
            ++k;
        }
    }
    return {worst <= 1e-9, std::to_string(checked) + " proposals, max |error| " + fmt(worst)};
}

// 5
Outcome metropolis_statistics()
{
    Rng rng(5);
    const int trials = 100000;
    int accepted = 0;
    for (int i = 0; i < trials; ++i)
        accepted += cpm::metropolis_accept(10.0, 10.0, rng);
    const double p = std::exp(-1.0);
    const double rate = static_cast<double>(accepted) / trials;
    const double se = std::sqrt(p * (1 - p) / trials);
    int uphill = 0;
    for (int i = 0; i < trials; ++i)
        uphill += cpm::metropolis_accept(0.1 + rng.uniform() * 10.0, 1e-9, rng);
    return {std::abs(rate - p) <= 3 * se && uphill == 0,
            "rate " + fmt(rate, 5) + " vs " + fmt(p, 5) + " (" + fmt((rate - p) / se, 3) + " SE), uphill accepted at "
                "T=1e-9: " + std::to_string(uphill)};
}

std::size_t cross_contacts(const cpm::Lattice& lat, const cpm::CellTable& cells)
{
    std::size_t n = 0;
    for (auto [a, b] : metrics::contact_pairs(lat, cpm::Neighborhood::Moore))
        n += a != cpm::kMedium && b != cpm::kMedium && cells.type_of(a) != cells.type_of(b);
    return n;
}

// 6
Outcome cell_sorting()
{
    using namespace cpm;
    std::vector<std::size_t> before(10), after(10);
    parallel_for(10, [&](std::size_t seed) {
        Rng rng(600 + seed);
        Lattice lat(64, 64);
        CellTable cells;
        for (int y = 0; y < 64; y += 4)
            for (int x = 0; x < 64; x += 4)
                place_block(lat, cells, rng.bernoulli(0.5) ? CellType::Goblet : CellType::Enterocyte, x, y, 4, 4, 16);
        EnergyParams p;
        for (auto t : {CellType::Goblet, CellType::Enterocyte}) {
            p.set_adhesion(t, t, 4.0);
            p.set_adhesion(t, CellType::Medium, 16.0);
        }
        p.set_adhesion(CellType::Goblet, CellType::Enterocyte, 14.0);
        p.lambda_volume = 2.0;
        p.temperature = 10.0;
        before[seed] = cross_contacts(lat, cells);
        for (int t = 0; t < 5000; ++t)
            monte_carlo_sweep(lat, cells, p, rng);
        after[seed] = cross_contacts(lat, cells);
    });
    int sorted = 0;
    std::string detail;
    for (std::size_t s = 0; s < 10; ++s) {
        sorted += after[s] < before[s];
        detail += (s ? " " : "") + std::to_string(before[s]) + "->" + std::to_string(after[s]);
    }
    return {sorted >= 8, std::to_string(sorted) + "/10 seeds reduced cross-type contacts (" + detail + ")"};
}

double drift(double mu, std::uint64_t seed, int start_y)
{
    using namespace cpm;
    Rng rng(seed);
    Lattice lat(32, 96);
    CellTable cells;
    const auto id = place_block(lat, cells, CellType::TA1, 14, start_y, 4, 4, 16);
    EnergyParams p;
    p.set_adhesion(CellType::TA1, CellType::Medium, 8.0);
    p.lambda_volume = 2.0;
    p.temperature = 10.0;
    p.motility[slot(CellType::TA1)] = mu;
    const double y0 = cells[id].center_of_mass().y;
    for (int t = 0; t < 2000; ++t)
        monte_carlo_sweep(lat, cells, p, rng);
    return cells[id].center_of_mass().y - y0;
}

// 7
Outcome directed_migration()
{
    std::vector<double> up(10), still(10);
    parallel_for(20, [&](std::size_t k) {
        if (k < 10)
            up[k] = drift(2.0, 700 + k, 10);
        else
            still[k - 10] = drift(0.0, 800 + k, 40);
    });
    const int positive = static_cast<int>(std::count_if(up.begin(), up.end(), [](double d) { return d > 0; }));
    const auto s = mean_se(still);
    const auto u = mean_se(up);
    return {positive >= 8 && std::abs(s.mean) <= 3 * s.se,
            "mu>0: " + std::to_string(positive) + "/10 moved up (mean dy " + fmt(u.mean) + "); mu=0: mean dy " +
                fmt(s.mean) + " +- " + fmt(s.se) + " SE"};
}

// 8
Outcome homeostasis()
{
    auto cfg = experiment::load_config((g_configs / "homeostasis.cfg").string());
    cfg.run.output_dir = (g_scratch / "homeostasis").string();
    cfg.run.workers = std::max(1u, std::min(5u, std::thread::hardware_concurrency()));
    const bool protocol = cfg.run.replicates == 5 && cfg.run.stationarity_window == 1000 &&
                          cfg.run.stationarity_tol == 0.1 && cfg.run.ticks == 10000 && cfg.lattice.width == 64 &&
                          cfg.lattice.height == 128;
    const auto s = experiment::run_replicates(cfg);
    int stationary = 0;
    std::set<std::string> initials;
    std::string l1s;
    for (const auto& r : s.replicates) {
        initials.insert(r.initial + "#" + std::to_string(r.seed));
        if (r.ok && r.stationarity) {
            stationary += r.stationarity->stationary;
            l1s += (l1s.empty() ? "" : " ") + fmt(r.stationarity->l1, 3);
        }
    }
    const double l1 = s.max_pairwise_l1.value_or(INFINITY);
    return {protocol && s.completed == 5 && stationary == 5 && initials.size() == 5 && l1 < 0.15,
            std::to_string(stationary) + "/5 stationary (window L1 " + l1s + "), max pairwise L1 " + fmt(l1, 3) +
                (protocol ? "" : ", protocol differs from 5 x 64x128 x 1e4 MCS")};
}

// 9
Outcome spatial_order()
{
    using namespace cpm;
    auto tiled = [](int w, int h, auto type_at) {
        std::pair<Lattice, CellTable> world{Lattice(w, h), CellTable{}};
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                place_block(world.first, world.second, type_at(x, y), x, y, 1, 1, 1);
        return world;
    };
    const auto coding = metrics::one_vs_rest(CellType::Stem);
    const auto adj = Neighborhood::VonNeumann;
    auto [cl, cc] = tiled(16, 16, [](int x, int y) { return (x + y) % 2 ? CellType::Stem : CellType::Goblet; });
    const double checker = metrics::morans_index(cl, cc, coding, adj);
    auto [hl, hc] = tiled(16, 16, [](int x, int) { return x < 8 ? CellType::Stem : CellType::Goblet; });
    const double halves = metrics::morans_index(hl, hc, coding, adj);
    std::vector<double> null;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(900 + static_cast<std::uint64_t>(seed));
        auto [rl, rc] = tiled(20, 20, [&](int, int) { return rng.bernoulli(0.5) ? CellType::Stem : CellType::Goblet; });
        null.push_back(metrics::morans_index(rl, rc, coding, adj));
    }
    const auto m = mean_se(null);
    const double expected = -1.0 / 399.0;
    return {std::abs(checker + 1.0) <= 1e-12 && halves > 0.8 && std::abs(m.mean - expected) <= 3 * m.se,
            "checkerboard " + fmt(checker, 6) + ", halves " + fmt(halves) + ", random " + fmt(m.mean) + " vs " +
                fmt(expected) + " (" + fmt((m.mean - expected) / m.se, 3) + " SE)"};
}

metrics::VelocityField field_of(const std::vector<cpm::Vec2>& v)
{
    metrics::VelocityField f;
    for (std::size_t i = 0; i < v.size(); ++i)
        f.cells.push_back({static_cast<cpm::CellId>(i + 1), CellType::TA1, v[i], 9});
    return f;
}

// 10
Outcome coordinated_motion()
{
    const int side = 16;
    std::vector<std::pair<cpm::CellId, cpm::CellId>> grid;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const cpm::CellId id = y * side + x + 1;
            if (x + 1 < side)
                grid.push_back({id, id + 1});
            if (y + 1 < side)
                grid.push_back({id, id + side});
        }
    const auto uniform =
        metrics::neighbor_velocity_correlation(field_of(std::vector<cpm::Vec2>(side * side, {0.3, 0.7})), grid);
    const auto anti = metrics::neighbor_velocity_correlation(field_of({{1, 2}, {-1, -2}, {0.5, 0}, {-0.5, 0}}),
                                                             {{1, 2}, {3, 4}});
    Rng rng(10);
    std::vector<double> cosines;
    for (int draw = 0; draw < 1000; ++draw) {
        std::vector<cpm::Vec2> v;
        for (int i = 0; i < side * side; ++i)
            v.push_back({rng.normal(), rng.normal()});
        cosines.push_back(metrics::neighbor_velocity_correlation(field_of(v), grid).mean_direction_cosine);
    }
    const auto m = mean_se(cosines);
    return {std::abs(uniform.mean_direction_cosine - 1.0) <= 1e-12 &&
                std::abs(anti.mean_direction_cosine + 1.0) <= 1e-12 && std::abs(m.mean) <= 3 * m.se,
            "uniform " + fmt(uniform.mean_direction_cosine, 6) + ", antiparallel " +
                fmt(anti.mean_direction_cosine, 6) + ", isotropic " + fmt(m.mean) + " (" + fmt(m.mean / m.se, 3) +
                " SE)"};
}

int run_cli(const std::string& args)
{
    const std::string cmd = "\"" + g_binary.string() + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

// 11
Outcome determinism()
{
    const std::string common = "run \"" + (g_configs / "homeostasis.cfg").string() +
                               "\" --replicates 3 --seed 11 --set run.ticks=400 "
                               "--set run.snapshot_every=200 --set run.stationarity_window=100";
    const auto a = g_scratch / "det_a", b = g_scratch / "det_b", c = g_scratch / "det_c";
    const int ra = run_cli(common + " --workers 1 --out \"" + a.string() + "\"");
    const int rb = run_cli(common + " --workers 1 --out \"" + b.string() + "\"");
    const int rc = run_cli(common + " --workers 3 --out \"" + c.string() + "\"");
    if (ra || rb || rc)
        return {false, "cryptsim run exited with " + std::to_string(ra) + "/" + std::to_string(rb) + "/" +
                           std::to_string(rc)};
    std::size_t compared = 0, differing = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file())
            continue;
        const auto name = e.path().filename().string();
        if (name != "metrics.csv" && name.rfind("final_", 0) != 0 && name.rfind("lattice_", 0) != 0 &&
            name.rfind("cells_", 0) != 0)
            continue;
        const auto rel = fs::relative(e.path(), a);
        const auto text = support::read_file(e.path());
        for (const auto& other : {b, c}) {
            ++compared;
            differing += !fs::exists(other / rel) || support::read_file(other / rel) != text;
        }
    }
    return {compared > 0 && differing == 0,
            std::to_string(compared) + " file comparisons (sequential and 3 workers), " + std::to_string(differing) +
                " differ"};
}

experiment::SimulationConfig knockout_config(const fs::path& dir, bool inert)
{
    fs::create_directories(dir);
    support::write_file(dir / "switch.net", nrbn::format_network(support::master_switch_network(inert)));
    support::write_file(dir / "two_leaf.txt", support::two_leaf_topology_text());
    return experiment::parse_config_text("nrbn.network_file = switch.net\nnrbn.delta_schedule = 0, 0.4\n"
                                         "coupling.topology_file = two_leaf.txt\ncoupling.base_cycle = 20\n"
                                         "lattice.width = 24\nlattice.height = 40\nrun.ticks = 300\n"
                                         "run.niche_rows = 6\nrun.replicates = 2\nrun.snapshot_every = 100\n"
                                         "run.stationarity_window = 50\nrun.output_dir = " +
                                             (dir / "out").string() + "\n",
                                         dir.string());
}

// 12
Outcome knockouts()
{
    const auto dir = g_scratch / "knockout";
    const auto inert = experiment::run_knockout_experiment(knockout_config(dir / "inert", true), 3, false);
    const auto master = experiment::run_knockout_experiment(knockout_config(dir / "master", false), 0, false);
    std::set<CellType> final_types;
    for (const auto& r : master.knockout.replicates) {
        std::ifstream in(r.dir / "final_cells.csv");
        for (const auto& c : cpm::read_cells_csv(in))
            final_types.insert(c.type);
    }
    const bool ok = inert.hierarchies_identical && !inert.degenerate && master.degenerate &&
                    !master.hierarchies_identical && final_types.size() == 1 &&
                    master.knockout.completed == master.knockout.replicates.size();
    return {ok, std::string("inert node: identical=") + (inert.hierarchies_identical ? "yes" : "no") +
                    ", degenerate=" + (inert.degenerate ? "yes" : "no") + "; master switch: degenerate=" +
                    (master.degenerate ? "yes" : "no") + ", final types " + std::to_string(final_types.size())};
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc < 3) {
        std::cerr << "usage: acceptance <cryptsim binary> <configs dir> [criterion ...]\n";
        return 2;
    }
    g_binary = fs::absolute(argv[1]);
    g_configs = fs::absolute(argv[2]);
    std::set<int> only;
    for (int i = 3; i < argc; ++i)
        only.insert(std::atoi(argv[i]));
    g_scratch = fs::temp_directory_path() / "cryptsim_acceptance";
    fs::remove_all(g_scratch);
    fs::create_directories(g_scratch);

    const std::vector<Criterion> criteria = {
        {1, "attractor oracle", 30, attractor_oracle},
        {2, "ATM oracle", 60, atm_oracle},
        {3, "TES properties", 10, tes_properties},
        {4, "incremental energy oracle", 10, delta_h_oracle},
        {5, "Metropolis statistics", 5, metropolis_statistics},
        {6, "cell sorting", 120, cell_sorting},
        {7, "directed migration", 0, directed_migration},
        {8, "homeostasis", 900, homeostasis},
        {9, "spatial order", 0, spatial_order},
        {10, "coordinated motion", 0, coordinated_motion},
        {11, "end-to-end determinism", 0, determinism},
        {12, "knockout scenarios", 0, knockouts},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.number))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit > 0 && secs > c.time_limit) {
            o.pass = false;
            o.detail += "; over the " + fmt(c.time_limit) + " s limit";
        }
        failures += !o.pass;
        std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.number, c.name.c_str(), o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
