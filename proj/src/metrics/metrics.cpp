#include "cryptsim/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "cryptsim/error.hpp"
#include "cryptsim/util/format.hpp"

namespace cryptsim::metrics {

namespace {

Proportions normalize(const std::array<double, kPopulationCount>& totals)
{
    double sum = 0.0;
    for (double t : totals)
        sum += t;
    if (sum <= 0.0)
        throw Error(ErrorCode::EmptyPopulation, "no live cells");
    Proportions p{};
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = totals[i] / sum;
    return p;
}

}  // namespace

Proportions population_proportions(const std::vector<cpm::CellRecord>& cells, bool site_weighted)
{
    std::array<double, kPopulationCount> totals{};
    for (const auto& c : cells)
        totals[population_index(c.type)] += site_weighted ? c.volume : 1.0;
    return normalize(totals);
}

Proportions population_proportions(const cpm::CellTable& cells, bool site_weighted)
{
    std::array<double, kPopulationCount> totals{};
    for (auto id : cells.live_ids())
        totals[population_index(cells[id].type)] += site_weighted ? cells[id].volume : 1.0;
    return normalize(totals);
}

double l1_distance(const Proportions& a, const Proportions& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += std::abs(a[i] - b[i]);
    return d;
}

StationarityReport stationarity_test(const PopulationSeries& series, std::size_t window, double tol)
{
    if (window == 0)
        throw Error(ErrorCode::InvalidParameter, "stationarity window must be positive");
    if (series.size() < 2 * window)
        throw Error(ErrorCode::InsufficientData, "series has " + std::to_string(series.size()) +
                                                     " samples, stationarity needs " + std::to_string(2 * window));
    StationarityReport r;
    const std::size_t end = series.size(), mid = end - window, begin = mid - window;
    for (std::size_t t = begin; t < end; ++t)
        for (std::size_t i = 0; i < kPopulationCount; ++i)
            (t < mid ? r.previous_mean : r.final_mean)[i] += series[t][i] / window;
    for (std::size_t t = mid; t < end; ++t)
        for (std::size_t i = 0; i < kPopulationCount; ++i) {
            const double d = series[t][i] - r.final_mean[i];
            r.final_sd[i] += d * d / window;
        }
    for (auto& v : r.final_sd) {
        v = std::sqrt(v);
        r.max_sd = std::max(r.max_sd, v);
    }
    r.l1 = l1_distance(r.previous_mean, r.final_mean);
    r.stationary = r.l1 < tol && r.max_sd < tol;
    return r;
}

std::array<double, kTypeSlots> one_vs_rest(CellType type)
{
    std::array<double, kTypeSlots> c{};
    c[slot(type)] = 1.0;
    return c;
}

namespace {

template <class TypeOf>
double morans(const cpm::Lattice& lattice, const std::array<double, kTypeSlots>& coding, cpm::Neighborhood adjacency,
              TypeOf type_of)
{
    const auto& spins = lattice.spins();
    std::vector<double> x(spins.size(), 0.0);
    std::size_t n = 0;
    double mean = 0.0;
    for (std::size_t i = 0; i < spins.size(); ++i) {
        if (spins[i] == cpm::kMedium)
            continue;
        x[i] = coding[slot(type_of(spins[i]))];
        mean += x[i];
        ++n;
    }
    if (n < 2)
        throw Error(ErrorCode::UndefinedStatistic, "Moran's I needs at least two cell sites");
    mean /= static_cast<double>(n);

    double denom = 0.0;
    for (std::size_t i = 0; i < spins.size(); ++i)
        if (spins[i] != cpm::kMedium)
            denom += (x[i] - mean) * (x[i] - mean);
    if (denom <= 0.0)
        throw Error(ErrorCode::UndefinedStatistic, "Moran's I is undefined for a constant indicator");

    double numer = 0.0, weight = 0.0;
    const auto offsets = cpm::neighbor_offsets(adjacency);
    for (std::size_t i = 0; i < spins.size(); ++i) {
        if (spins[i] == cpm::kMedium)
            continue;
        const cpm::Site s = lattice.site(i);
        for (const auto& d : offsets) {
            cpm::Site nb;
            if (!lattice.neighbor(s, d, nb))
                continue;
            const std::size_t j = lattice.index(nb);
            if (j == i || spins[j] == cpm::kMedium)
                continue;
            numer += (x[i] - mean) * (x[j] - mean);
            weight += 1.0;
        }
    }
    if (weight == 0.0)
        throw Error(ErrorCode::UndefinedStatistic, "Moran's I needs adjacent cell sites");
    return (static_cast<double>(n) / weight) * numer / denom;
}

}  // namespace

double morans_index(const cpm::Lattice& lattice, const cpm::CellTable& cells,
                    const std::array<double, kTypeSlots>& coding, cpm::Neighborhood adjacency)
{
    return morans(lattice, coding, adjacency, [&](cpm::CellId id) { return cells.type_of(id); });
}

double morans_index(const cpm::Lattice& lattice, const std::vector<cpm::CellRecord>& cells,
                    const std::array<double, kTypeSlots>& coding, cpm::Neighborhood adjacency)
{
    cpm::CellId max_id = 0;
    for (const auto& c : cells)
        max_id = std::max(max_id, c.id);
    std::vector<CellType> types(static_cast<std::size_t>(max_id) + 1, CellType::Medium);
    for (const auto& c : cells)
        types[static_cast<std::size_t>(c.id)] = c.type;
    return morans(lattice, coding, adjacency, [&](cpm::CellId id) {
        if (static_cast<std::size_t>(id) >= types.size() || types[static_cast<std::size_t>(id)] == CellType::Medium)
            throw Error(ErrorCode::InternalConsistency, "lattice spin " + std::to_string(id) + " has no cell record");
        return types[static_cast<std::size_t>(id)];
    });
}

double VelocityField::speed(const CellVelocity& v) const
{
    return std::hypot(v.displacement.x, v.displacement.y) / window;
}

VelocityField velocity_field(const std::vector<cpm::CellRecord>& before, const std::vector<cpm::CellRecord>& after,
                             int window, int lattice_width)
{
    if (window < 1)
        throw Error(ErrorCode::InvalidParameter, "velocity window must be positive");
    VelocityField f;
    f.window = window;
    auto b = before;
    std::sort(b.begin(), b.end(), [](const auto& l, const auto& r) { return l.id < r.id; });
    auto a = after;
    std::sort(a.begin(), a.end(), [](const auto& l, const auto& r) { return l.id < r.id; });
    std::size_t i = 0;
    for (const auto& cur : a) {
        while (i < b.size() && b[i].id < cur.id)
            ++i;
        if (i == b.size() || b[i].id != cur.id)
            continue;
        double dx = cur.com.x - b[i].com.x;
        dx -= lattice_width * std::round(dx / lattice_width);
        f.cells.push_back({cur.id, cur.type, {dx, cur.com.y - b[i].com.y}, cur.volume});
    }
    return f;
}

std::vector<std::pair<cpm::CellId, cpm::CellId>> contact_pairs(const cpm::Lattice& lattice,
                                                               cpm::Neighborhood adjacency)
{
    std::vector<std::pair<cpm::CellId, cpm::CellId>> out;
    const auto offsets = cpm::neighbor_offsets(adjacency);
    for (std::size_t i = 0; i < lattice.site_count(); ++i) {
        const cpm::Site s = lattice.site(i);
        const cpm::CellId a = lattice.at(s);
        if (a == cpm::kMedium)
            continue;
        for (const auto& d : offsets) {
            cpm::Site nb;
            if (!lattice.neighbor(s, d, nb))
                continue;
            const cpm::CellId b = lattice.at(nb);
            if (b != cpm::kMedium && a < b)
                out.emplace_back(a, b);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MotionCorrelation neighbor_velocity_correlation(const VelocityField& field,
                                                const std::vector<std::pair<cpm::CellId, cpm::CellId>>& contacts)
{
    auto lookup = [&](cpm::CellId id) -> const CellVelocity* {
        auto it = std::lower_bound(field.cells.begin(), field.cells.end(), id,
                                   [](const CellVelocity& v, cpm::CellId x) { return v.id < x; });
        return it != field.cells.end() && it->id == id ? &*it : nullptr;
    };
    double su = 0.0, suu = 0.0, suv = 0.0, cos_sum = 0.0;
    std::size_t samples = 0, pairs = 0, cos_pairs = 0;
    for (const auto& [ia, ib] : contacts) {
        const auto* a = lookup(ia);
        const auto* b = lookup(ib);
        if (!a || !b)
            continue;
        ++pairs;
        const double u[2] = {a->displacement.x, a->displacement.y};
        const double v[2] = {b->displacement.x, b->displacement.y};
        for (int k = 0; k < 2; ++k) {
            // Both orders, so the two marginals coincide.
            su += u[k] + v[k];
            suu += u[k] * u[k] + v[k] * v[k];
            suv += 2.0 * u[k] * v[k];
            samples += 2;
        }
        const double na = std::hypot(u[0], u[1]), nb = std::hypot(v[0], v[1]);
        if (na > 0.0 && nb > 0.0) {
            cos_sum += (u[0] * v[0] + u[1] * v[1]) / (na * nb);
            ++cos_pairs;
        }
    }
    if (pairs < 2)
        throw Error(ErrorCode::InsufficientData, "velocity correlation needs at least two contacting pairs");
    MotionCorrelation m;
    m.pairs = pairs;
    const double n = static_cast<double>(samples);
    const double mean = su / n;
    const double var = suu / n - mean * mean;
    const double cov = suv / n - mean * mean;
    m.pearson_r = var > 1e-15 ? cov / var : std::numeric_limits<double>::quiet_NaN();
    m.mean_direction_cosine = cos_pairs ? cos_sum / cos_pairs : std::numeric_limits<double>::quiet_NaN();
    return m;
}

Distribution describe(std::vector<double> values)
{
    Distribution d;
    d.count = values.size();
    if (values.empty())
        return d;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values)
        sum += v;
    d.mean = sum / values.size();
    double ss = 0.0;
    for (double v : values)
        ss += (v - d.mean) * (v - d.mean);
    d.sd = values.size() > 1 ? std::sqrt(ss / (values.size() - 1)) : 0.0;
    auto q = [&](double p) {
        const double pos = p * (values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (values[hi] - values[lo]) * (pos - lo);
    };
    d.q10 = q(0.1);
    d.q50 = q(0.5);
    d.q90 = q(0.9);
    return d;
}

std::vector<TypeStats> speed_size_stats(const std::vector<VelocityField>& history)
{
    std::array<std::vector<double>, kPopulationCount> speeds, volumes;
    for (const auto& f : history)
        for (const auto& v : f.cells) {
            speeds[population_index(v.type)].push_back(f.speed(v));
            volumes[population_index(v.type)].push_back(v.volume);
        }
    std::vector<TypeStats> out;
    for (std::size_t i = 0; i < kPopulationCount; ++i)
        out.push_back({kPopulations[i], describe(speeds[i]), describe(volumes[i])});
    return out;
}

void write_type_stats_csv(std::ostream& out, const std::vector<TypeStats>& stats)
{
    out << "type,samples,speed_mean,speed_sd,speed_q10,speed_q50,speed_q90,"
           "volume_mean,volume_sd,volume_q10,volume_q50,volume_q90\n";
    for (const auto& s : stats) {
        out << type_key(s.type) << ',' << s.speed.count;
        for (const auto* d : {&s.speed, &s.volume})
            for (double v : {d->mean, d->sd, d->q10, d->q50, d->q90})
                out << ',' << util::format_metric(v);
        out << '\n';
    }
}

}  // namespace cryptsim::metrics
