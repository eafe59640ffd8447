#include "cryptsim/nrbn/transition_matrix.hpp"

#include "cryptsim/error.hpp"
#include "cryptsim/util/format.hpp"

#include <cmath>
#include <ostream>

namespace cryptsim::nrbn {

AttractorTransitionMatrix::AttractorTransitionMatrix(std::vector<std::vector<std::uint64_t>> counts)
    : counts_(std::move(counts))
{
    const std::size_t n = counts_.size();
    weights_.assign(n, std::vector<double>(n, 0.0));
    trials_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (counts_[i].size() != n)
            throw Error(ErrorCode::InvalidParameter, "transition counts must be square");
        for (std::uint64_t c : counts_[i])
            trials_[i] += c;
        if (trials_[i] == 0)
            throw Error(ErrorCode::InvalidParameter, "row " + std::to_string(i) + " has no perturbations");
        for (std::size_t j = 0; j < n; ++j)
            weights_[i][j] = static_cast<double>(counts_[i][j]) / static_cast<double>(trials_[i]);
    }
}

AttractorTransitionMatrix AttractorTransitionMatrix::from_weights(std::vector<std::vector<double>> weights)
{
    const std::size_t n = weights.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i].size() != n)
            throw Error(ErrorCode::InvalidParameter, "transition matrix must be square");
        double sum = 0.0;
        for (double w : weights[i]) {
            if (!(w >= 0.0 && w <= 1.0))
                throw Error(ErrorCode::InvalidParameter, "transition weights must lie in [0, 1]");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw Error(ErrorCode::InvalidParameter, "row " + std::to_string(i) + " does not sum to 1");
    }
    AttractorTransitionMatrix atm;
    atm.weights_ = std::move(weights);
    return atm;
}

double AttractorTransitionMatrix::max_off_diagonal() const
{
    double best = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = 0; j < size(); ++j)
            if (i != j)
                best = std::max(best, weights_[i][j]);
    return best;
}

AttractorTransitionMatrix compute_atm(const BooleanNetwork& net, const AttractorSet& attractors,
                                      std::size_t step_cap)
{
    const std::size_t n = attractors.size();
    if (n == 0)
        throw Error(ErrorCode::InvalidParameter, "no attractors supplied");
    std::vector<std::vector<std::uint64_t>> counts(n, std::vector<std::uint64_t>(n, 0));
    for (const Attractor& a : attractors.attractors) {
        for (const NetworkState& state : a.cycle) {
            for (std::size_t bit = 0; bit < net.node_count(); ++bit) {
                NetworkState perturbed = state;
                perturbed.flip(bit);
                const Attractor landing = find_attractor(net, perturbed, step_cap);
                const auto dest = attractors.find(landing.first());
                if (!dest)
                    throw Error(ErrorCode::IncompleteAttractorSet,
                                "perturbing " + a.name() + " at node " + std::to_string(bit) +
                                    " reached an attractor outside the supplied set (first state " +
                                    landing.first().to_string() + ")");
                ++counts[a.id][*dest];
            }
        }
    }
    AttractorTransitionMatrix atm(std::move(counts));
    atm.from_sampled_set = !attractors.exhaustive;
    return atm;
}

void write_atm_csv(std::ostream& out, const AttractorTransitionMatrix& atm)
{
    out << "from";
    for (std::size_t j = 0; j < atm.size(); ++j)
        out << ",A" << j + 1;
    out << '\n';
    for (std::size_t i = 0; i < atm.size(); ++i) {
        out << 'A' << i + 1;
        for (std::size_t j = 0; j < atm.size(); ++j)
            out << ',' << util::format_double(atm.weight(i, j));
        out << '\n';
    }
}

}  // namespace cryptsim::nrbn
