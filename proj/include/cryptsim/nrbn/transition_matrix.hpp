#pragma once

#include "cryptsim/nrbn/attractor.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cryptsim::nrbn {

/// Row-stochastic matrix of noise-induced transitions among attractors.
/// Entry (i, j) = counts(i, j) / trials(i), where trials(i) = period * node_count.
class AttractorTransitionMatrix {
public:
    AttractorTransitionMatrix() = default;

    /// From raw perturbation counts; every row needs a positive total.
    explicit AttractorTransitionMatrix(std::vector<std::vector<std::uint64_t>> counts);

    /// From explicit weights (synthetic matrices). Rows must be non-negative and sum to 1.
    static AttractorTransitionMatrix from_weights(std::vector<std::vector<double>> weights);

    std::size_t size() const { return weights_.size(); }
    double weight(std::size_t from, std::size_t to) const { return weights_[from][to]; }
    const std::vector<double>& row(std::size_t from) const { return weights_[from]; }

    /// Perturbation counts behind each entry; empty for synthetic matrices.
    const std::vector<std::vector<std::uint64_t>>& counts() const { return counts_; }
    std::uint64_t trials(std::size_t from) const { return trials_.empty() ? 0 : trials_[from]; }

    double max_off_diagonal() const;

    /// Flagged when the attractor set was sampled rather than enumerated.
    bool from_sampled_set = false;

    friend bool operator==(const AttractorTransitionMatrix& a, const AttractorTransitionMatrix& b)
    {
        return a.weights_ == b.weights_ && a.counts_ == b.counts_;
    }

private:
    std::vector<std::vector<double>> weights_;
    std::vector<std::vector<std::uint64_t>> counts_;
    std::vector<std::uint64_t> trials_;
};

/// Flips every bit of every state of every attractor, relaxes, and tallies
/// the destination attractor.
AttractorTransitionMatrix compute_atm(const BooleanNetwork& net, const AttractorSet& attractors,
                                      std::size_t step_cap);

/// CSV: header "from,A1,A2,...", one row per source attractor.
void write_atm_csv(std::ostream& out, const AttractorTransitionMatrix& atm);

}  // namespace cryptsim::nrbn
