#include "cryptsim/nrbn/network.hpp"

#include "cryptsim/error.hpp"
#include "cryptsim/rng.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cryptsim::nrbn {

NetworkState NetworkState::from_code(std::size_t size, std::uint64_t code)
{
    if (size > 64)
        throw Error(ErrorCode::InvalidState, "packed state codes need at most 64 nodes");
    NetworkState s(size);
    if (size > 0)
        s.words_[0] = size == 64 ? code : (code & ((std::uint64_t{1} << size) - 1));
    return s;
}

NetworkState NetworkState::from_bits(const std::vector<int>& bits)
{
    NetworkState s(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        s.set(i, bits[i] != 0);
    return s;
}

void NetworkState::set(std::size_t i, bool value)
{
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (value)
        words_[i / 64] |= mask;
    else
        words_[i / 64] &= ~mask;
}

std::uint64_t NetworkState::code() const
{
    if (size_ > 64)
        throw Error(ErrorCode::InvalidState, "packed state codes need at most 64 nodes");
    return words_.empty() ? 0 : words_[0];
}

std::string NetworkState::to_string() const
{
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
        if (get(i))
            out[i] = '1';
    return out;
}

std::size_t NetworkState::hash() const
{
    std::uint64_t h = 1469598103934665603ull ^ size_;
    for (std::uint64_t w : words_) {
        h ^= w;
        h *= 1099511628211ull;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

bool operator<(const NetworkState& a, const NetworkState& b)
{
    if (a.size_ != b.size_)
        return a.size_ < b.size_;
    for (std::size_t w = 0; w < a.words_.size(); ++w)
        if (a.words_[w] != b.words_[w])
            return lex_less(a.words_[w], b.words_[w]);
    return false;
}

BooleanNetwork::BooleanNetwork(std::vector<std::vector<NodeIndex>> inputs,
                               std::vector<std::vector<bool>> truth_tables,
                               std::vector<std::optional<bool>> clamps)
    : inputs_(std::move(inputs)), tables_(std::move(truth_tables)), clamps_(std::move(clamps))
{
    const std::size_t n = inputs_.size();
    if (n == 0)
        throw Error(ErrorCode::InvalidParameter, "network needs at least one node");
    if (tables_.size() != n)
        throw Error(ErrorCode::InvalidParameter, "one truth table per node required");
    if (clamps_.empty())
        clamps_.assign(n, std::nullopt);
    if (clamps_.size() != n)
        throw Error(ErrorCode::InvalidParameter, "one clamp entry per node required");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& in = inputs_[i];
        if (in.size() >= 32)
            throw Error(ErrorCode::InvalidParameter, "node " + std::to_string(i) + ": in-degree too large");
        for (std::size_t m = 0; m < in.size(); ++m) {
            if (in[m] >= n)
                throw Error(ErrorCode::InvalidParameter,
                            "node " + std::to_string(i) + ": input " + std::to_string(in[m]) + " out of range");
            for (std::size_t p = 0; p < m; ++p)
                if (in[p] == in[m])
                    throw Error(ErrorCode::InvalidParameter,
                                "node " + std::to_string(i) + ": duplicate input " + std::to_string(in[m]));
        }
        if (tables_[i].size() != (std::size_t{1} << in.size()))
            throw Error(ErrorCode::InvalidParameter,
                        "node " + std::to_string(i) + ": truth table must have 2^k entries");
    }
}

bool BooleanNetwork::evaluate(std::size_t node, const NetworkState& s) const
{
    if (clamps_[node])
        return *clamps_[node];
    const auto& in = inputs_[node];
    std::size_t index = 0;
    for (std::size_t m = 0; m < in.size(); ++m)
        index |= static_cast<std::size_t>(s.get(in[m])) << m;
    return tables_[node][index];
}

bool BooleanNetwork::evaluate_code(std::size_t node, std::uint64_t code) const
{
    if (clamps_[node])
        return *clamps_[node];
    const auto& in = inputs_[node];
    std::size_t index = 0;
    for (std::size_t m = 0; m < in.size(); ++m)
        index |= static_cast<std::size_t>((code >> in[m]) & 1u) << m;
    return tables_[node][index];
}

BooleanNetwork generate_random_network(std::size_t node_count, std::size_t in_degree,
                                       double bias, std::uint64_t seed)
{
    if (node_count == 0 || in_degree == 0)
        throw Error(ErrorCode::InvalidParameter, "node_count and in_degree must be positive");
    if (in_degree >= node_count)
        throw Error(ErrorCode::InvalidParameter, "in_degree must be smaller than node_count");
    if (!(bias >= 0.0 && bias <= 1.0))
        throw Error(ErrorCode::InvalidParameter, "bias must lie in [0, 1]");

    Rng rng(seed);
    std::vector<std::vector<NodeIndex>> inputs(node_count);
    std::vector<std::vector<bool>> tables(node_count);
    std::vector<NodeIndex> pool(node_count - 1);
    for (std::size_t i = 0; i < node_count; ++i) {
        // Candidates are every node except i; partial Fisher-Yates picks k distinct.
        std::iota(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(i), NodeIndex{0});
        std::iota(pool.begin() + static_cast<std::ptrdiff_t>(i), pool.end(), static_cast<NodeIndex>(i + 1));
        for (std::size_t m = 0; m < in_degree; ++m) {
            const std::size_t j = m + rng.below(pool.size() - m);
            std::swap(pool[m], pool[j]);
        }
        inputs[i].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(in_degree));
        tables[i].resize(std::size_t{1} << in_degree);
        for (std::size_t e = 0; e < tables[i].size(); ++e)
            tables[i][e] = rng.bernoulli(bias);
    }
    return BooleanNetwork(std::move(inputs), std::move(tables));
}

NetworkState synchronous_step(const BooleanNetwork& net, const NetworkState& s)
{
    if (s.size() != net.node_count())
        throw Error(ErrorCode::InvalidState, "state length " + std::to_string(s.size()) +
                                                 " does not match network size " +
                                                 std::to_string(net.node_count()));
    NetworkState next(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        next.set(i, net.evaluate(i, s));
    return next;
}

std::uint64_t synchronous_step_code(const BooleanNetwork& net, std::uint64_t code)
{
    std::uint64_t next = 0;
    for (std::size_t i = 0; i < net.node_count(); ++i)
        next |= static_cast<std::uint64_t>(net.evaluate_code(i, code)) << i;
    return next;
}

BooleanNetwork apply_knockout(const BooleanNetwork& net, std::size_t node, bool value)
{
    if (node >= net.node_count())
        throw Error(ErrorCode::InvalidParameter, "knockout node " + std::to_string(node) +
                                                     " out of range for " +
                                                     std::to_string(net.node_count()) + " nodes");
    std::vector<std::vector<NodeIndex>> inputs;
    std::vector<std::vector<bool>> tables;
    std::vector<std::optional<bool>> clamps;
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        inputs.push_back(net.inputs(i));
        tables.push_back(net.truth_table(i));
        clamps.push_back(net.clamp(i));
    }
    clamps[node] = value;
    return BooleanNetwork(std::move(inputs), std::move(tables), std::move(clamps));
}

}  // namespace cryptsim::nrbn
