#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cryptsim::nrbn {

using NodeIndex = std::uint32_t;

/// Gene activation pattern: one bit per node, packed into 64-bit words.
/// Ordering is lexicographic over (bit 0, bit 1, ...), 0 before 1.
class NetworkState {
public:
    NetworkState() = default;
    explicit NetworkState(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    /// Bit i of code becomes node i. Only valid for size <= 64.
    static NetworkState from_code(std::size_t size, std::uint64_t code);
    static NetworkState from_bits(const std::vector<int>& bits);

    std::size_t size() const { return size_; }
    bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
    void set(std::size_t i, bool value);
    void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

    /// Packed value; requires size <= 64.
    std::uint64_t code() const;

    /// Bits as a '0'/'1' string, node 0 first.
    std::string to_string() const;

    std::size_t hash() const;

    friend bool operator==(const NetworkState&, const NetworkState&) = default;
    friend bool operator<(const NetworkState& a, const NetworkState& b);

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

struct NetworkStateHash {
    std::size_t operator()(const NetworkState& s) const { return s.hash(); }
};

/// Lexicographic order of two packed codes (bit 0 most significant for ordering).
inline bool lex_less(std::uint64_t a, std::uint64_t b)
{
    const std::uint64_t diff = a ^ b;
    if (diff == 0)
        return false;
    return (a & (diff & (~diff + 1))) == 0;
}

/// Synchronous Boolean network. Truth table entry j of node i is its output
/// when its inputs read j = sum_m value(inputs[i][m]) << m.
class BooleanNetwork {
public:
    BooleanNetwork() = default;

    /// Validates wiring and table sizes; throws invalid-parameter otherwise.
    BooleanNetwork(std::vector<std::vector<NodeIndex>> inputs,
                   std::vector<std::vector<bool>> truth_tables,
                   std::vector<std::optional<bool>> clamps = {});

    std::size_t node_count() const { return inputs_.size(); }
    const std::vector<NodeIndex>& inputs(std::size_t node) const { return inputs_[node]; }
    const std::vector<bool>& truth_table(std::size_t node) const { return tables_[node]; }
    std::optional<bool> clamp(std::size_t node) const { return clamps_[node]; }

    /// Output of one node given the full current state.
    bool evaluate(std::size_t node, const NetworkState& s) const;
    /// Same, on a packed state (node_count <= 64).
    bool evaluate_code(std::size_t node, std::uint64_t code) const;

    friend bool operator==(const BooleanNetwork&, const BooleanNetwork&) = default;

private:
    std::vector<std::vector<NodeIndex>> inputs_;
    std::vector<std::vector<bool>> tables_;
    std::vector<std::optional<bool>> clamps_;
};

BooleanNetwork generate_random_network(std::size_t node_count, std::size_t in_degree,
                                       double bias, std::uint64_t seed);

NetworkState synchronous_step(const BooleanNetwork& net, const NetworkState& s);

/// Packed successor for node_count <= 64.
std::uint64_t synchronous_step_code(const BooleanNetwork& net, std::uint64_t code);

/// Copy of net with node clamped to value.
BooleanNetwork apply_knockout(const BooleanNetwork& net, std::size_t node, bool value);

}  // namespace cryptsim::nrbn
