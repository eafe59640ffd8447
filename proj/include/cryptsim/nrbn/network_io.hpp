#pragma once

#include "cryptsim/nrbn/attractor.hpp"
#include "cryptsim/nrbn/network.hpp"

#include <iosfwd>
#include <string>

namespace cryptsim::nrbn {

/// One line per node:
///   node <i>: inputs=<j1,j2,...> table=<bitstring of length 2^k> clamp=<0|1|none>
void write_network(std::ostream& out, const BooleanNetwork& net);
std::string format_network(const BooleanNetwork& net);

/// Inverse of write_network. Blank lines and '#' comments are ignored; nodes
/// must appear in order 0..n-1. Errors carry the offending line number.
BooleanNetwork parse_network(std::istream& in);
BooleanNetwork parse_network(const std::string& text);
BooleanNetwork load_network(const std::string& path);

/// "A<k> period=<p> states=<s1>|<s2>|..." per attractor.
void write_attractors(std::ostream& out, const AttractorSet& set);

}  // namespace cryptsim::nrbn
