#include "cryptsim/cell_type.hpp"
#include "cryptsim/error.hpp"
#include "cryptsim/rng.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace cryptsim {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::InvalidState: return "invalid-state";
    case ErrorCode::CapExceeded: return "cap-exceeded";
    case ErrorCode::ResourceLimit: return "resource-limit";
    case ErrorCode::IncompleteAttractorSet: return "incomplete-attractor-set";
    case ErrorCode::NonTreeStructure: return "non-tree-structure";
    case ErrorCode::InternalConsistency: return "internal-consistency";
    case ErrorCode::InvalidProposal: return "invalid-proposal";
    case ErrorCode::TooSmallToDivide: return "too-small-to-divide";
    case ErrorCode::MissingCell: return "missing-cell";
    case ErrorCode::IncompatibleLineage: return "incompatible-lineage";
    case ErrorCode::Inconsistency: return "inconsistency";
    case ErrorCode::EmptyPopulation: return "empty-population";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::UndefinedStatistic: return "undefined-statistic";
    case ErrorCode::Config: return "config";
    case ErrorCode::NoCompatibleNetwork: return "no-compatible-network";
    case ErrorCode::Io: return "io";
    }
    return "unknown";
}

std::uint64_t Rng::below(std::uint64_t n)
{
    if (n == 0)
        throw Error(ErrorCode::InvalidParameter, "Rng::below: empty range");
    // Rejection keeps the result exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

std::uint64_t Rng::poisson(double mean)
{
    if (!(mean >= 0.0))
        throw Error(ErrorCode::InvalidParameter, "Rng::poisson: negative mean");
    std::uint64_t total = 0;
    while (mean > 30.0) {
        total += poisson(30.0);
        mean -= 30.0;
    }
    const double limit = std::exp(-mean);
    double product = uniform();
    while (product > limit) {
        ++total;
        product *= uniform();
    }
    return total;
}

double Rng::normal()
{
    // Box-Muller; the second variate is discarded to keep the stream simple.
    double u1 = uniform();
    while (u1 <= 0.0)
        u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::string_view type_name(CellType t)
{
    switch (t) {
    case CellType::Medium: return "Medium";
    case CellType::Stem: return "Stem";
    case CellType::TA1: return "TA1";
    case CellType::TA2A: return "TA2-A";
    case CellType::TA2B: return "TA2-B";
    case CellType::Paneth: return "Paneth";
    case CellType::Goblet: return "Goblet";
    case CellType::Enterocyte: return "Enterocyte";
    case CellType::Enteroendocrine: return "Enteroendocrine";
    }
    return "?";
}

std::string_view type_key(CellType t)
{
    switch (t) {
    case CellType::Medium: return "medium";
    case CellType::Stem: return "stem";
    case CellType::TA1: return "ta1";
    case CellType::TA2A: return "ta2a";
    case CellType::TA2B: return "ta2b";
    case CellType::Paneth: return "paneth";
    case CellType::Goblet: return "goblet";
    case CellType::Enterocyte: return "enterocyte";
    case CellType::Enteroendocrine: return "enteroendocrine";
    }
    return "?";
}

std::optional<CellType> parse_cell_type(std::string_view text)
{
    std::string lowered;
    for (char c : text)
        if (c != '-' && c != '_')
            lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (std::size_t i = 0; i < kTypeSlots; ++i) {
        const auto t = static_cast<CellType>(i);
        if (lowered == type_key(t))
            return t;
    }
    return std::nullopt;
}

}  // namespace cryptsim
