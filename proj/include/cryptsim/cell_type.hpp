#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cryptsim {

enum class CellType : std::uint8_t {
    Medium = 0,
    Stem,
    TA1,
    TA2A,
    TA2B,
    Paneth,
    Goblet,
    Enterocyte,
    Enteroendocrine,
};

inline constexpr std::size_t kTypeSlots = 9;  // 8 cell populations + Medium
inline constexpr std::size_t kPopulationCount = 8;

inline constexpr std::array<CellType, kPopulationCount> kPopulations = {
    CellType::Stem,   CellType::TA1,    CellType::TA2A,       CellType::TA2B,
    CellType::Paneth, CellType::Goblet, CellType::Enterocyte, CellType::Enteroendocrine,
};

constexpr std::size_t slot(CellType t) { return static_cast<std::size_t>(t); }

/// Index into an 8-vector of populations; Medium has none.
constexpr std::size_t population_index(CellType t) { return slot(t) - 1; }

/// Display name, e.g. "TA2-A".
std::string_view type_name(CellType t);

/// Lower-case key used in config files and CSV headers, e.g. "ta2a".
std::string_view type_key(CellType t);

/// Accepts display names and keys, case-insensitively.
std::optional<CellType> parse_cell_type(std::string_view text);

}  // namespace cryptsim
