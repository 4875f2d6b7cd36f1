#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "devproof/world.hpp"

namespace devproof::scenario {

/// Parses a JSON scenario. Relative firmware paths resolve against `base`.
/// Throws ConfigError naming the first offending field.
world::WorldConfig parse(std::string_view json_text, const std::filesystem::path& base,
                         std::optional<std::uint64_t> seed_override = std::nullopt);

world::WorldConfig load(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

} // namespace devproof::scenario
