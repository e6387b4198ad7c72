#pragma once

#include "gen3lite/dh_kinematics.hpp"

#include <json.hpp>

#include <filesystem>

namespace gen3lite {

/// Reads a chain from {"a": [6], "b": [6], "alpha": [6], "lower_deg": [6],
/// "upper_deg": [6]} with optional "offset_deg": [6] (default zeros) and
/// "base": [3]. Lengths in metres, alpha in radians.
/// Throws std::invalid_argument on missing keys, wrong lengths or an invalid chain.
DhChaind chain_from_json(const nlohmann::json& doc);

nlohmann::json chain_to_json(const DhChaind& chain);

DhChaind load_chain(const std::filesystem::path& path);

}  // namespace gen3lite
