// JSON network files.
//
//   {
//     "power_base_kva": 100.0,
//     "reference_bus": 0,
//     "slack_limit_kw": 250.0,
//     "buses": [ { "id": 0, "is_reference": true,
//                  "base_generation": 0.0, "base_load": 0.0,
//                  "gen_bounds": [0.0, 0.0], "load_bounds": [0.0, 0.0] }, ... ],
//     "lines": [ { "from_bus": 0, "to_bus": 1, "susceptance": 20.0,
//                  "capacity": 80.0 }, ... ]
//   }
//
// A line may give "reactance" instead of "susceptance" (susceptance = 1/X).
#pragma once

#include "p2p/csv.hpp"
#include "p2p/network.hpp"

#include <json.hpp>

#include <filesystem>

namespace p2p {

Network network_from_json(const nlohmann::json& doc);
nlohmann::json network_to_json(const Network& net);

/// Throws FormatError on unreadable files, malformed JSON or missing fields.
Network load_network(const std::filesystem::path& path);

}  // namespace p2p
