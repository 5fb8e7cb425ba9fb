#pragma once

#include <string>

#include <json.hpp>

#include "eqidx/game.hpp"

namespace eqidx {

// Game file schema:
//   {"players": N,
//    "strategies": [["t","b"],["l","r"]],
//    "payoffs": {"flat": [...],
//                "order": "player-major, profile row-major (last player's
//                          strategy fastest)"}}
// The flat array round-trips bit-exactly.
nlohmann::json game_to_json(const Game& game);
Game game_from_json(const nlohmann::json& j);
Game load_game_file(const std::string& path);
void save_game_file(const Game& game, const std::string& path);

nlohmann::json profile_to_json(const MixedProfile& profile);
MixedProfile profile_from_json(const nlohmann::json& j);

}  // namespace eqidx
