#include "eqidx/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace eqidx {

using nlohmann::json;

static constexpr const char* kOrder =
    "player-major, profile row-major (last player's strategy fastest)";

json game_to_json(const Game& game) {
  json j;
  j["players"] = game.num_players();
  j["strategies"] = game.strategy_labels();
  j["payoffs"]["flat"] = game.flat_payoffs();
  j["payoffs"]["order"] = kOrder;
  return j;
}

Game game_from_json(const json& j) {
  if (!j.contains("players") || !j.contains("strategies") ||
      !j.contains("payoffs")) {
    throw std::invalid_argument(
        "game json needs 'players', 'strategies' and 'payoffs' fields");
  }
  auto labels = j.at("strategies").get<std::vector<std::vector<std::string>>>();
  if (j.at("players").get<int>() != static_cast<int>(labels.size())) {
    throw std::invalid_argument(
        "'players' disagrees with the number of strategy lists");
  }
  auto flat = j.at("payoffs").at("flat").get<std::vector<double>>();
  return Game(std::move(labels), std::move(flat));
}

Game load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open game file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("parse error in " + path + ": " + e.what());
  }
  return game_from_json(j);
}

void save_game_file(const Game& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write game file: " + path);
  out << game_to_json(game).dump(2) << "\n";
}

json profile_to_json(const MixedProfile& profile) {
  return json(profile.probs);
}

MixedProfile profile_from_json(const json& j) {
  MixedProfile p;
  p.probs = j.get<std::vector<std::vector<double>>>();
  return p;
}

}  // namespace eqidx
