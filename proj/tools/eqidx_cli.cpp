// Command-line front end: parse game files, run the analysis pipeline, and
// emit human-readable or JSON reports.
//
// Exit codes: 0 success/verified, 1 verification failed, 2 input error,
// 3 enumeration budget exceeded.
#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "eqidx/constructions.hpp"
#include "eqidx/equilibria.hpp"
#include "eqidx/game.hpp"
#include "eqidx/index.hpp"
#include "eqidx/json_io.hpp"
#include "eqidx/running_example.hpp"
#include "eqidx/triangulation.hpp"

namespace {

constexpr const char* kVersion = "eqidx 1.0.0";

struct CommonFlags {
  double tol = 1e-9;
  double delta = 1e-4;
  std::uint64_t seed = 0;
  std::size_t max_support = 1000000;
  bool json = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--tol", f.tol, "numeric tolerance")->envname("EQIDX_TOL");
  cmd->add_option("--delta", f.delta, "perturbation magnitude")
      ->envname("EQIDX_DELTA");
  cmd->add_option("--seed", f.seed, "random seed")->envname("EQIDX_SEED");
  cmd->add_option("--max-support", f.max_support,
                  "support-combination budget")
      ->envname("EQIDX_MAX_SUPPORT");
  cmd->add_flag("--json", f.json, "emit a JSON report")->envname("EQIDX_JSON");
}

eqidx::IndexOptions make_options(const CommonFlags& f) {
  eqidx::IndexOptions opts;
  opts.delta = f.delta;
  opts.seed = f.seed;
  opts.enumerate.tol = f.tol;
  opts.enumerate.seed = f.seed;
  opts.enumerate.max_support_combinations = f.max_support;
  return opts;
}

// FNV-1a over the canonical serialized game, for report identification.
std::string game_hash(const eqidx::Game& game) {
  std::string s = eqidx::game_to_json(game).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::string format_mixture(const std::vector<double>& probs) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (i) out << ", ";
    out << std::setprecision(6) << probs[i];
  }
  out << ")";
  return out.str();
}

// Aligned payoff tables for one- and two-player games, flat list otherwise.
void print_payoffs(const eqidx::Game& game) {
  const auto& labels = game.strategy_labels();
  if (game.num_players() <= 2) {
    int rows = game.num_strategies(0);
    int cols = game.num_players() == 2 ? game.num_strategies(1) : 1;
    std::vector<std::vector<std::string>> cells(rows + 1,
                                                std::vector<std::string>(cols + 1));
    for (int j = 0; j < cols; ++j) {
      cells[0][j + 1] = game.num_players() == 2 ? labels[1][j] : "";
    }
    for (int i = 0; i < rows; ++i) {
      cells[i + 1][0] = labels[0][i];
      for (int j = 0; j < cols; ++j) {
        std::vector<int> prof{i};
        if (game.num_players() == 2) prof.push_back(j);
        std::ostringstream cell;
        cell << std::setprecision(6) << game.payoff(0, prof);
        if (game.num_players() == 2) {
          cell << "," << std::setprecision(6) << game.payoff(1, prof);
        }
        cells[i + 1][j + 1] = cell.str();
      }
    }
    std::vector<std::size_t> width(cols + 1, 0);
    for (const auto& row : cells) {
      for (int j = 0; j <= cols; ++j) width[j] = std::max(width[j], row[j].size());
    }
    for (const auto& row : cells) {
      std::cout << "  ";
      for (int j = 0; j <= cols; ++j) {
        std::cout << std::setw((int)width[j] + 2) << row[j];
      }
      std::cout << "\n";
    }
    return;
  }
  std::cout << "  payoffs (flat, player-major): ";
  for (double v : game.flat_payoffs()) std::cout << v << " ";
  std::cout << "\n";
}

nlohmann::json report_to_json(const eqidx::IndexReport& r) {
  nlohmann::json j;
  j["profile"] = eqidx::profile_to_json(r.equilibrium.profile);
  j["support"] = r.equilibrium.support;
  j["index"] = r.index;
  j["is_regular"] = r.is_regular;
  j["is_isolated"] = r.equilibrium.is_isolated;
  j["is_sustainable"] = r.is_sustainable;
  j["max_residual"] = r.equilibrium.max_residual;
  switch (r.method) {
    case eqidx::IndexMethod::kIndifferenceJacobian:
      j["method"] = "indifference-jacobian";
      break;
    case eqidx::IndexMethod::kPerturbationDegree:
      j["method"] = "perturbation-degree";
      break;
    case eqidx::IndexMethod::kLocalDegreeOracle:
      j["method"] = "local-degree-oracle";
      break;
  }
  return j;
}

nlohmann::json component_to_json(const eqidx::ComponentRecord& c) {
  nlohmann::json j;
  j["index"] = c.index;
  j["bounding_radius"] = c.bounding_radius;
  j["members"] = nlohmann::json::array();
  for (const auto& m : c.members) j["members"].push_back(eqidx::profile_to_json(m));
  return j;
}

int cmd_analyze(const std::string& path, const CommonFlags& flags) {
  eqidx::Game game = eqidx::load_game_file(path);
  eqidx::ClassifyResult result = eqidx::classify(game, make_options(flags));

  if (flags.json) {
    nlohmann::json j;
    j["tool"] = kVersion;
    j["game"] = std::filesystem::path(path).stem().string();
    j["hash"] = game_hash(game);
    j["seed"] = flags.seed;
    j["equilibria"] = nlohmann::json::array();
    for (const auto& r : result.reports) j["equilibria"].push_back(report_to_json(r));
    j["components"] = nlohmann::json::array();
    for (const auto& c : result.components) j["components"].push_back(component_to_json(c));
    j["phi_star"] = nlohmann::json::array();
    for (const auto& r : result.solution.phi_star) {
      j["phi_star"].push_back(report_to_json(r));
    }
    j["phi_plus"] = nlohmann::json::array();
    for (const auto& c : result.solution.phi_plus) {
      j["phi_plus"].push_back(component_to_json(c));
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::cout << "game: " << std::filesystem::path(path).stem().string() << "  ("
            << game.num_players() << " players, hash " << game_hash(game)
            << ")\n";
  print_payoffs(game);
  std::cout << "equilibria: " << result.reports.size() << "\n";
  for (const auto& r : result.reports) {
    std::cout << "  index " << std::showpos << r.index << std::noshowpos
              << (r.is_regular ? "  regular " : "         ")
              << (r.is_sustainable ? " sustainable " : "             ");
    for (int n = 0; n < game.num_players(); ++n) {
      std::cout << " " << format_mixture(r.equilibrium.profile.probs[n]);
    }
    std::cout << "\n";
  }
  std::cout << "components: " << result.components.size() << "\n";
  for (const auto& c : result.components) {
    std::cout << "  index " << std::showpos << c.index << std::noshowpos
              << "  members " << c.members.size() << "  radius "
              << c.bounding_radius << "\n";
  }
  std::cout << "phi_star: " << result.solution.phi_star.size()
            << "  phi_plus: " << result.solution.phi_plus.size() << "\n";
  return 0;
}

// Pure-profile spec like "(t,l)" or "t,l": one strategy label per player.
std::vector<int> parse_pure_spec(const eqidx::Game& game,
                                 const std::string& spec) {
  std::string s = spec;
  std::erase_if(s, [](char c) { return c == '(' || c == ')' || c == ' '; });
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) parts.push_back(tok);
  if ((int)parts.size() != game.num_players()) {
    throw std::invalid_argument("profile spec needs one label per player");
  }
  std::vector<int> out;
  for (int n = 0; n < game.num_players(); ++n) {
    int idx = game.strategy_index(n, parts[n]);
    if (idx < 0) throw std::invalid_argument("unknown strategy: " + parts[n]);
    out.push_back(idx);
  }
  return out;
}

int cmd_verify_unique(const std::string& path, const std::string& spec,
                      const CommonFlags& flags) {
  eqidx::Game game = eqidx::load_game_file(path);
  std::vector<int> pure = parse_pure_spec(game, spec);
  eqidx::EnumerateOptions opts;
  opts.tol = flags.tol;
  opts.seed = flags.seed;
  opts.max_support_combinations = flags.max_support;
  bool ok =
      eqidx::verify_unique(game, eqidx::MixedProfile::pure(game, pure), opts);
  if (flags.json) {
    nlohmann::json j;
    j["tool"] = kVersion;
    j["game"] = std::filesystem::path(path).stem().string();
    j["profile"] = spec;
    j["unique"] = ok;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "unique: " << (ok ? "true" : "false") << "\n";
  }
  return ok ? 0 : 1;
}

int cmd_embed_strict(const std::string& path, const std::string& spec,
                     const CommonFlags& flags) {
  eqidx::Game game = eqidx::load_game_file(path);
  std::vector<int> pure = parse_pure_spec(game, spec);
  eqidx::EmbeddingReport report =
      eqidx::embed_strict_dominators(game, pure, flags.tol);
  bool ok = report.unique_verified && report.equivalence_verified;
  if (flags.json) {
    nlohmann::json j;
    j["tool"] = kVersion;
    j["game"] = std::filesystem::path(path).stem().string();
    j["embedded"] = eqidx::game_to_json(report.embedded);
    j["added_labels"] = report.added_labels;
    j["lifted_equilibrium"] = eqidx::profile_to_json(report.lifted_equilibrium);
    j["unique_verified"] = report.unique_verified;
    j["equivalence_verified"] = report.equivalence_verified;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "embedded game: ";
    for (int n = 0; n < report.embedded.num_players(); ++n) {
      std::cout << (n ? "x" : "") << report.embedded.num_strategies(n);
    }
    std::cout << " strategies\n";
    print_payoffs(report.embedded);
    std::cout << "unique_verified: "
              << (report.unique_verified ? "true" : "false") << "\n";
    std::cout << "equivalence_verified: "
              << (report.equivalence_verified ? "true" : "false") << "\n";
  }
  return ok ? 0 : 1;
}

int cmd_running_example(const CommonFlags& flags, double zeta) {
  eqidx::FinalGameOptions opts;
  opts.delta = flags.delta;
  opts.bonus_delta =
      flags.delta > 0 && flags.delta <= 0.25 ? flags.delta : 1e-3;
  opts.zeta = zeta;
  opts.seed = flags.seed;

  double fixed[3] = {0.0, 0.5, 1.0};
  bool perturbed = eqidx::verify_perturbed_unique(opts.bonus_delta);
  eqidx::FinalGame fg = eqidx::build_final_game(opts);
  std::vector<eqidx::MixedProfile> eqs =
      eqidx::enumerate_admissible_equilibria(fg);
  bool symmetric_ok = eqidx::verify_final_symmetric_unique(fg);
  bool unique = eqidx::verify_final_unique(fg);

  if (flags.json) {
    nlohmann::json j;
    j["tool"] = kVersion;
    j["delta"] = opts.delta;
    j["zeta"] = opts.zeta;
    j["seed"] = flags.seed;
    j["fixed_points"] = {fixed[0], fixed[1], fixed[2]};
    j["perturbed_unique"] = perturbed;
    j["vertices"] = fg.tri.vertices.size();
    j["simplices"] = fg.tri.simplices.size();
    j["designated"] = {fg.coords[fg.designated][0], fg.coords[fg.designated][1]};
    j["admissible_equilibria"] = eqs.size();
    j["symmetric_unique"] = symmetric_ok;
    j["unique"] = unique;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "symmetric map fixed points: 0, 1/2, 1 (indices +1, -1, +1)\n";
    std::cout << "bonus-perturbed uniqueness at x = 1: "
              << (perturbed ? "true" : "false") << "\n";
    std::cout << "final game: " << fg.tri.vertices.size() << " vertices, "
              << fg.tri.simplices.size() << " simplices, designated vertex ("
              << fg.coords[fg.designated][0] << ", "
              << fg.coords[fg.designated][1] << ")\n";
    std::cout << "admissible equilibria found: " << eqs.size() << "\n";
    std::cout << "symmetric admissible scan unique: "
              << (symmetric_ok ? "true" : "false") << "\n";
    std::cout << "unique: " << (unique ? "true" : "false") << "\n";
  }
  return unique && perturbed && symmetric_ok ? 0 : 1;
}

int cmd_triangulate(const std::string& points_path,
                    const std::vector<double>& box, int axis, double offset,
                    double refine_delta, const CommonFlags& flags) {
  if (!points_path.empty()) {
    nlohmann::json in;
    {
      std::ifstream f(points_path);
      if (!f) throw std::invalid_argument("cannot open " + points_path);
      f >> in;
    }
    auto points = in.at("points").get<std::vector<std::vector<double>>>();
    eqidx::LiftedTriangulation t = eqidx::delaunay_lift(points, flags.seed);
    std::cout << eqidx::triangulation_to_json(t.tri, &t.witness).dump(2) << "\n";
    return 0;
  }
  if (box.size() < 4 || box.size() % 2 != 0) {
    throw std::invalid_argument("--box wants lo.. hi.. (4 or 6 numbers)");
  }
  int d = (int)box.size() / 2;
  eqidx::Box b;
  b.lo.assign(box.begin(), box.begin() + d);
  b.hi.assign(box.begin() + d, box.end());
  eqidx::RefinedTriangulation r =
      eqidx::refine_near_face(b, axis, offset, refine_delta, flags.seed);
  nlohmann::json j = eqidx::triangulation_to_json(r.tri, &r.witness);
  j["cut_normal"] = r.cut_normal;
  j["cut_offset"] = r.cut_offset;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash equilibrium enumeration, fixed-point indices, and "
               "sustainability classification for finite games"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonFlags flags;

  std::string analyze_path;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "enumerate equilibria, compute indices, classify");
  analyze->add_option("game", analyze_path, "game JSON file")->required();
  add_common(analyze, flags);

  std::string embed_path, embed_spec;
  CLI::App* embed = app.add_subcommand(
      "embed-strict", "embed a strict pure equilibrium as unique");
  embed->add_option("game", embed_path, "game JSON file")->required();
  embed->add_option("profile", embed_spec, "pure profile, e.g. \"(t,l)\"")
      ->required();
  add_common(embed, flags);

  std::string verify_path, verify_spec;
  CLI::App* verify = app.add_subcommand(
      "verify-unique", "check a profile is the game's unique equilibrium");
  verify->add_option("game", verify_path, "game JSON file")->required();
  verify->add_option("profile", verify_spec, "pure profile, e.g. \"(t,l)\"")
      ->required();
  add_common(verify, flags);

  double zeta = 0.15;
  CLI::App* running = app.add_subcommand(
      "running-example",
      "trace the unique-equilibrium construction over the triangulated square");
  running->add_option("--zeta", zeta, "diameter bound at the theta = 1 face");
  add_common(running, flags);

  std::string tri_points;
  std::vector<double> tri_box;
  int tri_axis = 1;
  double tri_offset = 0.75, tri_delta = 0.2;
  CLI::App* tri = app.add_subcommand(
      "triangulate", "Delaunay-triangulate points or refine a box near a face");
  tri->add_option("--points", tri_points, "JSON file with a \"points\" array");
  tri->add_option("--box", tri_box, "box as lo.. hi.. (4 or 6 numbers)");
  tri->add_option("--axis", tri_axis, "refinement axis");
  tri->add_option("--offset", tri_offset, "cut-plane offset");
  tri->add_option("--refine-delta", tri_delta, "target simplex diameter");
  add_common(tri, flags);

  try {
    app.parse(argc, argv);
    // The construction's own default penalty coefficient is 1e-3.
    if (*running && running->count("--delta") == 0) flags.delta = 1e-3;
    if (*analyze) return cmd_analyze(analyze_path, flags);
    if (*embed) return cmd_embed_strict(embed_path, embed_spec, flags);
    if (*verify) return cmd_verify_unique(verify_path, verify_spec, flags);
    if (*running) return cmd_running_example(flags, zeta);
    if (*tri) return cmd_triangulate(tri_points, tri_box, tri_axis, tri_offset,
                                     tri_delta, flags);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const eqidx::BudgetExceededError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
