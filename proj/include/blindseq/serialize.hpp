#pragma once

// JSON and CSV encodings shared by the CLI and the HTTP service.

#include <string>

#include <json.hpp>

#include "blindseq/game.hpp"
#include "blindseq/grid.hpp"
#include "blindseq/prob_core.hpp"
#include "blindseq/simulator.hpp"

namespace blindseq {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";

// {kind, n_max, boundaries[][], p[]}
json to_json(const StrategyTable& table, const WinProbTable& probs);
json to_json(const StrategyTable& table);
json to_json(const WinProbTable& probs);
StrategyTable strategy_from_json(const json& doc);

// {n, slots: [value|null], history: [...]}
json to_json(const GameState& state);
GameState game_state_from_json(const json& doc);

// {m, cells: [[value|null]]}
json to_json(const GridState& state);
GridState grid_state_from_json(const json& doc);

json to_json(const SlotRecommendation& rec);
json to_json(const GridRecommendation& rec);
json to_json(const Bin& bin);

// {n, games, wins, win_rate, elimination_histogram: [{turn, count}], total_draws}
json to_json(const SimResult& result);
SimResult sim_result_from_json(const json& doc);
// "turn,count" header plus one row per turn 1..n.
std::string histogram_csv(const SimResult& result);

// Envelope every CLI command prints.
json output_document(const std::string& command, json payload);

// Rounds every floating-point number in the tree to `digits` significant
// digits in place.
void round_floats(json& doc, int digits);
double round_significant(double value, int digits);

} // namespace blindseq
