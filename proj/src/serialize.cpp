#include "blindseq/serialize.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace blindseq {

json to_json(const StrategyTable& table) {
  return json{{"kind", to_string(table.kind())}, {"n_max", table.n_max()}, {"boundaries", table.rows()}};
}

json to_json(const WinProbTable& probs) {
  json p = json::array();
  for (double v : probs.values()) p.push_back(v);
  return json{{"kind", to_string(probs.kind())}, {"n_max", probs.n_max()}, {"p", std::move(p)}};
}

json to_json(const StrategyTable& table, const WinProbTable& probs) {
  json doc = to_json(table);
  doc["p"] = to_json(probs)["p"];
  return doc;
}

StrategyTable strategy_from_json(const json& doc) {
  try {
    const auto kind = parse_strategy_kind(doc.value("kind", std::string("custom")));
    auto rows = doc.at("boundaries").get<std::vector<std::vector<double>>>();
    if (doc.contains("n_max") && doc.at("n_max").get<int>() != static_cast<int>(rows.size()))
      throw std::invalid_argument("n_max does not match the number of boundary rows");
    return StrategyTable(kind, std::move(rows));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed strategy document: ") + e.what());
  }
}

json to_json(const GameState& state) {
  json slots = json::array();
  for (const auto& s : state.slots()) slots.push_back(s ? json(*s) : json(nullptr));
  return json{{"n", state.n()}, {"slots", std::move(slots)}, {"history", state.history()}};
}

GameState game_state_from_json(const json& doc) {
  try {
    const int n = doc.at("n").get<int>();
    std::vector<std::optional<double>> slots;
    for (const auto& s : doc.at("slots")) {
      if (s.is_null())
        slots.emplace_back(std::nullopt);
      else
        slots.emplace_back(s.get<double>());
    }
    auto history = doc.value("history", std::vector<double>{});
    return GameState(n, std::move(slots), std::move(history));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed game state: ") + e.what());
  }
}

json to_json(const GridState& state) {
  json rows = json::array();
  for (int i = 1; i <= state.m(); ++i) {
    json row = json::array();
    for (int j = 1; j <= state.m(); ++j) {
      const auto& v = state.at({i, j});
      row.push_back(v ? json(*v) : json(nullptr));
    }
    rows.push_back(std::move(row));
  }
  return json{{"m", state.m()}, {"cells", std::move(rows)}};
}

GridState grid_state_from_json(const json& doc) {
  try {
    const int m = doc.at("m").get<int>();
    const auto& rows = doc.at("cells");
    if (!rows.is_array() || static_cast<int>(rows.size()) != m) throw std::invalid_argument("grid needs m rows");
    std::vector<std::optional<double>> cells;
    for (const auto& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != m) throw std::invalid_argument("grid needs m columns");
      for (const auto& v : row) {
        if (v.is_null())
          cells.emplace_back(std::nullopt);
        else
          cells.emplace_back(v.get<double>());
      }
    }
    return GridState(m, std::move(cells));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed grid state: ") + e.what());
  }
}

json to_json(const SlotRecommendation& rec) {
  return json{{"slot", rec.slot}, {"rank", rec.rank}, {"correct_so_far", rec.correct_so_far}, {"win_prob", rec.win_prob}};
}

json to_json(const GridRecommendation& rec) {
  return json{{"row", rec.cell.row}, {"col", rec.cell.col}, {"rank", rec.rank}, {"probability", rec.probability}};
}

json to_json(const Bin& bin) {
  return json{{"first_slot", bin.first_slot}, {"size", bin.size}, {"lower", bin.lower}, {"upper", bin.upper}};
}

json to_json(const SimResult& result) {
  json hist = json::array();
  for (std::size_t k = 1; k < result.elimination_histogram.size(); ++k)
    hist.push_back({{"turn", k}, {"count", result.elimination_histogram[k]}});
  return json{{"n", result.n},
              {"games", result.games},
              {"wins", result.wins},
              {"win_rate", result.win_rate()},
              {"elimination_histogram", std::move(hist)},
              {"total_draws", result.total_draws}};
}

SimResult sim_result_from_json(const json& doc) {
  SimResult r;
  r.n = doc.at("n").get<int>();
  r.games = doc.at("games").get<std::uint64_t>();
  r.wins = doc.at("wins").get<std::uint64_t>();
  r.total_draws = doc.at("total_draws").get<std::uint64_t>();
  r.elimination_histogram.assign(static_cast<std::size_t>(r.n) + 1, 0);
  for (const auto& row : doc.at("elimination_histogram")) {
    const auto turn = row.at("turn").get<std::size_t>();
    if (turn < 1 || turn >= r.elimination_histogram.size()) throw std::invalid_argument("histogram turn out of range");
    r.elimination_histogram[turn] = row.at("count").get<std::uint64_t>();
  }
  return r;
}

std::string histogram_csv(const SimResult& result) {
  std::string out = "turn,count\n";
  for (std::size_t k = 1; k < result.elimination_histogram.size(); ++k)
    out += std::to_string(k) + "," + std::to_string(result.elimination_histogram[k]) + "\n";
  return out;
}

json output_document(const std::string& command, json payload) {
  return json{{"schema_version", kSchemaVersion}, {"command", command}, {"payload", std::move(payload)}};
}

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, digits - 1);
  double out = value;
  std::from_chars(buf, res.ptr, out);
  return out;
}

void round_floats(json& doc, int digits) {
  if (doc.is_number_float()) {
    doc = round_significant(doc.get<double>(), digits);
  } else if (doc.is_structured()) {
    for (auto& child : doc) round_floats(child, digits);
  }
}

} // namespace blindseq
