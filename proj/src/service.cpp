#include "blindseq/service.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <random>
#include <regex>

#include <httplib.h>

namespace blindseq {

std::string_view to_string(Variant v) { return v == Variant::List ? "list" : "grid"; }

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::InProgress: return "InProgress";
    case SessionStatus::Won: return "Won";
    case SessionStatus::Eliminated: return "Eliminated";
  }
  return "InProgress";
}

struct AdvisorService::Session {
  std::mutex mutex;
  std::string id;
  Clock::time_point created_at;
  Clock::time_point last_access;
  Variant variant = Variant::List;
  StrategyKind strategy = StrategyKind::RiskTolerant;
  SessionStatus status = SessionStatus::InProgress;
  std::variant<GameState, GridState> game;
  std::vector<int> draws; // every raw draw, including an eliminating one
  std::optional<double> pending;
  std::uint64_t seed = 0;

  Session(Variant v, std::variant<GameState, GridState> g) : variant(v), game(std::move(g)) {}
};

namespace {

ServiceResponse error(int status, std::string code, std::string message) {
  return {status, json{{"code", std::move(code)}, {"message", std::move(message)}}};
}

std::string iso_time(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string new_id() {
  static std::mutex m;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(m);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(gen()),
                static_cast<unsigned long long>(gen()));
  return buf;
}

std::optional<int> integer_field(const json& body, const char* key) {
  if (!body.is_object() || !body.contains(key)) return std::nullopt;
  const auto& v = body.at(key);
  if (!v.is_number_integer()) return std::nullopt;
  return v.get<int>();
}

} // namespace

AdvisorService::AdvisorService(ServiceOptions options, std::function<Clock::time_point()> now)
    : options_(options),
      now_(std::move(now)),
      es_table_(equal_spacing_table(options.max_list_length)),
      es_probs_(win_prob_table(es_table_)),
      rt_(risk_tolerant_table(options.max_list_length)) {}

AdvisorService::~AdvisorService() = default;

const StrategyTable& AdvisorService::table_for(StrategyKind kind) const {
  return kind == StrategyKind::EqualSpacing ? es_table_ : rt_.first;
}

const WinProbTable& AdvisorService::probs_for(StrategyKind kind) const {
  return kind == StrategyKind::EqualSpacing ? es_probs_ : rt_.second;
}

void AdvisorService::purge_expired() {
  const auto now = now_();
  std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->last_access > options_.ttl; });
}

std::shared_ptr<AdvisorService::Session> AdvisorService::find(const std::string& id) {
  std::lock_guard lock(store_mutex_);
  purge_expired();
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second->last_access = now_();
  return it->second;
}

std::size_t AdvisorService::session_count() {
  std::lock_guard lock(store_mutex_);
  purge_expired();
  return sessions_.size();
}

json AdvisorService::session_document(const Session& s) const {
  json doc{{"id", s.id},
           {"variant", to_string(s.variant)},
           {"strategy_kind", to_string(s.strategy)},
           {"status", to_string(s.status)},
           {"created_at", iso_time(s.created_at)},
           {"draws", s.draws},
           {"pending_draw", s.pending ? json(raw_draw(*s.pending)) : json(nullptr)}};
  if (const auto* g = std::get_if<GameState>(&s.game)) {
    doc["n"] = g->n();
    doc["state"] = to_json(*g);
    doc["history"] = g->history();
    doc["boundaries"] = table_for(s.strategy).row(g->n());
    const bool lost = s.status == SessionStatus::Eliminated;
    doc["correct_so_far"] = lost ? 0.0 : correct_so_far(*g, options_.width);
    doc["win_prob"] = lost ? 0.0 : win_prob_from_state(*g, probs_for(s.strategy), options_.width);
  } else {
    const auto& grid = std::get<GridState>(s.game);
    doc["m"] = grid.m();
    doc["state"] = to_json(grid);
  }
  return doc;
}

ServiceResponse AdvisorService::create_game(const json& body, std::optional<Variant> forced) {
  if (!body.is_object()) return error(400, "bad_request", "body must be a JSON object");
  Variant variant = forced.value_or(Variant::List);
  if (!forced && body.contains("variant")) {
    const auto v = body.value("variant", std::string{});
    if (v == "list")
      variant = Variant::List;
    else if (v == "grid")
      variant = Variant::Grid;
    else
      return error(400, "bad_request", "variant must be \"list\" or \"grid\"");
  }
  StrategyKind strategy = StrategyKind::RiskTolerant;
  if (body.contains("strategy")) {
    try {
      strategy = parse_strategy_kind(body.value("strategy", std::string{}));
    } catch (const std::invalid_argument&) {
      return error(400, "bad_request", "strategy must be \"rt\" or \"es\"");
    }
    if (strategy == StrategyKind::Custom) return error(400, "bad_request", "strategy must be \"rt\" or \"es\"");
  }

  std::shared_ptr<Session> session;
  if (variant == Variant::List) {
    const auto n = integer_field(body, "n");
    if (!n || *n < 1 || *n > options_.max_list_length)
      return error(400, "bad_request", "n must be an integer in 1.." + std::to_string(options_.max_list_length));
    session = std::make_shared<Session>(Variant::List, GameState(*n));
  } else {
    const auto m = integer_field(body, "m");
    if (!m || *m < 1 || *m > options_.max_grid_side)
      return error(400, "bad_request", "m must be an integer in 1.." + std::to_string(options_.max_grid_side));
    session = std::make_shared<Session>(Variant::Grid, GridState(*m));
  }
  session->strategy = strategy;
  session->created_at = session->last_access = now_();
  session->id = new_id();
  session->seed = std::hash<std::string>{}(session->id);

  std::lock_guard lock(store_mutex_);
  purge_expired();
  if (sessions_.size() >= options_.max_sessions) return error(503, "capacity", "session limit reached");
  sessions_.emplace(session->id, session);
  return {201, session_document(*session)};
}

json AdvisorService::list_draw_response(Session& s, int raw, double x) {
  auto& game = std::get<GameState>(s.game);
  const auto recs = advise(game, x, probs_for(s.strategy), RankBy::WinProb, options_.width);
  json out{{"turn", static_cast<int>(s.draws.size())},
           {"value", raw},
           {"normalized", x},
           {"feasible_slots", feasible_slots(game, x)},
           {"eliminated", recs.empty()}};
  json list = json::array();
  for (const auto& r : recs) list.push_back(to_json(r));
  out["recommendations"] = std::move(list);
  if (recs.empty()) {
    s.status = SessionStatus::Eliminated;
  } else {
    s.pending = x;
  }
  return out;
}

json AdvisorService::grid_draw_response(Session& s, int raw, double x) {
  auto& grid = std::get<GridState>(s.game);
  GridSampling sampling{options_.grid_samples, stream_seed(s.seed, s.draws.size()), options_.workers};
  const auto recs = grid_advise(grid, x, sampling);
  json cells = json::array();
  json list = json::array();
  for (const auto& r : recs) {
    cells.push_back({r.cell.row, r.cell.col});
    list.push_back(to_json(r));
  }
  json out{{"turn", static_cast<int>(s.draws.size())},
           {"value", raw},
           {"normalized", x},
           {"feasible_cells", std::move(cells)},
           {"recommendations", std::move(list)},
           {"eliminated", recs.empty()}};
  if (recs.empty()) {
    s.status = SessionStatus::Eliminated;
  } else {
    s.pending = x;
  }
  return out;
}

ServiceResponse AdvisorService::submit_draw(const std::string& id, const json& body, bool autoplace) {
  auto session = find(id);
  if (!session) return error(404, "not_found", "unknown session " + id);
  const auto raw = integer_field(body, "value");
  if (!raw || *raw < 0 || *raw >= kDrawRange) return error(400, "bad_request", "value must be an integer in 0..999");

  std::lock_guard lock(session->mutex);
  Session& s = *session;
  if (s.status != SessionStatus::InProgress) return error(409, "terminated", "session is no longer in progress");
  if (s.pending) return error(409, "draw_pending", "the previous draw has not been placed yet");

  const double x = normalize_draw(*raw);
  s.draws.push_back(*raw);
  json out = s.variant == Variant::List ? list_draw_response(s, *raw, x) : grid_draw_response(s, *raw, x);

  if (autoplace && s.pending) {
    const auto& top = out["recommendations"][0];
    if (auto* g = std::get_if<GameState>(&s.game)) {
      g->place(top["slot"].get<int>(), x);
      if (g->full()) s.status = SessionStatus::Won;
    } else {
      auto& grid = std::get<GridState>(s.game);
      grid.place({top["row"].get<int>(), top["col"].get<int>()}, x);
      if (grid.full()) s.status = SessionStatus::Won;
    }
    s.pending.reset();
    out["placed"] = top;
  }
  out["status"] = to_string(s.status);
  if (autoplace) out["session"] = session_document(s);
  return {200, std::move(out)};
}

ServiceResponse AdvisorService::commit_placement(const std::string& id, const json& body) {
  auto session = find(id);
  if (!session) return error(404, "not_found", "unknown session " + id);
  std::lock_guard lock(session->mutex);
  Session& s = *session;
  if (s.status != SessionStatus::InProgress) return error(409, "terminated", "session is no longer in progress");
  if (!s.pending) return error(409, "no_pending_draw", "no draw is waiting to be placed");
  const double x = *s.pending;
  try {
    if (auto* g = std::get_if<GameState>(&s.game)) {
      const auto slot = integer_field(body, "slot");
      if (!slot) return error(400, "bad_request", "slot must be an integer");
      g->place(*slot, x);
      if (g->full()) s.status = SessionStatus::Won;
    } else {
      auto& grid = std::get<GridState>(s.game);
      const auto row = integer_field(body, "row");
      const auto col = integer_field(body, "col");
      if (!row || !col) return error(400, "bad_request", "row and col must be integers");
      if (*row < 1 || *row > grid.m() || *col < 1 || *col > grid.m())
        return error(409, "infeasible_placement", "cell outside the grid");
      grid.place({*row, *col}, x);
      if (grid.full()) s.status = SessionStatus::Won;
    }
  } catch (const std::invalid_argument& e) {
    return error(409, "infeasible_placement", e.what());
  }
  s.pending.reset();
  return {200, session_document(s)};
}

ServiceResponse AdvisorService::get_state(const std::string& id) {
  auto session = find(id);
  if (!session) return error(404, "not_found", "unknown session " + id);
  std::lock_guard lock(session->mutex);
  return {200, session_document(*session)};
}

ServiceResponse AdvisorService::delete_game(const std::string& id) {
  std::lock_guard lock(store_mutex_);
  if (sessions_.erase(id) == 0) return error(404, "not_found", "unknown session " + id);
  return {204, json{}};
}

// ---------------------------------------------------------------------------

void register_routes(httplib::Server& server, AdvisorService& service) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});

  auto reply = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body.dump(), "application/json");
  };
  auto parse = [](const httplib::Request& req) -> std::optional<json> {
    if (req.body.empty()) return json::object();
    auto doc = json::parse(req.body, nullptr, false);
    if (doc.is_discarded()) return std::nullopt;
    return doc;
  };
  auto bad_json = [reply](httplib::Response& res) {
    reply(res, error(400, "bad_request", "request body is not valid JSON"));
  };

  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Post(R"(/api/(games|grids))", [&service, reply, parse, bad_json](const httplib::Request& req,
                                                                           httplib::Response& res) {
    auto body = parse(req);
    if (!body) return bad_json(res);
    std::optional<Variant> forced;
    if (req.matches[1] == "grids") forced = Variant::Grid;
    reply(res, service.create_game(*body, forced));
  });
  server.Post(R"(/api/(games|grids)/([0-9a-f]+)/draws)",
              [&service, reply, parse, bad_json](const httplib::Request& req, httplib::Response& res) {
                auto body = parse(req);
                if (!body) return bad_json(res);
                const bool autoplace = req.has_param("autoplace") && req.get_param_value("autoplace") == "true";
                reply(res, service.submit_draw(req.matches[2], *body, autoplace));
              });
  server.Post(R"(/api/(games|grids)/([0-9a-f]+)/placements)",
              [&service, reply, parse, bad_json](const httplib::Request& req, httplib::Response& res) {
                auto body = parse(req);
                if (!body) return bad_json(res);
                reply(res, service.commit_placement(req.matches[2], *body));
              });
  server.Get(R"(/api/(games|grids)/([0-9a-f]+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_state(req.matches[2]));
  });
  server.Delete(R"(/api/(games|grids)/([0-9a-f]+))",
                [&service, reply](const httplib::Request& req, httplib::Response& res) {
                  reply(res, service.delete_game(req.matches[2]));
                });
}

} // namespace blindseq
