#pragma once

// Session-based advisor over HTTP/JSON. The request handlers are plain
// member functions returning (status, body) so they can be driven without a
// socket; register_routes() wires them to a cpp-httplib server.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "blindseq/game.hpp"
#include "blindseq/grid.hpp"
#include "blindseq/serialize.hpp"

namespace httplib {
class Server;
}

namespace blindseq {

enum class Variant { List, Grid };
enum class SessionStatus { InProgress, Won, Eliminated };

std::string_view to_string(Variant v);
std::string_view to_string(SessionStatus s);

struct ServiceOptions {
  std::chrono::seconds ttl{24 * 60 * 60};
  std::size_t max_sessions = 10'000;
  int max_list_length = 64;
  int max_grid_side = 8;
  std::uint64_t grid_samples = 20'000;
  int workers = 1;
  BinWidth width = BinWidth::Continuous;
};

struct ServiceResponse {
  int status = 200;
  json body;
};

class AdvisorService {
public:
  using Clock = std::chrono::system_clock;

  explicit AdvisorService(ServiceOptions options = {}, std::function<Clock::time_point()> now = Clock::now);
  ~AdvisorService();

  // `forced` pins the variant for routes under /api/grids.
  ServiceResponse create_game(const json& body, std::optional<Variant> forced = std::nullopt);
  ServiceResponse submit_draw(const std::string& id, const json& body, bool autoplace = false);
  ServiceResponse commit_placement(const std::string& id, const json& body);
  ServiceResponse get_state(const std::string& id);
  ServiceResponse delete_game(const std::string& id);

  std::size_t session_count();
  const ServiceOptions& options() const noexcept { return options_; }

private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id);
  void purge_expired();
  json session_document(const Session& s) const;
  json list_draw_response(Session& s, int raw, double x);
  json grid_draw_response(Session& s, int raw, double x);
  const StrategyTable& table_for(StrategyKind kind) const;
  const WinProbTable& probs_for(StrategyKind kind) const;

  ServiceOptions options_;
  std::function<Clock::time_point()> now_;
  StrategyTable es_table_;
  WinProbTable es_probs_;
  std::pair<StrategyTable, WinProbTable> rt_;

  std::mutex store_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

// Mounts the REST routes (/api/games, /api/grids) and permissive CORS
// headers on `server`.
void register_routes(httplib::Server& server, AdvisorService& service);

} // namespace blindseq
