#include "cli.hpp"

#include <csignal>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "blindseq/game.hpp"
#include "blindseq/grid.hpp"
#include "blindseq/prob_core.hpp"
#include "blindseq/serialize.hpp"
#include "blindseq/service.hpp"
#include "blindseq/simulator.hpp"

namespace blindseq::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutputOptions {
  std::string format = "json";
  bool full_precision = false;
};

int default_workers() {
  if (const char* env = std::getenv("BLINDSEQ_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    throw UsageError("BLINDSEQ_WORKERS must be a positive integer");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string csv_number(double v, bool full) {
  if (!full) v = round_significant(v, 6);
  return json(v).dump();
}

void emit(std::ostream& out, const OutputOptions& opts, const std::string& command, json payload,
          const std::string& csv) {
  if (opts.format == "csv") {
    out << csv;
    return;
  }
  json doc = output_document(command, std::move(payload));
  if (!opts.full_precision) round_floats(doc, 6);
  out << doc.dump(2) << "\n";
}

std::string join(std::span<const double> values, bool full) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ' ';
    s += csv_number(values[i], full);
  }
  return s;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open state file " + path);
  auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw UsageError("state file is not valid JSON: " + path);
  return doc;
}

double next_value(int raw, double normalized) {
  if (!std::isnan(normalized)) {
    if (!(normalized >= 0.0 && normalized <= 1.0)) throw UsageError("--normalized must lie in [0,1]");
    return normalized;
  }
  if (raw < 0 || raw >= kDrawRange) throw UsageError("--next must be an integer in 0..999");
  return normalize_draw(raw);
}

// ---------------------------------------------------------------------------
// tables

struct TablesArgs {
  int n_max = kDefaultMaxLength;
  std::string strategy = "both";
};

int cmd_tables(const TablesArgs& a, const OutputOptions& o, std::ostream& out) {
  if (a.n_max < 1 || a.n_max > kMaxLength) throw UsageError("--n-max must be in 1..256");
  const bool want_es = a.strategy == "both" || a.strategy == "es";
  const bool want_rt = a.strategy == "both" || a.strategy == "rt";
  const auto es = equal_spacing_table(a.n_max);
  const auto es_p = win_prob_table(es);
  const auto [rt, rt_p] = risk_tolerant_table(a.n_max);

  json payload{{"n_max", a.n_max}};
  if (want_es) payload["es"] = to_json(es, es_p);
  if (want_rt) payload["rt"] = to_json(rt, rt_p);
  json factor = json::array();
  for (int n = 0; n <= a.n_max; ++n) factor.push_back(rt_p[n] / es_p[n]);
  if (want_es && want_rt) payload["improvement_factor"] = factor;

  std::ostringstream csv;
  csv << "n";
  if (want_es) csv << ",p_es";
  if (want_rt) csv << ",p_rt";
  if (want_es && want_rt) csv << ",factor";
  if (want_es) csv << ",alpha_es";
  if (want_rt) csv << ",alpha_rt";
  csv << "\n";
  for (int n = 0; n <= a.n_max; ++n) {
    csv << n;
    if (want_es) csv << "," << csv_number(es_p[n], o.full_precision);
    if (want_rt) csv << "," << csv_number(rt_p[n], o.full_precision);
    if (want_es && want_rt) csv << "," << csv_number(rt_p[n] / es_p[n], o.full_precision);
    if (want_es) csv << "," << (n ? join(es.row(n), o.full_precision) : "");
    if (want_rt) csv << "," << (n ? join(rt.row(n), o.full_precision) : "");
    csv << "\n";
  }
  emit(out, o, "tables", std::move(payload), csv.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  int n = 20;
  std::string strategy = "rt";
  std::uint64_t games = 100'000;
  std::uint64_t seed = 0;
  int workers = 0;
};

json simulation_summary(const SimResult& result, double p_n) {
  json s{{"result", to_json(result)}, {"analytic_win_prob", p_n}};
  if (result.losses() > 0) {
    const double mean = mean_elimination_turn(result);
    s["mean_elimination_turn"] = mean;
    s["expected_draws_to_win"] = expected_draws_to_win(p_n, mean, result.n);
    s["expected_draws_to_win_geometric"] = expected_draws_to_win(p_n, mean, result.n, DrawsFormula::Geometric);
  } else {
    s["mean_elimination_turn"] = nullptr;
    s["expected_draws_to_win"] = static_cast<double>(result.n);
    s["expected_draws_to_win_geometric"] = static_cast<double>(result.n);
  }
  return s;
}

int cmd_simulate(const SimulateArgs& a, const OutputOptions& o, std::ostream& out) {
  if (a.n < 1 || a.n > kMaxLength) throw UsageError("--n must be in 1..256");
  if (a.games < 1) throw UsageError("--games must be >= 1");
  const auto kind = parse_strategy_kind(a.strategy);
  if (kind == StrategyKind::Custom) throw UsageError("--strategy must be es or rt");
  auto [table, probs] = kind == StrategyKind::EqualSpacing
                            ? std::pair{equal_spacing_table(a.n), win_prob_table(equal_spacing_table(a.n))}
                            : risk_tolerant_table(a.n);
  SimConfig cfg{a.n, table, a.games, a.seed, a.workers > 0 ? a.workers : default_workers()};
  const SimResult result = run(cfg);
  json payload{{"config", {{"n", a.n}, {"strategy", to_string(kind)}, {"games", a.games}, {"seed", a.seed}}}};
  payload.update(simulation_summary(result, probs[a.n]));
  emit(out, o, "simulate", std::move(payload), histogram_csv(result));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// advise

struct AdviseArgs {
  std::string state_file;
  int next = -1;
  double normalized = std::nan("");
  std::string strategy = "rt";
  std::string rank_by = "win";
  std::string width = "continuous";
};

int cmd_advise(const AdviseArgs& a, const OutputOptions& o, std::ostream& out) {
  GameState state = [&] {
    try {
      return game_state_from_json(read_json_file(a.state_file));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  const double x = next_value(a.next, a.normalized);
  const auto kind = parse_strategy_kind(a.strategy);
  if (kind == StrategyKind::Custom) throw UsageError("--strategy must be es or rt");
  const RankBy rank_by = a.rank_by == "csf" ? RankBy::CorrectSoFar : RankBy::WinProb;
  const BinWidth width = a.width == "integer" ? BinWidth::IntegerInclusive : BinWidth::Continuous;

  auto [table, probs] = kind == StrategyKind::EqualSpacing
                            ? std::pair{equal_spacing_table(state.n()), win_prob_table(equal_spacing_table(state.n()))}
                            : risk_tolerant_table(state.n());
  const auto recs = advise(state, x, probs, rank_by, width);
  json list = json::array();
  std::ostringstream csv;
  csv << "slot,rank,correct_so_far,win_prob\n";
  for (const auto& r : recs) {
    list.push_back(to_json(r));
    csv << r.slot << "," << r.rank << "," << csv_number(r.correct_so_far, o.full_precision) << ","
        << csv_number(r.win_prob, o.full_precision) << "\n";
  }
  json bins_json = json::array();
  for (const Bin& b : bins(state)) bins_json.push_back(to_json(b));
  const auto boundary_slot = strategy_slot(state, x, table);
  json payload{{"state", to_json(state)},
               {"strategy", to_string(kind)},
               {"rank_by", rank_by == RankBy::WinProb ? "win_prob" : "correct_so_far"},
               {"bin_width", width == BinWidth::Continuous ? "continuous" : "integer"},
               {"next", {{"value", raw_draw(x)}, {"normalized", x}}},
               {"bins", std::move(bins_json)},
               {"eliminated", recs.empty()},
               {"feasible_slots", feasible_slots(state, x)},
               {"strategy_slot", boundary_slot ? json(*boundary_slot) : json(nullptr)},
               {"recommendations", std::move(list)}};
  emit(out, o, "advise", std::move(payload), csv.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// grid-advise

struct GridAdviseArgs {
  std::string state_file;
  int next = -1;
  double normalized = std::nan("");
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  int workers = 0;
};

int cmd_grid_advise(const GridAdviseArgs& a, const OutputOptions& o, std::ostream& out) {
  GridState state = [&] {
    try {
      return grid_state_from_json(read_json_file(a.state_file));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  if (a.samples < 1) throw UsageError("--samples must be >= 1");
  const double x = next_value(a.next, a.normalized);
  const GridSampling sampling{a.samples, a.seed, a.workers > 0 ? a.workers : default_workers()};
  const auto recs = grid_advise(state, x, sampling);

  json heatmap = json::array();
  for (int i = 1; i <= state.m(); ++i) heatmap.push_back(json(std::vector<json>(static_cast<std::size_t>(state.m()))));
  json list = json::array();
  std::ostringstream csv;
  csv << "row,col,rank,probability\n";
  for (const auto& r : recs) {
    heatmap[static_cast<std::size_t>(r.cell.row - 1)][static_cast<std::size_t>(r.cell.col - 1)] = r.probability;
    list.push_back(to_json(r));
    csv << r.cell.row << "," << r.cell.col << "," << r.rank << "," << csv_number(r.probability, o.full_precision)
        << "\n";
  }
  json payload{{"state", to_json(state)},
               {"next", {{"value", raw_draw(x)}, {"normalized", x}}},
               {"samples", a.samples},
               {"seed", a.seed},
               {"eliminated", recs.empty()},
               {"recommendations", std::move(list)},
               {"heatmap", std::move(heatmap)}};
  emit(out, o, "grid-advise", std::move(payload), csv.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// figures

struct FiguresArgs {
  int id = 0;
  int n_max = 40;
  int n = 40;
  std::uint64_t games = 100'000;
  std::uint64_t seed = 0;
  int workers = 0;
};

int cmd_figures(const FiguresArgs& a, const OutputOptions& o, std::ostream& out) {
  std::ostringstream csv;
  json payload{{"figure", a.id}};
  switch (a.id) {
    case 2: {
      if (a.n_max < 1 || a.n_max > kMaxLength) throw UsageError("--n-max must be in 1..256");
      const auto es_p = win_prob_table(equal_spacing_table(a.n_max));
      const auto rt_p = risk_tolerant_table(a.n_max).second;
      json series = json::array();
      csv << "n,log10_p_es,log10_p_rt,factor\n";
      for (int n = 1; n <= a.n_max; ++n) {
        const double f = rt_p[n] / es_p[n];
        series.push_back({{"n", n}, {"log10_p_es", std::log10(es_p[n])}, {"log10_p_rt", std::log10(rt_p[n])}, {"factor", f}});
        csv << n << "," << csv_number(std::log10(es_p[n]), o.full_precision) << ","
            << csv_number(std::log10(rt_p[n]), o.full_precision) << "," << csv_number(f, o.full_precision) << "\n";
      }
      payload["series"] = std::move(series);
      break;
    }
    case 3: {
      const int top = std::min(a.n_max, 20);
      if (top < 2) throw UsageError("--n-max must be >= 2 for figure 3");
      const auto es = equal_spacing_table(top);
      const auto rt = risk_tolerant_table(top).first;
      json rows = json::array();
      csv << "n,strategy,k,tick\n";
      for (int n = 2; n <= top; ++n) {
        auto es_row = es.row(n).subspan(1, static_cast<std::size_t>(n - 1));
        auto rt_row = rt.row(n).subspan(1, static_cast<std::size_t>(n - 1));
        rows.push_back({{"n", n},
                        {"es", std::vector<double>(es_row.begin(), es_row.end())},
                        {"rt", std::vector<double>(rt_row.begin(), rt_row.end())}});
        for (int k = 1; k < n; ++k) {
          csv << n << ",es," << k << "," << csv_number(es_row[static_cast<std::size_t>(k - 1)], o.full_precision) << "\n";
          csv << n << ",rt," << k << "," << csv_number(rt_row[static_cast<std::size_t>(k - 1)], o.full_precision) << "\n";
        }
      }
      payload["rows"] = std::move(rows);
      break;
    }
    case 4: {
      if (a.n < 1 || a.n > kMaxLength) throw UsageError("--n must be in 1..256");
      const auto rt = risk_tolerant_table(a.n).first;
      const auto row = rt.row(a.n);
      json sizes = json::array();
      csv << "k,relative_bin_size\n";
      for (int k = 1; k <= a.n; ++k) {
        const double rel = a.n * (row[static_cast<std::size_t>(k)] - row[static_cast<std::size_t>(k - 1)]);
        sizes.push_back(rel);
        csv << k << "," << csv_number(rel, o.full_precision) << "\n";
      }
      payload["n"] = a.n;
      payload["relative_bin_sizes"] = std::move(sizes);
      break;
    }
    case 5: {
      if (a.games < 1) throw UsageError("--games must be >= 1");
      const int workers = a.workers > 0 ? a.workers : default_workers();
      json panels = json::array();
      csv << "n,strategy,turn,probability\n";
      for (int n : {20, 40}) {
        const auto es = equal_spacing_table(n);
        const auto es_p = win_prob_table(es);
        const auto [rt, rt_p] = risk_tolerant_table(n);
        json panel{{"n", n}};
        double draws[2] = {0.0, 0.0};
        int idx = 0;
        for (const auto* pair : {&es, &rt}) {
          const auto& p = idx == 0 ? es_p : rt_p;
          const SimResult r = run(SimConfig{n, *pair, a.games, a.seed, workers});
          const double mean = mean_elimination_turn(r);
          draws[idx] = expected_draws_to_win(p[n], mean, n);
          json f = json::array();
          const auto losses = static_cast<double>(r.losses());
          for (int k = 1; k <= n; ++k) {
            const double prob = static_cast<double>(r.elimination_histogram[static_cast<std::size_t>(k)]) / losses;
            f.push_back(prob);
            csv << n << "," << (idx == 0 ? "es" : "rt") << "," << k << "," << csv_number(prob, o.full_precision) << "\n";
          }
          panel[idx == 0 ? "es" : "rt"] = {{"f", std::move(f)}, {"mean", mean}, {"expected_draws_to_win", draws[idx]}};
          ++idx;
        }
        panel["draw_ratio_rt_over_es"] = draws[1] / draws[0];
        panels.push_back(std::move(panel));
      }
      payload["games"] = a.games;
      payload["seed"] = a.seed;
      payload["panels"] = std::move(panels);
      break;
    }
    default:
      throw UsageError("unknown figure id " + std::to_string(a.id) + " (expected 2, 3, 4 or 5)");
  }
  emit(out, o, "figures", std::move(payload), csv.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// serve

struct ServeArgs {
  int port = 8080;
  std::string bind = "127.0.0.1";
  long ttl_seconds = 24 * 60 * 60;
  std::size_t max_sessions = 10'000;
  std::uint64_t grid_samples = 20'000;
  std::string width = "continuous";
};

httplib::Server* g_server = nullptr;

extern "C" void stop_server(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.port < 0 || a.port > 65535) throw UsageError("--port must be in 0..65535");
  ServiceOptions options;
  options.ttl = std::chrono::seconds(a.ttl_seconds);
  options.max_sessions = a.max_sessions;
  options.grid_samples = a.grid_samples;
  options.workers = default_workers();
  options.width = a.width == "integer" ? BinWidth::IntegerInclusive : BinWidth::Continuous;
  AdvisorService service(options);
  httplib::Server server;
  // No SO_REUSEPORT: a port held by another listener must fail the bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  register_routes(server, service);

  int port = a.port;
  if (port == 0) {
    port = server.bind_to_any_port(a.bind);
    if (port < 0) {
      err << "error: cannot bind " << a.bind << "\n";
      return kExitRuntime;
    }
  } else if (!server.bind_to_port(a.bind, port)) {
    err << "error: cannot bind " << a.bind << ":" << port << "\n";
    return kExitRuntime;
  }
  out << "listening on " << a.bind << ":" << port << std::endl;
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  server.listen_after_bind();
  g_server = nullptr;
  return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strategy tables, simulation and live advice for the blind number sequencing game", "blindseq"};
  app.require_subcommand(1);
  OutputOptions output;
  auto add_output = [&output](CLI::App* sub) {
    sub->add_option("--format", output.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--full-precision", output.full_precision, "Print shortest round-trip decimals");
  };

  TablesArgs tables;
  auto* t = app.add_subcommand("tables", "Boundaries and win probabilities for ES and RT");
  t->add_option("--n-max", tables.n_max, "Largest list length");
  t->add_option("--strategy", tables.strategy)->check(CLI::IsMember({"es", "rt", "both"}));
  add_output(t);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Monte Carlo win rate and elimination histogram");
  s->add_option("--n", sim.n, "List length");
  s->add_option("--strategy", sim.strategy)->check(CLI::IsMember({"es", "rt"}));
  s->add_option("--games", sim.games);
  s->add_option("--seed", sim.seed);
  s->add_option("--workers", sim.workers);
  add_output(s);

  AdviseArgs adv;
  auto* a = app.add_subcommand("advise", "Score every feasible slot for the next draw");
  a->add_option("--state", adv.state_file, "Game state JSON file")->required();
  auto* next_opt = a->add_option("--next", adv.next, "Next raw draw (0..999)");
  auto* norm_opt = a->add_option("--normalized", adv.normalized, "Next draw already on [0,1]");
  next_opt->excludes(norm_opt);
  a->add_option("--strategy", adv.strategy)->check(CLI::IsMember({"es", "rt"}));
  a->add_option("--rank-by", adv.rank_by, "win or csf")->check(CLI::IsMember({"win", "csf"}));
  a->add_option("--width", adv.width, "Bin width convention")->check(CLI::IsMember({"continuous", "integer"}));
  add_output(a);

  GridAdviseArgs gadv;
  auto* g = app.add_subcommand("grid-advise", "Greedy placement probabilities for the grid variant");
  g->add_option("--state", gadv.state_file, "Grid state JSON file")->required();
  auto* gnext = g->add_option("--next", gadv.next, "Next raw draw (0..999)");
  auto* gnorm = g->add_option("--normalized", gadv.normalized, "Next draw already on [0,1]");
  gnext->excludes(gnorm);
  g->add_option("--samples", gadv.samples);
  g->add_option("--seed", gadv.seed);
  g->add_option("--workers", gadv.workers);
  add_output(g);

  FiguresArgs fig;
  auto* f = app.add_subcommand("figures", "Data series behind the strategy figures");
  f->add_option("id", fig.id, "Figure id: 2, 3, 4 or 5")->required();
  f->add_option("--n-max", fig.n_max);
  f->add_option("--n", fig.n);
  f->add_option("--games", fig.games);
  f->add_option("--seed", fig.seed);
  f->add_option("--workers", fig.workers);
  add_output(f);

  ServeArgs serve;
  auto* sv = app.add_subcommand("serve", "Run the HTTP advisor service");
  sv->add_option("--port", serve.port, "0 picks an ephemeral port");
  sv->add_option("--bind", serve.bind);
  sv->add_option("--ttl", serve.ttl_seconds, "Session time-to-live in seconds");
  sv->add_option("--max-sessions", serve.max_sessions);
  sv->add_option("--grid-samples", serve.grid_samples);
  sv->add_option("--width", serve.width)->check(CLI::IsMember({"continuous", "integer"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*t) return cmd_tables(tables, output, out);
    if (*s) return cmd_simulate(sim, output, out);
    if (*a) {
      if (adv.next < 0 && std::isnan(adv.normalized)) throw UsageError("advise needs --next or --normalized");
      return cmd_advise(adv, output, out);
    }
    if (*g) {
      if (gadv.next < 0 && std::isnan(gadv.normalized)) throw UsageError("grid-advise needs --next or --normalized");
      return cmd_grid_advise(gadv, output, out);
    }
    if (*f) return cmd_figures(fig, output, out);
    if (*sv) return cmd_serve(serve, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

} // namespace blindseq::cli
