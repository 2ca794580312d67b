#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = blindseq::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json payload(const Result& r) {
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc.at("schema_version") == "1.0");
  return doc.at("payload");
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = fs::temp_directory_path() / ("blindseq_cli_" + name);
  std::ofstream(path) << text;
  return path.string();
}

const char* kWorkedState =
    R"({"n":20,"slots":[null,null,0.1305,null,null,null,null,null,null,null,null,0.5735,null,null,null,0.7615,null,null,null,null],"history":[0.1305,0.5735,0.7615]})";

std::size_t csv_rows(const std::string& text) {
  std::size_t lines = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++lines;
  return lines - 1; // header
}

} // namespace

TEST_CASE("tables") {
  const auto p20 = payload(invoke({"tables", "--n-max", "20"}));
  CHECK(1.0 / p20["rt"]["p"][20].get<double>() == doctest::Approx(7980).epsilon(5e-3));
  CHECK(p20["improvement_factor"][20].get<double>() == doctest::Approx(1.2095).epsilon(1e-4));
  const auto p40 = payload(invoke({"tables", "--n-max", "40"}));
  CHECK(p40["improvement_factor"][40].get<double>() == doctest::Approx(1.4617).epsilon(1e-4));
  const auto p1 = payload(invoke({"tables", "--n-max", "1", "--strategy", "es"}));
  CHECK(p1["es"]["p"][1] == 1.0);
  CHECK(p1["es"]["boundaries"][0] == json::array({0.0, 1.0}));
  CHECK_FALSE(p1.contains("rt"));
}

TEST_CASE("tables csv rows match json") {
  const auto j = payload(invoke({"tables", "--n-max", "12"}));
  const auto c = invoke({"tables", "--n-max", "12", "--format", "csv"});
  REQUIRE(c.code == 0);
  CHECK(csv_rows(c.out) == j["es"]["p"].size());
}

TEST_CASE("usage errors exit 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
  CHECK(invoke({"tables", "--n-max", "300"}).code == 2);
  CHECK(invoke({"tables", "--n-max", "0"}).code == 2);
  CHECK(invoke({"tables", "--strategy", "xx"}).code == 2);
  CHECK(invoke({"figures", "9"}).code == 2);
  CHECK(invoke({"simulate", "--games", "0"}).code == 2);
  CHECK(invoke({"advise", "--next", "3"}).code == 2);
  const auto bad = write_temp("bad.json", R"({"n":3,"slots":[0.5,0.2,null],"history":[0.5,0.2]})");
  CHECK(invoke({"advise", "--state", bad, "--next", "100"}).code == 2);
  const auto junk = write_temp("junk.json", "not json");
  CHECK(invoke({"advise", "--state", junk, "--next", "100"}).code == 2);
  CHECK(invoke({"advise", "--state", "/nonexistent/state.json", "--next", "100"}).code != 0);
}

TEST_CASE("advise: worked example state") {
  const auto file = write_temp("worked.json", kWorkedState);
  const auto rt = payload(invoke({"advise", "--state", file, "--next", "170", "--strategy", "rt"}));
  CHECK(rt["recommendations"][0]["slot"] == 5);
  CHECK(rt["eliminated"] == false);
  CHECK(rt["feasible_slots"].size() == 8);
  const auto es = payload(invoke({"advise", "--state", file, "--next", "170", "--strategy", "es", "--rank-by", "csf"}));
  CHECK(es["recommendations"][0]["slot"] == 4);
  const auto integer = payload(
      invoke({"advise", "--state", file, "--next", "170", "--strategy", "rt", "--width", "integer"}));
  CHECK(integer["recommendations"][0]["win_prob"].get<double>() == doctest::Approx(1.28e-4).epsilon(0.02));
  const auto normalized = payload(invoke({"advise", "--state", file, "--normalized", "0.1705"}));
  CHECK(normalized["recommendations"] == rt["recommendations"]);
}

TEST_CASE("advise: elimination is a normal outcome") {
  const auto full = write_temp("full.json", R"({"n":2,"slots":[0.2,0.6],"history":[0.6,0.2]})");
  const auto r = payload(invoke({"advise", "--state", full, "--next", "500"}));
  CHECK(r["eliminated"] == true);
  CHECK(r["recommendations"].empty());
  const auto file = write_temp("worked.json", kWorkedState);
  CHECK(payload(invoke({"advise", "--state", file, "--next", "573"}))["eliminated"] == true);
}

TEST_CASE("grid-advise") {
  const auto file = write_temp(
      "grid.json",
      R"({"m":5,"cells":[[null,null,null,null,null],[0.1305,null,null,null,0.5735],[null,null,null,null,0.7615],[null,null,null,null,null],[null,null,null,null,null]]})");
  const auto p = payload(invoke({"grid-advise", "--state", file, "--next", "170", "--samples", "20000", "--seed", "1"}));
  CHECK(p["recommendations"][0]["row"] == 3);
  CHECK(p["recommendations"][0]["col"] == 1);
  CHECK(p["heatmap"][0][0].is_null());
  CHECK(p["heatmap"][1][0].is_null());
  CHECK(p["heatmap"][2][0].get<double>() == doctest::Approx(0.86).epsilon(0.05));
}

TEST_CASE("simulate") {
  const auto one = payload(invoke({"simulate", "--n", "1", "--games", "10"}));
  CHECK(one["result"]["wins"] == 10);
  CHECK(one["mean_elimination_turn"].is_null());

  const auto j = payload(invoke({"simulate", "--n", "8", "--games", "2000", "--seed", "4"}));
  const auto c = invoke({"simulate", "--n", "8", "--games", "2000", "--seed", "4", "--format", "csv"});
  REQUIRE(c.code == 0);
  CHECK(csv_rows(c.out) == j["result"]["elimination_histogram"].size());
}

TEST_CASE("same arguments give byte-identical output") {
  const std::vector<std::vector<std::string>> commands = {
      {"simulate", "--n", "10", "--strategy", "rt", "--games", "5000", "--seed", "42"},
      {"figures", "5", "--n", "10", "--games", "2000", "--seed", "3"},
      {"tables", "--n-max", "30", "--full-precision"},
  };
  for (const auto& cmd : commands) {
    const auto a = invoke(cmd);
    REQUIRE(a.code == 0);
    CHECK(invoke(cmd).out == a.out);
  }
  // Worker count does not change results.
  auto with_workers = commands[0];
  with_workers.insert(with_workers.end(), {"--workers", "1"});
  const auto w1 = invoke(with_workers);
  with_workers.back() = "7";
  CHECK(invoke(with_workers).out == w1.out);
  CHECK(invoke(commands[0]).out == w1.out);
}

TEST_CASE("precision control") {
  const auto rounded = payload(invoke({"tables", "--n-max", "3"}));
  const auto full = payload(invoke({"tables", "--n-max", "3", "--full-precision"}));
  CHECK(rounded["rt"]["boundaries"][2][1].get<double>() == 0.272727);
  CHECK(full["rt"]["boundaries"][2][1].get<double>() == doctest::Approx(3.0 / 11).epsilon(1e-15));
}

TEST_CASE("figures") {
  const auto f4 = payload(invoke({"figures", "4"}));
  CHECK(f4["relative_bin_sizes"][0].get<double>() == doctest::Approx(0.6).epsilon(0.05));
  CHECK(f4["relative_bin_sizes"].size() == 40);

  const auto f3 = payload(invoke({"figures", "3", "--full-precision"}));
  REQUIRE(f3["rows"].size() == 19);
  for (const auto& row : f3["rows"]) {
    const int n = row["n"];
    REQUIRE(row["es"].size() == static_cast<std::size_t>(n - 1));
    for (int j = 1; j < n; ++j) CHECK(row["es"][j - 1].get<double>() == doctest::Approx(double(j) / n));
  }

  const auto f2 = payload(invoke({"figures", "2", "--n-max", "40"}));
  const auto& series = f2["series"];
  REQUIRE(series.size() == 40);
  for (std::size_t i = 3; i < series.size(); ++i)
    CHECK(series[i]["factor"].get<double>() > series[i - 1]["factor"].get<double>());
}

TEST_CASE("serve: occupied port is a runtime failure") {
  httplib::Server holder;
  holder.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  const int port = holder.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  const auto r = invoke({"serve", "--port", std::to_string(port), "--bind", "127.0.0.1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("cannot bind") != std::string::npos);
  CHECK(invoke({"serve", "--port", "70000"}).code == 2);
}

TEST_CASE("BLINDSEQ_WORKERS") {
  const std::vector<std::string> cmd = {"simulate", "--n", "6", "--games", "3000", "--seed", "9"};
  const auto base = invoke(cmd);
  ::setenv("BLINDSEQ_WORKERS", "5", 1);
  CHECK(invoke(cmd).out == base.out);
  ::setenv("BLINDSEQ_WORKERS", "zero", 1);
  CHECK(invoke(cmd).code == 2);
  ::unsetenv("BLINDSEQ_WORKERS");
}
