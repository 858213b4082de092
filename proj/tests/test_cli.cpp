#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sparsecut/cli.hpp"

using namespace sparsecut;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("sparsecut_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config reads commands and flags") {
  const RunConfig c =
      parse_config({"pipeline", "--graph", "g.txt", "--seed", "7"});
  CHECK(c.command == "pipeline");
  CHECK(c.graph_path == "g.txt");
  CHECK(c.seed == 7);
  CHECK(c.has_seed);

  const RunConfig e = parse_config({"exact", "--gen", "cycle:4"});
  CHECK(e.command == "exact");
  CHECK(e.gen_spec == "cycle:4");
  CHECK_FALSE(e.has_seed);
}

TEST_CASE("usage errors surface as nonzero parser exits") {
  CHECK_THROWS_AS(parse_config({"pipeline"}), CliExit);  // missing --seed
  CHECK_THROWS_AS(parse_config({"exact", "--bogus"}), CliExit);
  CHECK_THROWS_AS(parse_config({"unknown-command"}), CliExit);
  try {
    parse_config({"pipeline"});
  } catch (const CliExit& e) {
    CHECK(e.code() != 0);
  }
}

TEST_CASE("pipeline without an input graph is a usage error") {
  const RunConfig c = parse_config({"pipeline", "--seed", "1"});
  CHECK_THROWS_AS(run(c), UsageError);
}

TEST_CASE("exact on the 4-cycle") {
  TempDir tmp;
  const std::string out = tmp.file("exact.json");
  RunConfig c = parse_config({"exact", "--gen", "cycle:4", "--out", out});
  CHECK(run(c) == 0);
  const json j = read_json(out);
  CHECK(j.at("ratio").get<double>() == 0.5);
  CHECK(j.at("cut").is_array());
  CHECK(j.at("config").at("command") == "exact");
}

TEST_CASE("gen writes a parseable graph") {
  TempDir tmp;
  const std::string gpath = tmp.file("g.txt");
  CHECK(run(parse_config({"gen", "--gen", "cycle:6", "--out", gpath})) == 0);
  const std::string out = tmp.file("exact.json");
  CHECK(run(parse_config({"exact", "--graph", gpath, "--out", out})) == 0);
  const json j = read_json(out);
  CHECK(j.at("n") == 6);
  CHECK(j.at("ratio").get<double>() == doctest::Approx(2.0 / 9.0));
}

TEST_CASE("randomized generators demand a seed") {
  const RunConfig c = parse_config({"gen", "--gen", "gnp:8:0.5"});
  CHECK_THROWS_AS(run(c), UsageError);
}

TEST_CASE("solve emits the gram matrix, residuals and an embedding") {
  TempDir tmp;
  const std::string out = tmp.file("solve.json");
  const std::string emb = tmp.file("emb.json");
  RunConfig c = parse_config({"solve", "--gen", "cycle:4", "--s-star", "2",
                              "--out", out, "--emb-out", emb});
  CHECK(run(c) == 0);
  const json j = read_json(out);
  CHECK(j.at("s_star") == 2);
  CHECK(j.at("gram").size() == 25);
  CHECK(j.at("objective").get<double>() <= 2.0 + 1e-3);
  CHECK(j.at("residuals").at("max_triangle").get<double>() <= 1e-6);

  const json je = read_json(emb);
  CHECK(je.at("n") == 4);
  CHECK(je.at("vectors").size() == 5);
}

TEST_CASE("round consumes a stored embedding") {
  TempDir tmp;
  const std::string emb = tmp.file("emb.json");
  REQUIRE(run(parse_config({"solve", "--gen", "cycle:4", "--s-star", "2",
                            "--out", tmp.file("solve.json"), "--emb-out",
                            emb})) == 0);
  const std::string out = tmp.file("round.json");
  RunConfig c =
      parse_config({"round", "--gen", "cycle:4", "--embedding", emb, "--s-star",
                    "2", "--seed", "3", "--out", out});
  CHECK(run(c) == 0);
  const json j = read_json(out);
  CHECK(j.at("best").at("ratio").get<double>() <= 0.5 + 1e-9);
  CHECK(j.at("diagnostics").at("path_outcomes").size() >= 3);
}

TEST_CASE("round reports the expected-failure exit when nothing cuts") {
  TempDir tmp;
  // every node on the same point: all paths degenerate
  json emb;
  emb["n"] = 8;
  emb["m"] = 1;
  json rows = json::array();
  rows.push_back({0.0});
  for (int i = 0; i < 8; ++i) rows.push_back({0.5});
  emb["vectors"] = rows;
  const std::string path = tmp.file("flat.json");
  {
    std::ofstream o(path);
    o << emb.dump();
  }
  const std::string out = tmp.file("round.json");
  RunConfig c =
      parse_config({"round", "--gen", "cycle:8", "--embedding", path,
                    "--s-star", "2", "--seed", "3", "--out", out});
  CHECK(run(c) == 2);
  const json j = read_json(out);
  CHECK(j.at("best").is_null());
}

TEST_CASE("pipeline reports are byte-identical across reruns") {
  TempDir tmp;
  const std::string a = tmp.file("a.json"), b = tmp.file("b.json");
  CHECK(run(parse_config({"pipeline", "--gen", "cycle:4", "--seed", "7",
                          "--out", a})) == 0);
  CHECK(run(parse_config({"pipeline", "--gen", "cycle:4", "--seed", "7",
                          "--out", b})) == 0);
  CHECK(read_bytes(a) == read_bytes(b));
  const json j = read_json(a);
  CHECK(j.at("best").at("ratio").get<double>() == 0.5);
  CHECK(j.at("winner_path").is_string());
}

TEST_CASE("harness lr on identical vectors reports probability zero") {
  TempDir tmp;
  const std::string out = tmp.file("lr.json");
  RunConfig c =
      parse_config({"harness", "lr", "--instance", "point:16", "--samples",
                    "500", "--seed", "5", "--out", out});
  CHECK(run(c) == 0);
  const json j = read_json(out);
  CHECK(j.at("aggregates").at("pr_min_ge_cprime_n").get<double>() == 0.0);
}

TEST_CASE("harness mu writes estimate, bound and csv") {
  TempDir tmp;
  const std::string out = tmp.file("mu.json");
  const std::string csv = tmp.file("mu.csv");
  RunConfig c = parse_config({"harness", "mu", "--instance", "hypercube:6",
                              "--node", "3", "--k", "1", "--delta", "0.333334",
                              "--samples", "2000", "--seed", "5", "--out", out,
                              "--csv", csv});
  CHECK(run(c) == 0);
  const json j = read_json(out);
  CHECK(j.at("aggregates").contains("mu_hat"));
  CHECK(j.at("verdicts").size() == 1);
  CHECK(j.at("verdicts").at(0).at("pass").get<bool>());
}

TEST_CASE("harness concentration respects alphas") {
  TempDir tmp;
  const std::string out = tmp.file("conc.json");
  RunConfig c = parse_config({"harness", "concentration", "--instance",
                              "hypercube:6", "--node", "2", "--k", "1",
                              "--delta", "0.333334", "--samples", "2000",
                              "--alphas", "0.25", "0.5", "--seed", "5", "--out",
                              out});
  CHECK(run(c) == 0);
  const json j = read_json(out);
  CHECK(j.at("verdicts").size() == 2);
  for (const auto& v : j.at("verdicts")) CHECK(v.at("pass").get<bool>());
}

TEST_CASE("harness reruns are byte-identical") {
  TempDir tmp;
  const std::string a = tmp.file("a.json"), b = tmp.file("b.json");
  for (const std::string& out : {a, b}) {
    RunConfig c =
        parse_config({"harness", "matching", "--instance", "hypercube:6",
                      "--delta", "0.34", "--samples", "300", "--seed", "11",
                      "--out", out});
    REQUIRE(run(c) == 0);
  }
  CHECK(read_bytes(a) == read_bytes(b));
}
