#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "lvfront/cli.hpp"
#include "lvfront/errors.hpp"

using namespace lvfront;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lvfront_test_" + name);
  fs::remove_all(p);
  return p;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("run config survives a JSON round trip") {
  RunConfig cfg;
  cfg.model = {0.3, 0.7, 2.0, 0.5};
  cfg.c = 3.1;
  cfg.selector = "101";
  cfg.scheme.boundary = Boundary::DirichletFromPair;
  cfg.scheme.snapshot_times = {1.0, 2.5};
  cfg.n_list = {3, 6};
  cfg.seed = 99;
  const Json j = to_json(cfg);
  const RunConfig back = run_config_from_json(j);
  CHECK(to_json(back).dump() == j.dump());
  CHECK(back.scheme.boundary == Boundary::DirichletFromPair);

  CHECK_THROWS_AS(run_config_from_json(Json{{"nope", 1}}), Error);
  CHECK_THROWS_AS(run_config_from_json(Json{{"scheme", {{"boundary", "Periodic"}}}}), Error);
  CHECK_THROWS_AS(run_config_from_json(Json{{"c", "fast"}}), Error);
}

TEST_CASE("atomic writes replace files without leftovers") {
  const auto dir = scratch("atomic");
  write_atomic(dir / "a.txt", "one");
  write_atomic(dir / "a.txt", "two");
  CHECK(read_file(dir / "a.txt") == "two");
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  CHECK_THROWS_AS(read_file(dir / "missing.txt"), Error);
}

TEST_CASE("spectral suite is reproducible from its seed") {
  const auto a = spectral_suite(5, 50), b = spectral_suite(5, 50);
  CHECK(a.split_failures == 0);
  CHECK(a.max_closed_form_error == b.max_closed_form_error);
  CHECK(a.max_closed_form_error < 1e-12);
  CHECK(a.max_vieta_error < 1e-12);
}

TEST_CASE("classify and exit codes") {
  const auto dir = scratch("classify");
  auto r = run({"classify", "--k1", "0.5", "--k2", "0.5", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "Case_iv_weak\n");
  CHECK(fs::exists(dir / "classify.json"));
  CHECK(fs::exists(dir / "run_config.json"));

  CHECK(run({}).code == 2);
  CHECK(run({"classify", "--bogus"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"classify", "--k1", "-1", "--out", dir.string()}).code == 2);
}

TEST_CASE("front outputs are bitwise reproducible from the persisted config") {
  const auto d1 = scratch("front1"), d2 = scratch("front2");
  REQUIRE(run({"front", "solve", "--c", "3.0", "--out", d1.string()}).code == 0);
  const auto saved = d1 / "run_config.json";
  const auto copy = scratch("front_cfg.json");
  fs::copy_file(saved, copy);
  REQUIRE(run({"front", "--config", copy.string(), "--out", d2.string()}).code == 0);
  CHECK(read_file(d1 / "front.csv") == read_file(d2 / "front.csv"));
  CHECK(read_file(d1 / "tails.json") == read_file(d2 / "tails.json"));

  // flags override config keys
  const auto d3 = scratch("front3");
  REQUIRE(run({"front", "--config", copy.string(), "--c", "2.5", "--out", d3.string()}).code == 0);
  CHECK(Json::parse(read_file(d3 / "tails.json"))["c"].get<double>() == 2.5);
  CHECK(run({"front", "unsolve", "--out", d3.string()}).code == 2);
}

TEST_CASE("environment variable sets the output directory") {
  const auto dir = scratch("env");
  setenv("LVFRONT_OUTPUT_DIR", dir.string().c_str(), 1);
  const auto r = run({"classify"});
  unsetenv("LVFRONT_OUTPUT_DIR");
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "classify.json"));
}

TEST_CASE("pipeline subcommands and plot scripts") {
  const auto dir = scratch("pipeline");
  const std::string out = dir.string();
  CHECK(run({"front", "--out", out}).code == 0);
  CHECK(run({"odefree", "--out", out}).code == 0);
  CHECK(run({"supersub", "--selector", "110", "--out", out}).code == 0);
  const std::vector<std::string> small{"--L", "60", "--nx", "601", "--dt", "0.02", "--out", out};
  auto sim = std::vector<std::string>{"simulate", "--t-start", "-5", "--t-end", "5"};
  sim.insert(sim.end(), small.begin(), small.end());
  CHECK(run(sim).code == 0);
  auto ent = std::vector<std::string>{"entire", "--n", "4,8,16", "--window-start", "-2", "--window-end", "4",
                                      "--second-order"};
  ent.insert(ent.end(), small.begin(), small.end());
  const auto e = run(ent);
  CHECK(e.code == 0);
  CHECK(e.out.find("(decreasing)") != std::string::npos);
  const auto gaps = Json::parse(read_file(dir / "gaps.json"));
  CHECK(gaps["cauchy_gaps"].size() == 2);
  ent[0] = "check42";
  CHECK(run(ent).code == 1);  // backward decay has no rate for this family

  const auto tail = run({"plot", "--kind", "tail", "--artifacts", out + "/front.csv," + out + "/tails.json", "--out", out});
  CHECK(tail.code == 0);
  CHECK(fs::exists(dir / "plot_tail.gp"));
  CHECK(read_file(dir / "plot_tail.gp").find("logscale") != std::string::npos);
  CHECK(run({"plot", "--kind", "sandwich", "--artifacts", out + "/sandwich.csv", "--out", out}).code == 0);
  CHECK(run({"plot", "--kind", "front", "--artifacts", out + "/absent.csv", "--out", out}).code == 1);
  CHECK_THROWS_AS(emit_plot_script({dir / "sandwich.csv"}, PlotKind::Tail), Error);
}
