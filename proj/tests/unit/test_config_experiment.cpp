#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fracdecay/experiment.hpp"

using namespace fracdecay;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kHeatConfig = R"(# quick heat run
[experiment]
name = heat_test
operator = laplacian
n = 49
lambda1 = 0
dt = 1e-3
T = 0.5
record_every = 5
seed = 3
)";

}  // namespace

TEST_CASE("config parsing") {
  auto kv = parse_config_text(kHeatConfig);
  CHECK(kv.at("name") == "heat_test");
  CHECK(kv.at("dt") == "1e-3");
  SUBCASE("comments and blank lines are ignored") {
    auto kv2 = parse_config_text("a = 1\n\n# note\nb = 2 # trailing\n");
    CHECK(kv2.at("a") == "1");
    CHECK(kv2.at("b") == "2");
  }
  SUBCASE("malformed lines are rejected") {
    CHECK_THROWS_AS(parse_config_text("novalue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[unknown]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("a = \n"), ConfigError);
  }
}

TEST_CASE("lambda invariant is reported by name") {
  auto kv = parse_config_text(kHeatConfig);
  kv["lambda1"] = "0.3";
  kv["lambda2"] = "0.3";
  try {
    build_experiment(kv);
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("lambda1 + lambda2 = 1") !=
          std::string::npos);
  }
}

TEST_CASE("lambda2 defaults to the complement") {
  auto kv = parse_config_text(kHeatConfig);
  kv["lambda1"] = "0.25";
  kv.erase("lambda2");
  auto ex = build_experiment(kv);
  CHECK(ex.sim.td.lambda2 == doctest::Approx(0.75));
}

TEST_CASE("stability violations surface as config errors") {
  auto kv = parse_config_text(kHeatConfig);
  kv["operator"] = "p_laplacian";
  kv["p"] = "3";
  kv["dt"] = "1e-2";
  auto ex = build_experiment(kv);  // build is fine, run rejects
  try {
    run_simulate(ex);
    FAIL("expected stability rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("stability") != std::string::npos);
  }
}

TEST_CASE("range expansion is a cartesian product") {
  KeyValues kv{{"a", "{1,2}"}, {"b", "x"}, {"c", "{u,v,w}"}};
  auto cells = expand_ranges(kv);
  CHECK(cells.size() == 6);
  CHECK(ranged_keys(kv) == std::vector<std::string>{"a", "c"});
  for (const auto& cell : cells) CHECK(cell.at("b") == "x");
  CHECK_THROWS_AS(expand_ranges(KeyValues{{"a", "{}"}}), ConfigError);
}

TEST_CASE("simulate experiment writes deterministic artifacts") {
  const fs::path tmp = fs::temp_directory_path() / "fracdecay_test_sim";
  fs::remove_all(tmp);
  auto kv = parse_config_text(kHeatConfig);
  kv["outdir"] = (tmp / "run1").string();
  auto out1 = run_simulate(build_experiment(kv));
  CHECK(out1.exit_code == 0);
  kv["outdir"] = (tmp / "run2").string();
  auto out2 = run_simulate(build_experiment(kv));

  const auto csv1 = slurp(tmp / "run1" / "heat_test" / "trace.csv");
  const auto csv2 = slurp(tmp / "run2" / "heat_test" / "trace.csv");
  CHECK(csv1 == csv2);  // byte-identical for identical config + seed
  CHECK(csv1.substr(0, csv1.find('\n')) == "t,s,norm,predicted_bound,ratio");

  const auto rep = slurp(tmp / "run1" / "heat_test" / "report.txt");
  CHECK(rep.find("predicted_kind = exponential") != std::string::npos);
  CHECK(rep.find("fit_kind = exponential") != std::string::npos);
  CHECK(rep.find("bound_holds = true") != std::string::npos);
  fs::remove_all(tmp);
}

TEST_CASE("fit command reads back a written trace") {
  const fs::path tmp = fs::temp_directory_path() / "fracdecay_test_fit";
  fs::remove_all(tmp);
  auto kv = parse_config_text(kHeatConfig);
  kv["outdir"] = tmp.string();
  run_simulate(build_experiment(kv));
  auto out = run_fit((tmp / "heat_test" / "trace.csv").string(), 2.0);
  CHECK(out.exit_code == 0);
  CHECK(out.summary.find("fit_kind = exponential") != std::string::npos);
  CHECK_THROWS_AS(run_fit((tmp / "absent.csv").string(), 2.0), ConfigError);
  fs::remove_all(tmp);
}

TEST_CASE("barrier command produces the csv and exit code") {
  const fs::path tmp = fs::temp_directory_path() / "fracdecay_test_barrier";
  fs::remove_all(tmp);
  BarrierParams p;
  p.kind = "mixed";
  p.alpha = 0.5;
  p.gamma = 2.0;
  p.u0 = 1.0;
  p.v0 = 0.8;
  p.t_final = 5.0;
  p.dt = 1e-3;
  p.outdir = tmp.string();
  auto out = run_barrier(p);
  CHECK(out.exit_code == 0);
  const auto csv = slurp(tmp / "barrier.csv");
  CHECK(csv.substr(0, csv.find('\n')) == "t,w,v");
  fs::remove_all(tmp);
}

TEST_CASE("verify command: single identity and unknown name") {
  const fs::path tmp = fs::temp_directory_path() / "fracdecay_test_verify";
  fs::remove_all(tmp);
  auto out = run_verify("st00", 5000, 1, tmp.string());
  CHECK(out.exit_code == 0);
  CHECK(slurp(tmp / "report.txt").find("identity st00") != std::string::npos);
  CHECK_THROWS_AS(run_verify("bogus", 100, 1, tmp.string()),
                  std::invalid_argument);
  fs::remove_all(tmp);
}

TEST_CASE("mini sweep: cells expand, summary matches predictions") {
  const fs::path tmp = fs::temp_directory_path() / "fracdecay_test_sweep";
  fs::remove_all(tmp);
  KeyValues kv = parse_config_text(kHeatConfig);
  kv["name"] = "mini";
  kv["lambda1"] = "{0,1}";
  kv["alpha"] = "0.5";
  kv["n"] = "29";
  kv["dt"] = "5e-3";
  kv["T"] = "20";
  kv["record_every"] = "20";
  kv["outdir"] = tmp.string();
  auto out = run_sweep(kv);
  CHECK(out.exit_code == 0);
  const auto csv = slurp(tmp / "mini" / "summary.csv");
  CHECK(csv.find("mini_lambda1=0") != std::string::npos);
  CHECK(csv.find("mini_lambda1=1") != std::string::npos);
  // the dichotomy shows up in the kind columns
  CHECK(csv.find("exponential,") != std::string::npos);
  CHECK(csv.find("polynomial,") != std::string::npos);
  CHECK_THROWS_AS(run_sweep(parse_config_text(kHeatConfig)), ConfigError);
  fs::remove_all(tmp);
}

TEST_CASE("blow-up surfaces as exit code 2 with a partial trace") {
  const fs::path tmp = fs::temp_directory_path() / "fracdecay_test_blowup";
  fs::remove_all(tmp);
  KeyValues kv{{"name", "boom"},       {"operator", "porous_medium_1"},
               {"sigma", "0.45"},      {"m", "3"},
               {"n", "49"},            {"lambda1", "0"},
               {"u0", "bump"},         {"u0_scale", "10000"},
               {"dt", "5e-3"},         {"T", "5"},
               {"record_every", "1"},  {"outdir", tmp.string()}};
  auto out = run_simulate(build_experiment(kv));
  CHECK(out.exit_code == 2);
  const auto rep = slurp(tmp / "boom" / "report.txt");
  CHECK(rep.find("blow_up = step=") != std::string::npos);
  CHECK(rep.find("exit_code = 2") != std::string::npos);
  fs::remove_all(tmp);
}

TEST_CASE("sweep outputs do not depend on the worker count") {
  const fs::path tmp = fs::temp_directory_path() / "fracdecay_test_threads";
  fs::remove_all(tmp);
  KeyValues kv = parse_config_text(kHeatConfig);
  kv["name"] = "par";
  kv["n"] = "29";
  kv["dt"] = "5e-3";
  kv["T"] = "1";
  kv["alpha"] = "{0.4,0.6}";
  kv["lambda1"] = "{0,1}";
  std::string csvs[2];
  int i = 0;
  for (const char* threads : {"1", "4"}) {
    setenv("FRACDECAY_THREADS", threads, 1);
    kv["outdir"] = (tmp / threads).string();
    run_sweep(kv);
    csvs[i++] = slurp(tmp / threads / "par" / "summary.csv");
  }
  unsetenv("FRACDECAY_THREADS");
  CHECK(csvs[0] == csvs[1]);
  fs::remove_all(tmp);
}
