#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpfluct/cli.hpp"
#include "mpfluct/config.hpp"
#include "mpfluct/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace mpfluct;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mpfluct-cli-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "mpfluct");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const auto path = dir / "config.json";
  std::ofstream(path) << doc.dump(2);
  return path;
}

std::string config_error_where(const std::string& text) {
  try {
    config::parse(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "no error";
}

}  // namespace

TEST_CASE("config: parse, defaults and round trip") {
  const auto cfg = config::parse(R"({
    "n": 32, "kappa": "1/2", "mu": 1, "sigma2": "3/2",
    "structure": {"kind": "duplicate_patch", "w": 2, "h": 3},
    "model": {"kind": "class_correlated", "rho": "-1/7"},
    "powers": [1, 3], "gamma_orders": [1, 2], "replicates": 250, "seed": "18446744073709551615"
  })");
  CHECK(cfg.n == 32);
  CHECK(cfg.kappa == Rational(1, 2));
  CHECK(cfg.sigma2() == Rational(3, 2));
  CHECK(cfg.structure == ensembles::StructureSpec::duplicate_patch(2, 3));
  CHECK(cfg.model.kind == ensembles::ModelKind::ClassCorrelated);
  CHECK(cfg.model.rho == Rational(-1, 7));
  CHECK(cfg.seed == 18446744073709551615ULL);
  CHECK(cfg.cumulant_orders == std::vector<int>{3, 4});
  CHECK(config::from_json(config::to_json(cfg)) == cfg);

  const auto plain = config::parse(R"({"structure": "row_pair", "model": "rademacher"})");
  CHECK(plain.structure == ensembles::StructureSpec::row_pair());
  CHECK(plain.model.kind == ensembles::ModelKind::Rademacher);
  CHECK(config::from_json(config::to_json(plain)) == plain);
  CHECK(config::from_json(config::to_json(montecarlo::ExperimentConfig{})) == montecarlo::ExperimentConfig{});
}

TEST_CASE("config: errors name the field") {
  CHECK(config_error_where(R"({"n": 0})") == "cfg.json: n");
  CHECK(config_error_where(R"({"kappa": "1/0"})") == "cfg.json: kappa");
  CHECK(config_error_where(R"({"kappa": "abc"})") == "cfg.json: kappa");
  CHECK(config_error_where(R"({"colour": 1})") == "cfg.json: colour");
  CHECK(config_error_where(R"({"model": {"kind": "cauchy"}})") == "cfg.json: model.kind");
  CHECK(config_error_where(R"({"structure": {"kind": "column_block", "b": 0}})") == "cfg.json: structure.b");
  CHECK(config_error_where(R"({"powers": [1, "x"]})") == "cfg.json: powers[1]");
  CHECK(config_error_where("{ not json").rfind("cfg.json", 0) == 0);
  CHECK_THROWS_AS(config::load("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("csv formatting") {
  CHECK(cli::format_double(0.1) == "0.10000000000000001");
  CHECK(cli::format_double(2.0) == "2");
  CHECK(cli::format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(cli::format_double(-1e-300) == "-1e-300");
  CHECK(cli::csv_field("plain") == "plain");
  CHECK(cli::csv_field("a,b") == "\"a,b\"");
  CHECK(cli::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");

  montecarlo::ResultTable t;
  t.rows.push_back({"var tr(W^1)", 1.5, 0.25, 2.0, "pass"});
  t.rows.push_back({"mean x", 0.0, 0.0, std::nullopt, "info"});
  CHECK(cli::results_csv(t) ==
        "statistic,estimate,std_error,reference,verdict\r\nvar tr(W^1),1.5,0.25,2,pass\r\nmean x,0,0,,info\r\n");
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(cli::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(cli::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(cli::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("cli: usage and config errors exit with code 2") {
  const auto dir = scratch("errors");
  CHECK(run({}) == cli::kConfigError);
  CHECK(run({"frobnicate"}) == cli::kConfigError);
  CHECK(run({"clt", "--config", (dir / "missing.json").string(), "--out", dir.string()}) == cli::kConfigError);
  const auto bad = write_config(dir, json{{"n", 16}, {"replicates", 10}});
  CHECK(run({"clt", "--config", bad.string(), "--out", dir.string()}) == cli::kConfigError);
  CHECK(run({"--version"}) == cli::kPass);
}

TEST_CASE("cli: selftest and combinatorics write their tables") {
  const auto dir = scratch("suites");
  CHECK(run({"selftest", "--out", dir.string()}) == cli::kPass);
  CHECK(fs::exists(dir / "checks.csv"));
  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["subcommand"] == "selftest");
  CHECK(manifest["verdicts"]["selftest"] == "pass");
  CHECK(manifest["version"] == cli::kVersion);

  const auto comb = scratch("combinatorics");
  CHECK(run({"combinatorics", "--out", comb.string()}) == cli::kPass);
  const auto coeffs = slurp(comb / "coefficients.csv");
  CHECK(coeffs.rfind("k,m,num,den\r\n", 0) == 0);
  CHECK(coeffs.find("\r\n1,0,2,1\r\n") != std::string::npos);  // g_{1,0} = 1 + y at y = 1
}

TEST_CASE("cli: moments writes results and a manifest with hashes") {
  const auto dir = scratch("moments");
  const auto cfg = write_config(dir, json{{"n", 64}, {"replicates", 100}, {"powers", {1, 2, 3}}});
  CHECK(run({"moments", "--config", cfg.string(), "--out", dir.string()}) == cli::kPass);
  const auto csv = slurp(dir / "results.csv");
  CHECK(csv.find("moment 3,") != std::string::npos);
  CHECK(csv.find(",5,pass\r\n") != std::string::npos);

  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  bool listed = false;
  for (const auto& f : manifest["files"]) {
    const auto content = slurp(dir / f["name"].get<std::string>());
    CHECK(f["bytes"] == content.size());
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << cli::fnv1a64(content);
    CHECK(f["fnv1a64"] == hex.str());
    listed |= f["name"] == "results.csv";
  }
  CHECK(listed);

  // the echoed config re-parses to the same experiment
  const auto results = json::parse(slurp(dir / "results.json"));
  CHECK(config::from_json(results["config"]) == config::load(cfg.string()));
}

TEST_CASE("cli: out directory falls back to the environment") {
  const auto dir = scratch("env");
  const auto cfg = write_config(dir, json{{"n", 8}, {"structure", "column_block"}, {"growth_ns", {8, 16, 32}}});
  ::setenv("MPFLUCT_OUT", (dir / "from-env").c_str(), 1);
  const int code = run({"betas", "--config", cfg.string()});
  ::unsetenv("MPFLUCT_OUT");
  CHECK(code == cli::kPass);
  const auto csv = slurp(dir / "from-env" / "betas.csv");
  CHECK(csv.rfind("n,beta0,beta1,beta2,beta3", 0) == 0);
}

TEST_CASE("cli: covdiag on a structure violating the growth hypothesis exits 0 with the flag") {
  const auto dir = scratch("covdiag");
  const auto cfg = write_config(dir, json{{"n", 16},
                                          {"replicates", 200},
                                          {"powers", json::array()},
                                          {"gamma_orders", {1, 2}},
                                          {"structure", {{"kind", "column_block"}, {"b", 2}}},
                                          {"model", "class_constant"}});
  CHECK(run({"covdiag", "--config", cfg.string(), "--out", dir.string()}) == cli::kPass);
  const auto results = json::parse(slurp(dir / "results.json"));
  bool flagged = false;
  for (const auto& note : results["notes"]) flagged |= note == "diagonalization hypothesis (b): VIOLATED";
  CHECK(flagged);
}

TEST_CASE("cli: clt output does not depend on the thread hint") {
  const auto dir = scratch("threads");
  const auto cfg = write_config(dir, json{{"n", 16}, {"replicates", 200}, {"powers", {1, 2}}, {"gamma_orders", {1}}});
  CHECK(run({"clt", "--config", cfg.string(), "--threads", "1", "--out", (dir / "a").string()}) == cli::kPass);
  CHECK(run({"clt", "--config", cfg.string(), "--threads", "8", "--out", (dir / "b").string()}) == cli::kPass);
  CHECK(run({"clt", "--config", cfg.string(), "--seed", "5", "--out", (dir / "c").string()}) == cli::kPass);
  const auto a = slurp(dir / "a" / "results.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "b" / "results.csv"));
  CHECK(a != slurp(dir / "c" / "results.csv"));
  fs::remove_all(dir.parent_path());
}
