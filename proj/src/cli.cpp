#include "mpfluct/cli.hpp"

#include "mpfluct/chebyshev.hpp"
#include "mpfluct/config.hpp"
#include "mpfluct/errors.hpp"
#include "mpfluct/suites.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace mpfluct::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string results_csv(const montecarlo::ResultTable& table) {
  std::string out = "statistic,estimate,std_error,reference,verdict\r\n";
  for (const auto& row : table.rows) {
    out += csv_field(row.statistic) + ',' + format_double(row.estimate) + ',' + format_double(row.std_error) + ',' +
           (row.reference ? format_double(*row.reference) : std::string()) + ',' + csv_field(row.verdict) + "\r\n";
  }
  return out;
}

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> threads;
};

class Session {
 public:
  Session(std::string subcommand, fs::path dir) : subcommand_(std::move(subcommand)), dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw ConfigError((dir_ / name).string(), "cannot write output file");
    out << content;
    files_.push_back({{"name", name}, {"fnv1a64", hex(fnv1a64(content))}, {"bytes", content.size()}});
  }

  void finish(const json& config, bool passed, double seconds) {
    json manifest = {{"artifact", "mpfluct"},
                     {"version", kVersion},
                     {"subcommand", subcommand_},
                     {"config", config},
                     {"wall_clock_seconds", seconds},
                     {"verdicts", {{subcommand_, passed ? "pass" : "fail"}}},
                     {"files", files_}};
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
  }

  const fs::path& dir() const { return dir_; }

 private:
  static std::string hex(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
  }

  std::string subcommand_;
  fs::path dir_;
  json files_ = json::array();
};

montecarlo::ExperimentConfig resolve_config(const Options& opt) {
  auto cfg = opt.config_path.empty() ? montecarlo::ExperimentConfig{} : config::load(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  cfg.validate();
  return cfg;
}

fs::path resolve_out(const Options& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("MPFLUCT_OUT"); env && *env) return env;
  return "mpfluct-out";
}

json table_json(const montecarlo::ResultTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"statistic", r.statistic},
                    {"estimate", r.estimate},
                    {"std_error", r.std_error},
                    {"reference", r.reference ? json(*r.reference) : json(nullptr)},
                    {"verdict", r.verdict}});
  }
  return {{"kind", table.kind}, {"rows", rows}, {"notes", table.notes}, {"aborted_replicates", table.aborted},
          {"passed", table.passed()}};
}

void print_table(const montecarlo::ResultTable& table) {
  std::cout << table.kind << " results\n";
  for (const auto& r : table.rows) {
    std::cout << "  " << std::left << std::setw(44) << r.statistic << ' ' << std::setw(14) << std::setprecision(6)
              << r.estimate << " +- " << std::setw(12) << r.std_error;
    if (r.reference) std::cout << " ref " << std::setw(12) << *r.reference;
    std::cout << "  " << r.verdict << '\n';
  }
  for (const auto& note : table.notes) std::cout << "  note: " << note << '\n';
  if (table.aborted) std::cout << "  aborted replicates: " << table.aborted << '\n';
  std::cout << (table.passed() ? "PASS" : "FAIL") << '\n';
}

int run_table(const std::string& name, const Options& opt,
              montecarlo::ResultTable (*run)(const montecarlo::ExperimentConfig&)) {
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = resolve_config(opt);
  const auto table = run(cfg);
  Session session(name, resolve_out(opt));
  const json config = config::to_json(cfg);
  session.write("results.csv", results_csv(table));
  json results = table_json(table);
  results["config"] = config;
  results["version"] = kVersion;
  session.write("results.json", results.dump(2) + "\n");
  print_table(table);
  session.finish(config, table.passed(), std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return table.passed() ? kPass : kVerdictFail;
}

int run_checks(const std::string& name, const Options& opt, const std::vector<suites::Check>& checks,
               const std::string& extra_name = {}, const std::string& extra = {}) {
  Session session(name, resolve_out(opt));
  bool passed = true;
  double seconds = 0;
  std::string csv = "check,verdict,seconds,detail\r\n";
  for (const auto& c : checks) {
    passed = passed && c.passed;
    seconds += c.seconds;
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << std::fixed << std::setprecision(2) << c.seconds
              << " s): " << c.detail << '\n';
    csv += csv_field(c.name) + ',' + (c.passed ? "pass" : "fail") + ',' + format_double(c.seconds) + ',' +
           csv_field(c.detail) + "\r\n";
  }
  std::cout.unsetf(std::ios::fixed);
  session.write("checks.csv", csv);
  if (!extra_name.empty()) session.write(extra_name, extra);
  session.finish(opt.config_path.empty() ? json(nullptr) : config::to_json(resolve_config(opt)), passed, seconds);
  std::cout << (passed ? "PASS" : "FAIL") << '\n';
  return passed ? kPass : kVerdictFail;
}

std::string coefficient_csv(const Rational& y) {
  const auto tri = chebyshev::coeff_triangles(16, y);
  std::string out = "k,m,num,den\r\n";
  for (int k = 0; k <= 16; ++k) {
    for (int m = 0; m <= k; ++m) {
      const Rational& g = tri.gamma_inverse.at(k, m);
      out += std::to_string(k) + ',' + std::to_string(m) + ',' + g.get_num().get_str() + ',' + g.get_den().get_str() + "\r\n";
    }
  }
  return out;
}

int run_betas(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = resolve_config(opt);
  Session session("betas", resolve_out(opt));
  bool passed = true;
  ensembles::GrowthReport report;
  if (cfg.structure.kind == ensembles::StructureKind::Custom) {
    const auto d = ensembles::make_structure(cfg.structure, cfg.rows(), cfg.cols());
    report.rows.push_back({cfg.n, d.s(), d.t(), ensembles::beta_stats(d)});
  } else {
    report = montecarlo::hypothesis_report(cfg);
  }
  for (const auto& row : report.rows) {
    const auto& b = row.betas;
    const bool ok = b.beta3 <= b.beta2 && b.beta1 <= std::max(row.s, row.t) * b.beta2;
    passed = passed && ok;
    std::cout << "n=" << row.n << " s=" << row.s << " t=" << row.t << " beta0=" << b.beta0 << " beta1=" << b.beta1
              << " beta2=" << b.beta2 << " beta3=" << b.beta3 << (ok ? "" : "  inequality FAILED") << '\n';
  }
  std::cout << "slopes: beta0 " << report.slope[0] << ", beta1 " << report.slope[1] << ", beta2 " << report.slope[2]
            << ", beta3 " << report.slope[3] << '\n';
  std::cout << "moment hypotheses: " << ensembles::hypothesis_name(report.moments_hypothesis) << '\n';
  std::cout << "gaussian hypothesis (a): " << ensembles::hypothesis_name(report.gaussian_hypothesis) << '\n';
  std::cout << "diagonalization hypothesis (b): " << ensembles::hypothesis_name(report.diagonal_hypothesis) << '\n';
  session.write("betas.csv", report.to_csv());
  std::cout << (passed ? "PASS" : "FAIL") << '\n';
  session.finish(config::to_json(cfg), passed, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return passed ? kPass : kVerdictFail;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path, "JSON experiment configuration");
  sub->add_option("--seed", opt.seed, "master seed (overrides the config)");
  sub->add_option("--out", opt.out_dir, "output directory (default $MPFLUCT_OUT or ./mpfluct-out)");
  sub->add_option("--threads", opt.threads, "worker thread hint; results do not depend on it")->check(CLI::NonNegativeNumber);
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Fluctuations of sample covariance matrices with dependent entries"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options opt;
  auto* combinatorics = app.add_subcommand("combinatorics", "exact partition and Chebyshev identity suite");
  auto* betas = app.add_subcommand("betas", "dependence statistics and growth report");
  auto* moments = app.add_subcommand("moments", "limit moment check of the mean spectral measure");
  auto* clt = app.add_subcommand("clt", "replicate statistics, covariances and higher cumulants");
  auto* covdiag = app.add_subcommand("covdiag", "covariance diagonalization check");
  auto* selftest = app.add_subcommand("selftest", "all exact-arithmetic suites");
  for (auto* sub : {combinatorics, betas, moments, clt, covdiag, selftest}) add_common(sub, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*combinatorics) {
      const Rational y = opt.config_path.empty() ? Rational(1) : resolve_config(opt).y();
      return run_checks("combinatorics", opt, suites::combinatorics_suite(), "coefficients.csv", coefficient_csv(y));
    }
    if (*selftest) {
      auto checks = suites::combinatorics_suite();
      for (auto& c : suites::structure_suite()) checks.push_back(std::move(c));
      return run_checks("selftest", opt, checks);
    }
    if (*betas) return run_betas(opt);
    if (*moments) return run_table("moments", opt, montecarlo::mp_moment_check);
    if (*clt) return run_table("clt", opt, montecarlo::run_clt_experiment);
    if (*covdiag) return run_table("covdiag", opt, montecarlo::covariance_diag_check);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace mpfluct::cli
