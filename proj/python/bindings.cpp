#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mpfluct/chebyshev.hpp"
#include "mpfluct/cli.hpp"
#include "mpfluct/config.hpp"
#include "mpfluct/ensembles.hpp"
#include "mpfluct/errors.hpp"
#include "mpfluct/montecarlo.hpp"
#include "mpfluct/partitions.hpp"

#include <iostream>
#include <sstream>

namespace py = pybind11;
using namespace mpfluct;

namespace {

// Rationals cross the boundary as strings like "-3/4"; the Python package
// wraps them in fractions.Fraction.
Rational arg(const std::string& text) { return parse_rational(text); }

std::vector<std::string> strings(const std::vector<Rational>& values) {
  std::vector<std::string> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

std::vector<std::vector<std::string>> rows_of(const chebyshev::CoeffTriangle& tri) {
  std::vector<std::vector<std::string>> out;
  for (int k = 0; k <= tri.order(); ++k) {
    std::vector<std::string> row;
    for (int m = 0; m <= k; ++m) row.push_back(to_string(tri.at(k, m)));
    out.push_back(std::move(row));
  }
  return out;
}

py::dict table_dict(const montecarlo::ResultTable& table) {
  py::list rows;
  for (const auto& r : table.rows) {
    py::dict row;
    row["statistic"] = r.statistic;
    row["estimate"] = r.estimate;
    row["std_error"] = r.std_error;
    row["reference"] = r.reference ? py::object(py::float_(*r.reference)) : py::object(py::none());
    row["verdict"] = r.verdict;
    rows.append(row);
  }
  py::dict out;
  out["kind"] = table.kind;
  out["rows"] = rows;
  out["notes"] = table.notes;
  out["aborted"] = table.aborted;
  out["passed"] = table.passed();
  return out;
}

montecarlo::ResultTable run_experiment(const std::string& kind, const std::string& config_json) {
  const auto cfg = config::parse(config_json, "config");
  py::gil_scoped_release release;
  if (kind == "clt") return montecarlo::run_clt_experiment(cfg);
  if (kind == "covdiag") return montecarlo::covariance_diag_check(cfg);
  if (kind == "moments") return montecarlo::mp_moment_check(cfg);
  throw DomainError("unknown experiment '" + kind + "' (expected clt, covdiag or moments)");
}

py::dict betas_of(const std::string& config_json) {
  const auto cfg = config::parse(config_json, "config");
  const auto d = ensembles::make_structure(cfg.structure, cfg.rows(), cfg.cols());
  const auto b = ensembles::beta_stats(d);
  py::dict out;
  out["s"] = cfg.rows();
  out["t"] = cfg.cols();
  out["beta0"] = b.beta0;
  out["beta1"] = b.beta1;
  out["beta2"] = b.beta2;
  out["beta3"] = b.beta3;
  return out;
}

py::tuple run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mpfluct");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream captured;
  auto* previous = std::cout.rdbuf(captured.rdbuf());
  int code = 0;
  try {
    code = cli::cli_main(static_cast<int>(argv.size()), argv.data());
  } catch (...) {
    std::cout.rdbuf(previous);
    throw;
  }
  std::cout.rdbuf(previous);
  return py::make_tuple(code, captured.str());
}

}  // namespace

PYBIND11_MODULE(_mpfluct, m) {
  m.doc() = "Partition calculus and Monte Carlo checks for trace fluctuations of sample covariance matrices.";
  m.attr("version") = cli::kVersion;

  // translators run newest first, so the base class goes in first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SizeLimitError>(m, "SizeLimitError", PyExc_ValueError);

  m.def("chebyshev_t", [](int k) { return strings(chebyshev::chebyshev_T(k).coefficients()); }, py::arg("k"),
        "Coefficients of the monic Chebyshev polynomial T_k, lowest power first.");
  m.def("gamma_poly", [](int k, const std::string& y) { return strings(chebyshev::gamma_poly(k, arg(y)).coefficients()); },
        py::arg("k"), py::arg("y"));
  m.def("gamma_scaled",
        [](int k, const std::string& y, const std::string& sigma2) {
          return strings(chebyshev::gamma_scaled(k, arg(y), arg(sigma2)).coefficients());
        },
        py::arg("k"), py::arg("y"), py::arg("sigma2"));
  m.def("coeff_triangles",
        [](int order, const std::string& y) {
          const auto tri = chebyshev::coeff_triangles(order, arg(y));
          return py::make_tuple(rows_of(tri.gamma), rows_of(tri.gamma_inverse));
        },
        py::arg("order"), py::arg("y"), "Lower-triangular rows of the coefficient matrix and its inverse.");
  m.def("g_closed_form", [](int k, int m_, const std::string& y) { return to_string(chebyshev::g_closed_form(k, m_, arg(y))); },
        py::arg("k"), py::arg("m"), py::arg("y"));
  m.def("mp_moment",
        [](int k, const std::string& kappa, const std::string& mu, const std::string& sigma2) {
          return to_string(chebyshev::mp_moment(k, arg(kappa), arg(mu), arg(sigma2)));
        },
        py::arg("k"), py::arg("kappa"), py::arg("mu"), py::arg("sigma2"));

  m.def("nhpp_count", &partitions::nhpp_count, py::arg("k"), py::arg("m"), py::arg("j"));
  m.def("a_coefficient", &partitions::a_coefficient, py::arg("k1"), py::arg("k2"), py::arg("m"), py::arg("j"));

  m.def("beta_stats", &betas_of, py::arg("config_json"));
  m.def("un_exact_m1",
        [](const std::string& config_json, int k_total) {
          return to_string(montecarlo::un_exact_m1(config::parse(config_json, "config"), k_total).value);
        },
        py::arg("config_json"), py::arg("k_total") = 2);
  m.def("run_experiment", [](const std::string& kind, const std::string& config_json) {
          return table_dict(run_experiment(kind, config_json));
        },
        py::arg("kind"), py::arg("config_json"));
  m.def("cli_main", &run_cli, py::arg("args"), "Runs the command line tool; returns (exit code, stdout).");
}
