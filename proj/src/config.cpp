#include "mpfluct/config.hpp"

#include "mpfluct/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace mpfluct::config {

using montecarlo::ExperimentConfig;
using nlohmann::json;

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ConfigError(source_ + ": " + field, what);
  }

  void expect_keys(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.count(key)) fail(prefix.empty() ? key : prefix + "." + key, "unknown field");
    }
  }

  Rational rational(const json& v, const std::string& field) const {
    try {
      if (v.is_number_integer()) return Rational(std::to_string(v.get<long long>()));
      if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const Error& e) {
      fail(field, e.what());
    }
    fail(field, "expected a rational such as \"1/2\"");
  }

  long long integer(const json& v, const std::string& field, long long lo, long long hi) const {
    if (!v.is_number_integer()) fail(field, "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) fail(field, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::uint64_t seed(const json& v, const std::string& field) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    if (v.is_string()) {
      const auto text = v.get<std::string>();
      std::size_t used = 0;
      try {
        const auto x = std::stoull(text, &used, 10);
        if (used == text.size() && !text.empty() && text[0] != '-') return x;
      } catch (const std::exception&) {
      }
    }
    fail(field, "expected an unsigned 64-bit integer");
  }

  double real(const json& v, const std::string& field) const {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
  }

  std::string text(const json& v, const std::string& field) const {
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
  }

  std::vector<int> int_list(const json& v, const std::string& field, int lo, int hi) const {
    if (!v.is_array()) fail(field, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(static_cast<int>(integer(v[i], field + "[" + std::to_string(i) + "]", lo, hi)));
    }
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

ensembles::StructureSpec read_structure(const Reader& r, const json& v) {
  if (v.is_string()) {
    json obj = {{"kind", v}};
    return read_structure(r, obj);
  }
  r.expect_keys(v, "structure", {"kind", "b", "w", "h", "file"});
  if (!v.contains("kind")) r.fail("structure.kind", "missing");
  const auto kind_text = r.text(v["kind"], "structure.kind");
  ensembles::StructureKind kind;
  try {
    kind = ensembles::parse_structure_kind(kind_text);
  } catch (const DomainError& e) {
    r.fail("structure.kind", e.what());
  }
  switch (kind) {
    case ensembles::StructureKind::Independent: return ensembles::StructureSpec::independent();
    case ensembles::StructureKind::RowPair: return ensembles::StructureSpec::row_pair();
    case ensembles::StructureKind::ColumnBlock:
      return ensembles::StructureSpec::column_block(
          v.contains("b") ? static_cast<int>(r.integer(v["b"], "structure.b", 1, 1 << 20)) : 2);
    case ensembles::StructureKind::DuplicatePatch:
      return ensembles::StructureSpec::duplicate_patch(
          v.contains("w") ? static_cast<int>(r.integer(v["w"], "structure.w", 1, 1 << 20)) : 2,
          v.contains("h") ? static_cast<int>(r.integer(v["h"], "structure.h", 1, 1 << 20)) : 2);
    case ensembles::StructureKind::Custom:
      if (!v.contains("file")) r.fail("structure.file", "custom structures need a file");
      return ensembles::StructureSpec::custom(r.text(v["file"], "structure.file"));
  }
  r.fail("structure.kind", "unsupported");
}

}  // namespace

ExperimentConfig from_json(const json& doc, const std::string& source) {
  const Reader r(source);
  r.expect_keys(doc, "",
                {"n", "s", "t", "kappa", "mu", "sigma2", "structure", "model", "powers", "gamma_orders",
                 "cumulant_orders", "replicates", "seed", "threads", "growth_ns", "moment_tolerance",
                 "covariance_tolerance"});
  ExperimentConfig cfg;
  if (doc.contains("n")) cfg.n = static_cast<int>(r.integer(doc["n"], "n", 1, 1 << 16));
  if (doc.contains("s")) cfg.s = static_cast<int>(r.integer(doc["s"], "s", 1, 1 << 16));
  if (doc.contains("t")) cfg.t = static_cast<int>(r.integer(doc["t"], "t", 1, 1 << 16));
  if (doc.contains("kappa")) cfg.kappa = r.rational(doc["kappa"], "kappa");
  if (doc.contains("mu")) cfg.mu = r.rational(doc["mu"], "mu");
  if (doc.contains("sigma2")) cfg.model.variance = r.rational(doc["sigma2"], "sigma2");
  if (doc.contains("structure")) cfg.structure = read_structure(r, doc["structure"]);
  if (doc.contains("model")) {
    const auto& m = doc["model"];
    if (m.is_string()) {
      try {
        cfg.model.kind = ensembles::parse_model_kind(m.get<std::string>());
      } catch (const DomainError& e) {
        r.fail("model", e.what());
      }
    } else {
      r.expect_keys(m, "model", {"kind", "rho", "marginal"});
      if (!m.contains("kind")) r.fail("model.kind", "missing");
      try {
        cfg.model.kind = ensembles::parse_model_kind(r.text(m["kind"], "model.kind"));
      } catch (const DomainError& e) {
        r.fail("model.kind", e.what());
      }
      if (m.contains("rho")) cfg.model.rho = r.rational(m["rho"], "model.rho");
      if (m.contains("marginal")) {
        try {
          cfg.model.marginal = ensembles::parse_marginal(r.text(m["marginal"], "model.marginal"));
        } catch (const DomainError& e) {
          r.fail("model.marginal", e.what());
        }
      }
    }
  }
  if (doc.contains("powers")) cfg.powers = r.int_list(doc["powers"], "powers", 1, 20);
  if (doc.contains("gamma_orders")) cfg.gamma_orders = r.int_list(doc["gamma_orders"], "gamma_orders", 0, 12);
  if (doc.contains("cumulant_orders")) cfg.cumulant_orders = r.int_list(doc["cumulant_orders"], "cumulant_orders", 1, 6);
  if (doc.contains("replicates")) cfg.replicates = static_cast<int>(r.integer(doc["replicates"], "replicates", 2, 10'000'000));
  if (doc.contains("seed")) cfg.seed = r.seed(doc["seed"], "seed");
  if (doc.contains("threads")) cfg.threads = static_cast<int>(r.integer(doc["threads"], "threads", 0, 1024));
  if (doc.contains("growth_ns")) cfg.growth_ns = r.int_list(doc["growth_ns"], "growth_ns", 1, 1 << 16);
  if (doc.contains("moment_tolerance")) cfg.moment_tolerance = r.real(doc["moment_tolerance"], "moment_tolerance");
  if (doc.contains("covariance_tolerance"))
    cfg.covariance_tolerance = r.real(doc["covariance_tolerance"], "covariance_tolerance");
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json structure = {{"kind", ensembles::kind_name(cfg.structure.kind)}};
  switch (cfg.structure.kind) {
    case ensembles::StructureKind::ColumnBlock: structure["b"] = cfg.structure.block; break;
    case ensembles::StructureKind::DuplicatePatch:
      structure["w"] = cfg.structure.patch_width;
      structure["h"] = cfg.structure.patch_height;
      break;
    case ensembles::StructureKind::Custom: structure["file"] = cfg.structure.file; break;
    default: break;
  }
  json model = {{"kind", ensembles::model_name(cfg.model.kind)},
                {"rho", to_string(cfg.model.rho)},
                {"marginal", ensembles::marginal_name(cfg.model.marginal)}};
  json out = {{"n", cfg.n},
              {"kappa", to_string(cfg.kappa)},
              {"mu", to_string(cfg.mu)},
              {"sigma2", to_string(cfg.model.variance)},
              {"structure", structure},
              {"model", model},
              {"powers", cfg.powers},
              {"gamma_orders", cfg.gamma_orders},
              {"cumulant_orders", cfg.cumulant_orders},
              {"replicates", cfg.replicates},
              {"seed", cfg.seed},
              {"threads", cfg.threads},
              {"growth_ns", cfg.growth_ns},
              {"moment_tolerance", cfg.moment_tolerance},
              {"covariance_tolerance", cfg.covariance_tolerance}};
  if (cfg.s > 0) out["s"] = cfg.s;
  if (cfg.t > 0) out["t"] = cfg.t;
  return out;
}

ExperimentConfig parse(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": byte " + std::to_string(e.byte), "malformed JSON");
  }
  return from_json(doc, source);
}

ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

}  // namespace mpfluct::config
