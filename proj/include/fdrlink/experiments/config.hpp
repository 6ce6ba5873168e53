#pragma once

// JSON experiment configuration, schema version 1.
//
//   {
//     "schema_version": 1,
//     "preset": "E1"                      (or the explicit fields below)
//     "name": "my_run",
//     "generator": {"type": "iid_uniform", "n0": 100, "n1": 1000},
//     "adversary": {"type": "informed"},  (optional)
//     "procedure": "step_up",
//     "alpha_grid": [0.05, 0.1],
//     "gamma_grid": [0.25],               (optional)
//     "reps": 10000, "master_seed": 7, "workers": 0, "out_dir": "results"
//   }
//
// Unknown keys are rejected at every level.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdrlink/adversaries.hpp"
#include "fdrlink/dependence.hpp"
#include "fdrlink/testing.hpp"

namespace fdrlink::experiments {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownPresetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CustomExperiment {
  GeneratorSpec generator;
  std::optional<AdversarySpec> adversary;
  Procedure procedure = Procedure::StepUp;
  std::vector<double> alpha_grid;
  std::vector<double> gamma_grid;
};

struct ExperimentConfig {
  std::string name;
  std::optional<std::string> preset;
  std::optional<CustomExperiment> custom;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> master_seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out_dir;
};

namespace detail {

inline void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": bad value for '" + key + "'");
  }
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key, where);
}

inline std::size_t get_count(const json& j, const char* key, const std::string& where) {
  if (j.contains(key) && !j.at(key).is_number_unsigned()) {
    throw ConfigError(where + ": '" + key + "' must be a non-negative integer");
  }
  return get<std::size_t>(j, key, where);
}

inline Sidedness parse_sided(const json& j, const std::string& where) {
  const auto s = get_opt<std::string>(j, "sided", where).value_or("one");
  if (s == "one") return Sidedness::One;
  if (s == "two") return Sidedness::Two;
  throw ConfigError(where + ": sided must be 'one' or 'two'");
}

inline Eigen::MatrixXd parse_matrix(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw ConfigError(where + ": sigma must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError(where + ": sigma must be square");
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) throw ConfigError(where + ": sigma entries must be numbers");
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

}  // namespace detail

inline GeneratorSpec parse_generator(const json& j, const std::filesystem::path& base_dir) {
  const std::string where = "generator";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const auto type = detail::get<std::string>(j, "type", where);
  GeneratorSpec spec;
  if (type == "iid_uniform") {
    detail::allow_keys(j, where, {"type", "n0", "n1", "mu_alt"});
    spec.kind = IidUniform{detail::get_count(j, "n0", where), detail::get_count(j, "n1", where),
                           detail::get_opt<double>(j, "mu_alt", where).value_or(kDefaultAlternativeShift)};
  } else if (type == "equicorrelated") {
    detail::allow_keys(j, where, {"type", "n", "n0", "rho", "sided", "mu_alt"});
    EquicorrelatedNormal g;
    g.n = detail::get_count(j, "n", where);
    g.n0 = detail::get_count(j, "n0", where);
    g.rho = detail::get<double>(j, "rho", where);
    g.sided = detail::parse_sided(j, where);
    if (j.contains("mu_alt")) {
      const auto& m = j.at("mu_alt");
      g.mu_alt = m.is_array() ? detail::get<std::vector<double>>(j, "mu_alt", where)
                              : std::vector<double>{detail::get<double>(j, "mu_alt", where)};
    }
    spec.kind = std::move(g);
  } else if (type == "gaussian") {
    detail::allow_keys(j, where, {"type", "sigma", "sigma_file", "null_idx", "mu", "sided"});
    Eigen::MatrixXd sigma;
    if (j.contains("sigma") == j.contains("sigma_file")) {
      throw ConfigError(where + ": give exactly one of 'sigma' and 'sigma_file'");
    }
    if (j.contains("sigma")) {
      sigma = detail::parse_matrix(j.at("sigma"), where);
    } else {
      std::filesystem::path file = detail::get<std::string>(j, "sigma_file", where);
      if (file.is_relative()) file = base_dir / file;
      try {
        sigma = load_matrix_file(file.string());
      } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
    const auto nulls = detail::get<std::vector<std::size_t>>(j, "null_idx", where);
    Eigen::VectorXd mu;
    if (j.contains("mu")) {
      const auto v = detail::get<std::vector<double>>(j, "mu", where);
      mu = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    try {
      spec = make_gaussian(std::move(sigma), nulls, std::move(mu), detail::parse_sided(j, where));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  } else if (type == "block") {
    detail::allow_keys(j, where, {"type", "block_sizes", "max_block", "within", "rho_w", "null_mask", "mu_alt"});
    BlockDependent g;
    g.block_sizes = detail::get<std::vector<std::size_t>>(j, "block_sizes", where);
    g.max_block = detail::get_count(j, "max_block", where);
    const auto within = detail::get_opt<std::string>(j, "within", where).value_or("identical");
    if (within == "identical") g.within = WithinBlock::Identical;
    else if (within == "equicorrelated") g.within = WithinBlock::Equicorrelated;
    else throw ConfigError(where + ": within must be 'identical' or 'equicorrelated'");
    g.rho_w = detail::get_opt<double>(j, "rho_w", where).value_or(0.0);
    if (j.contains("null_mask")) g.null_mask = detail::get<std::vector<bool>>(j, "null_mask", where);
    g.mu_alt = detail::get_opt<double>(j, "mu_alt", where).value_or(kDefaultAlternativeShift);
    spec.kind = std::move(g);
  } else if (type == "two_sided") {
    detail::allow_keys(j, where, {"type", "inner"});
    if (!j.contains("inner")) throw ConfigError(where + ": missing key 'inner'");
    spec = two_sided(parse_generator(j.at("inner"), base_dir));
  } else {
    throw ConfigError(where + ": unknown type '" + type + "'");
  }
  try {
    validate(spec);
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return spec;
}

inline AdversarySpec parse_adversary(const json& j) {
  const std::string where = "adversary";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const auto type = detail::get<std::string>(j, "type", where);
  if (type == "informed") {
    detail::allow_keys(j, where, {"type"});
    return InformedAdversary{};
  }
  if (type == "most_anti_conservative") {
    detail::allow_keys(j, where, {"type"});
    return MostAntiConservativeAdversary{};
  }
  if (type == "bonferroni_masked") {
    detail::allow_keys(j, where, {"type", "strategy"});
    const auto s = detail::get_opt<std::string>(j, "strategy", where).value_or("shifted_j_star");
    if (s == "plug_in_second") return BonferroniMaskedAdversary{MaskedStrategy::PlugInSecond};
    if (s == "shifted_j_star") return BonferroniMaskedAdversary{MaskedStrategy::ShiftedJStar};
    throw ConfigError(where + ": strategy must be 'plug_in_second' or 'shifted_j_star'");
  }
  if (type == "fixed_zeros") {
    detail::allow_keys(j, where, {"type", "count"});
    return FixedZerosAdversary{detail::get_count(j, "count", where)};
  }
  throw ConfigError(where + ": unknown type '" + type + "'");
}

inline Procedure parse_procedure(const std::string& s) {
  if (s == "step_up") return Procedure::StepUp;
  if (s == "step_down") return Procedure::StepDown;
  if (s == "most_anti_conservative") return Procedure::MostAntiConservative;
  throw ConfigError("procedure: unknown procedure '" + s + "'");
}

inline std::vector<double> parse_grid(const json& j, const char* key, bool required) {
  if (!j.contains(key)) {
    if (required) throw ConfigError(std::string("missing key '") + key + "'");
    return {};
  }
  const auto grid = detail::get<std::vector<double>>(j, key, "config");
  if (grid.empty()) throw ConfigError(std::string(key) + ": empty grid");
  for (double v : grid) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(key) + ": values must lie in (0, 1)");
  }
  return grid;
}

inline ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir = ".") {
  detail::allow_keys(j, "config",
                     {"schema_version", "name", "preset", "generator", "adversary", "procedure", "alpha_grid",
                      "gamma_grid", "reps", "master_seed", "workers", "out_dir"});
  const int version = detail::get<int>(j, "schema_version", "config");
  if (version != kSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(version));
  ExperimentConfig cfg;
  cfg.preset = detail::get_opt<std::string>(j, "preset", "config");
  if (j.contains("reps")) {
    cfg.reps = detail::get_count(j, "reps", "config");
    if (*cfg.reps == 0) throw ConfigError("reps must be at least 1");
  }
  if (j.contains("master_seed")) cfg.master_seed = detail::get<std::uint64_t>(j, "master_seed", "config");
  if (j.contains("workers")) cfg.workers = detail::get_count(j, "workers", "config");
  cfg.out_dir = detail::get_opt<std::string>(j, "out_dir", "config");
  cfg.name = detail::get_opt<std::string>(j, "name", "config").value_or(cfg.preset.value_or("custom"));
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("name must be a plain file stem");
  }
  if (cfg.preset) {
    for (const char* key : {"generator", "adversary", "procedure", "alpha_grid", "gamma_grid"}) {
      if (j.contains(key)) throw ConfigError(std::string("'") + key + "' cannot be combined with a preset");
    }
    return cfg;
  }
  if (!j.contains("generator")) throw ConfigError("config needs either 'preset' or 'generator'");
  CustomExperiment ex;
  ex.generator = parse_generator(j.at("generator"), base_dir);
  if (j.contains("adversary") && !j.at("adversary").is_null()) ex.adversary = parse_adversary(j.at("adversary"));
  ex.procedure = parse_procedure(detail::get_opt<std::string>(j, "procedure", "config").value_or("step_up"));
  ex.alpha_grid = parse_grid(j, "alpha_grid", true);
  ex.gamma_grid = parse_grid(j, "gamma_grid", false);
  if (ex.adversary && null_count(ex.generator) == 0) throw ConfigError("adversary needs a generator with nulls");
  cfg.custom = std::move(ex);
  return cfg;
}

inline ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace fdrlink::experiments
