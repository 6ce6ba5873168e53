#pragma once

// fdrlink run <preset|config.json> [--seed N] [--reps N] [--out DIR] [--workers N]
// fdrlink bounds --n N --n0 N0 [--pi0 P] --alpha A [--alpha A ...] [--gamma G] [--c C]
// fdrlink check <matrix file> [--nulls i,j,...]

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdrlink/dependence.hpp"
#include "fdrlink/experiments/config.hpp"
#include "fdrlink/experiments/output.hpp"
#include "fdrlink/experiments/presets.hpp"
#include "fdrlink/experiments/tables.hpp"

namespace fdrlink::experiments {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitUnknownPreset = 3,
  kExitBadConfig = 4,
  kExitUnwritable = 5,
};

inline constexpr const char* kSeedEnv = "FDRLINK_SEED";

inline std::uint64_t parse_seed(const std::string& text, const std::string& source) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    throw ConfigError(source + ": not a 64-bit unsigned seed: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError(source + ": not a 64-bit unsigned seed: '" + text + "'");
  return static_cast<std::uint64_t>(v);
}

/// Serialises a preset or custom result into files: one CSV per table, a TSV and an SVG per plot.
inline OutputSet render(const PresetResult& result) {
  OutputSet files;
  for (const auto& t : result.tables) files.add_table(t);
  for (const auto& p : result.plots) {
    if (p.series.empty()) continue;
    files.add(p.name + ".tsv", to_tsv(p.series));
    files.add(p.name + ".svg", to_svg(p.series, p.title, p.x_label, p.y_label));
  }
  return files;
}

struct RunRequest {
  std::string target;
  std::optional<std::string> seed;
  std::optional<std::size_t> reps;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> workers;
};

/// Seed precedence: built-in default, then the config file, then FDRLINK_SEED, then --seed.
inline int run_command(const RunRequest& req, std::ostream& out, std::ostream& err) {
  std::optional<std::uint64_t> flag_seed;
  try {
    if (req.seed) flag_seed = parse_seed(*req.seed, "--seed");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    ExperimentConfig cfg;
    const auto& registry = preset_registry();
    if (registry.count(req.target)) {
      cfg.preset = req.target;
      cfg.name = req.target;
    } else if (std::filesystem::is_regular_file(req.target)) {
      cfg = load_config_file(req.target);
    } else if (std::filesystem::path(req.target).extension() == ".json") {
      throw ConfigError("cannot read config file " + req.target);
    } else {
      throw UnknownPresetError("unknown preset '" + req.target + "'");
    }
    RunSettings settings;
    if (cfg.master_seed) settings.master_seed = *cfg.master_seed;
    if (const char* env = std::getenv(kSeedEnv); env && *env) settings.master_seed = parse_seed(env, kSeedEnv);
    if (flag_seed) settings.master_seed = *flag_seed;
    settings.reps = req.reps ? req.reps : cfg.reps;
    if (settings.reps && *settings.reps == 0) throw ConfigError("reps must be at least 1");
    settings.workers = req.workers.value_or(cfg.workers.value_or(0));
    const std::filesystem::path dir = req.out_dir.value_or(cfg.out_dir.value_or("results"));

    const PresetResult result = cfg.preset ? run_preset(*cfg.preset, settings)
                                           : run_custom(cfg.name, *cfg.custom, settings);
    const auto written = render(result).commit(dir);
    out << cfg.name << ": seed " << settings.master_seed;
    if (result.checks > 0) out << ", " << result.passed << "/" << result.checks << " checks passed";
    out << "\n";
    for (const auto& p : written) out << "  wrote " << p.string() << "\n";
    return kExitOk;
  } catch (const UnknownPresetError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnknownPreset;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnwritable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

struct BoundsRequest {
  std::uint64_t n = 0;
  std::uint64_t n0 = 0;
  std::optional<double> pi0;
  std::vector<double> alpha;
  std::optional<double> gamma;
  std::optional<double> c;
};

inline int bounds_command(const BoundsRequest& req, std::ostream& out, std::ostream& err) {
  try {
    BoundsTableParams p{req.n, req.n0, req.pi0, req.alpha, req.gamma, req.c};
    write_csv(out, bounds_table(p));
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

inline std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad index '" + item + "'");
    }
    if (used != item.size()) throw std::invalid_argument("bad index '" + item + "'");
    out.push_back(v);
  }
  return out;
}

/// Prints key=value lines for the PRDN, PRDS and MTP2 sign checks.
inline int check_command(const std::string& matrix_file, const std::optional<std::string>& nulls_text,
                         std::ostream& out, std::ostream& err) {
  Eigen::MatrixXd sigma;
  try {
    sigma = load_matrix_file(matrix_file);
    if (sigma.rows() != sigma.cols()) throw std::invalid_argument("matrix is not square");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
  try {
    std::vector<std::size_t> nulls;
    if (nulls_text) {
      nulls = parse_index_list(*nulls_text);
    } else {
      for (Eigen::Index i = 0; i < sigma.rows(); ++i) nulls.push_back(static_cast<std::size_t>(i));
    }
    const auto k = static_cast<Eigen::Index>(nulls.size());
    if (k == 0) throw std::invalid_argument("no null indices");
    Eigen::MatrixXd sigma0(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) {
        const auto i = nulls[static_cast<std::size_t>(a)], j = nulls[static_cast<std::size_t>(b)];
        if (i >= static_cast<std::size_t>(sigma.rows()) || j >= static_cast<std::size_t>(sigma.rows())) {
          throw std::out_of_range("null index out of range");
        }
        sigma0(a, b) = sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    out << "n=" << sigma.rows() << "\n";
    out << "n0=" << k << "\n";
    out << "prdn=" << (prdn_check_gaussian(sigma, nulls) ? "true" : "false") << "\n";
    out << "prds=" << (prds_check_gaussian(sigma, nulls) ? "true" : "false") << "\n";
    const auto b = mtp2_sign_check(sigma0);
    out << "mtp2_feasible=" << (b ? "true" : "false") << "\n";
    if (b) {
      out << "signs=";
      for (std::size_t i = 0; i < b->signs.size(); ++i) out << (i ? "," : "") << b->signs[i];
      out << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"FDR bounds, adversaries and Monte Carlo experiments"};
  app.require_subcommand(1);

  RunRequest run;
  auto* run_cmd = app.add_subcommand("run", "run a preset (E1-E8) or a JSON config");
  run_cmd->add_option("target", run.target, "preset name or config file")->required();
  run_cmd->add_option("--seed", run.seed, "master seed (overrides config and FDRLINK_SEED)");
  run_cmd->add_option("--reps", run.reps, "replications per estimate");
  run_cmd->add_option("--out", run.out_dir, "output directory (default: results)");
  run_cmd->add_option("--workers", run.workers, "worker threads; results do not depend on it");

  BoundsRequest bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "print closed-form bounds as CSV");
  bounds_cmd->add_option("--n", bounds.n, "number of hypotheses")->required();
  bounds_cmd->add_option("--n0", bounds.n0, "number of nulls")->required();
  bounds_cmd->add_option("--pi0", bounds.pi0, "null proportion (default n0/n)");
  bounds_cmd->add_option("--alpha", bounds.alpha, "nominal level; repeatable")->required();
  bounds_cmd->add_option("--gamma", bounds.gamma, "exceedance level for the FDX bound");
  bounds_cmd->add_option("--c", bounds.c, "slope of a linear FDR_0 curve for the linking bound");

  std::string matrix_file;
  std::optional<std::string> nulls;
  auto* check_cmd = app.add_subcommand("check", "PRDN / PRDS / MTP2 checks for a covariance matrix");
  check_cmd->add_option("matrix", matrix_file, "dense text matrix file")->required();
  check_cmd->add_option("--nulls", nulls, "comma-separated null indices (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }
  if (run_cmd->parsed()) return run_command(run, out, err);
  if (bounds_cmd->parsed()) return bounds_command(bounds, out, err);
  return check_command(matrix_file, nulls, out, err);
}

}  // namespace fdrlink::experiments
