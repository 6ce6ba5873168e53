#pragma once

// Built-in experiments E1-E8. Each returns its tables and plot series; the
// caller decides where they go.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fdrlink/adversaries.hpp"
#include "fdrlink/bounds.hpp"
#include "fdrlink/dependence.hpp"
#include "fdrlink/experiments/config.hpp"
#include "fdrlink/experiments/output.hpp"
#include "fdrlink/experiments/tables.hpp"
#include "fdrlink/mc.hpp"

namespace fdrlink::experiments {

struct RunSettings {
  std::optional<std::size_t> reps;  // overrides every preset default
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::size_t workers = 0;
};

struct Plot {
  std::string name;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

struct PresetResult {
  std::vector<Table> tables;
  std::vector<Plot> plots;
  std::size_t checks = 0;
  std::size_t passed = 0;

  void record(bool ok) {
    ++checks;
    if (ok) ++passed;
  }
};

namespace detail {

// Hands out an independent McConfig for each estimate of a preset.
class CellSeeds {
 public:
  CellSeeds(const RunSettings& s, std::size_t default_reps)
      : master_(s.master_seed), reps_(s.reps.value_or(default_reps)), workers_(s.workers) {}
  McConfig next() { return McConfig{reps_, replication_seed(master_, counter_++), workers_}; }
  std::size_t reps() const { return reps_; }

 private:
  std::uint64_t master_;
  std::size_t reps_;
  std::size_t workers_;
  std::uint64_t counter_ = 0;
};

inline GeneratorSpec iid(std::size_t n0, std::size_t n1) { return GeneratorSpec{IidUniform{n0, n1}}; }

inline GeneratorSpec equicorrelated(std::size_t n0, std::size_t n1, double rho, Sidedness sided = Sidedness::One) {
  return GeneratorSpec{EquicorrelatedNormal{n0 + n1, n0, rho, sided, {}}};
}

// Nulls in identical blocks of size b (the last block may be shorter),
// followed by n1 singleton non-null blocks.
inline GeneratorSpec null_blocks(std::size_t n0, std::size_t n1, std::size_t b, WithinBlock within, double rho_w) {
  BlockDependent g;
  g.max_block = b;
  g.within = within;
  g.rho_w = rho_w;
  for (std::size_t left = n0; left > 0;) {
    const std::size_t take = std::min(b, left);
    g.block_sizes.push_back(take);
    left -= take;
  }
  for (std::size_t k = 0; k < n1; ++k) g.block_sizes.push_back(1);
  g.null_mask.assign(n0 + n1, false);
  std::fill(g.null_mask.begin(), g.null_mask.begin() + static_cast<std::ptrdiff_t>(n0), true);
  return GeneratorSpec{std::move(g)};
}

inline double combined_se(double a, double b) { return std::sqrt(a * a + b * b); }

inline std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

}  // namespace detail

/// E1: informed adversary on independent uniform nulls against the PRDN bound.
inline PresetResult preset_e1(const RunSettings& s) {
  detail::CellSeeds seeds(s, 10'000);
  const std::size_t n0 = 1000, n1 = 10'000;
  const auto gen = detail::iid(n0, n1);
  const double pi0 = static_cast<double>(n0) / static_cast<double>(n0 + n1);
  PresetResult out;
  Table t{"e1_prdn_bound", {"alpha", "fdr_mean", "fdr_stderr", "prdn_bound", "pass"}, {}};
  Series fdr{"fdr", {}, {}}, bound{"prdn_bound", {}, {}};
  for (double alpha : {0.01, 0.05, 0.1, 0.2}) {
    const auto est = estimate_fdr(gen, InformedAdversary{}, Procedure::StepUp, alpha, seeds.next());
    const double b = prdn_bound_pi0(pi0, alpha);
    const bool ok = est.mean <= b + 3.0 * est.std_error;
    out.record(ok);
    t.add({alpha, est.mean, est.std_error, b, ok});
    fdr.x.push_back(alpha);
    fdr.y.push_back(est.mean);
    bound.x.push_back(alpha);
    bound.y.push_back(b);
  }
  out.tables.push_back(std::move(t));
  out.plots.push_back({"e1_prdn_bound", "Informed adversary vs PRDN bound", "alpha", "FDR", {fdr, bound}});
  return out;
}

/// E2: FDR under the informed adversary against D_alpha, in two regimes of n1.
inline PresetResult preset_e2(const RunSettings& s) {
  detail::CellSeeds seeds(s, 10'000);
  PresetResult out;
  Table t{"e2_lower_bound",
          {"regime", "n0", "n1", "pi0", "alpha", "fdr_mean", "fdr_stderr", "d_alpha_mean", "d_alpha_stderr",
           "prdn_bound", "ratio", "pass"},
          {}};
  struct Regime {
    const char* name;
    std::size_t n0, n1;
  };
  const std::vector<double> grid{0.1, 0.05, 0.01};
  std::map<double, McEstimate> d_alpha;
  for (double alpha : grid) d_alpha[alpha] = estimate_D_alpha(alpha, seeds.next());
  Series d_series{"D_alpha", {}, {}};
  for (double alpha : grid) {
    d_series.x.push_back(alpha);
    d_series.y.push_back(d_alpha[alpha].mean);
  }
  std::vector<Series> plot{d_series};
  for (const Regime& r : {Regime{"n1=10n0", 1000, 10'000}, Regime{"pi0_near_1", 2000, 200}}) {
    const auto gen = detail::iid(r.n0, r.n1);
    const double pi0 = static_cast<double>(r.n0) / static_cast<double>(r.n0 + r.n1);
    Series fdr{std::string("fdr ") + r.name, {}, {}};
    for (double alpha : grid) {
      const auto est = estimate_fdr(gen, InformedAdversary{}, Procedure::StepUp, alpha, seeds.next());
      const auto& d = d_alpha[alpha];
      const double upper = prdn_bound(alpha);
      const bool ok = est.mean >= d.mean - 6.0 * detail::combined_se(est.std_error, d.std_error);
      out.record(ok);
      t.add({std::string(r.name), detail::as_int(r.n0), detail::as_int(r.n1), pi0, alpha, est.mean, est.std_error,
             d.mean, d.std_error, upper, est.mean / upper, ok});
      fdr.x.push_back(alpha);
      fdr.y.push_back(est.mean);
    }
    plot.push_back(std::move(fdr));
  }
  out.tables.push_back(std::move(t));
  out.plots.push_back({"e2_lower_bound", "Informed adversary vs D_alpha", "alpha", "FDR", std::move(plot)});
  return out;
}

/// Sorted nulls of one replication of n0 independent uniforms.
inline std::vector<double> sorted_uniform_nulls(std::size_t n0, std::uint64_t seed) {
  auto nulls = sample_nulls(detail::iid(n0, 0), seed);
  std::sort(nulls.begin(), nulls.end());
  return nulls;
}

/// E3: Bonferroni-masked adversaries, plus the two order-statistic expectations behind the 3.5 alpha bound.
inline PresetResult preset_e3(const RunSettings& s) {
  detail::CellSeeds seeds(s, 10'000);
  PresetResult out;
  Table t{"e3_bonferroni_masked",
          {"n0", "n1", "strategy", "procedure", "alpha", "fdr_mean", "fdr_stderr", "bound", "pass"},
          {}};
  Table id{"e3_order_statistics", {"n0", "n", "alpha", "target", "mean", "stderr", "reference", "pass"}, {}};
  const std::vector<double> grid{0.01, 0.05, 0.1};
  for (std::size_t n0 : {std::size_t{10}, std::size_t{100}}) {
    const std::size_t n1 = 10 * n0;
    const std::size_t n = n0 + n1;
    const double pi0 = static_cast<double>(n0) / static_cast<double>(n);
    const auto gen = detail::iid(n0, n1);
    for (auto strategy : {MaskedStrategy::PlugInSecond, MaskedStrategy::ShiftedJStar}) {
      for (auto proc : {Procedure::StepUp, Procedure::StepDown}) {
        for (double alpha : grid) {
          const auto est = estimate_fdr(gen, BonferroniMaskedAdversary{strategy}, proc, alpha, seeds.next());
          const bool ok = est.mean <= 3.5 * alpha + 3.0 * est.std_error;
          out.record(ok);
          t.add({detail::as_int(n0), detail::as_int(n1), std::string(to_string(strategy)), std::string(to_string(proc)),
                 alpha, est.mean, est.std_error, 3.5 * alpha, ok});
        }
      }
    }
    for (double alpha : grid) {
      const auto scale = alpha / static_cast<double>(n);
      const auto inv = estimate_mean(seeds.next(), [&](std::uint64_t seed, std::size_t) {
        return scale / sorted_uniform_nulls(n0, seed)[1];
      });
      const auto tail_max = estimate_mean(seeds.next(), [&](std::uint64_t seed, std::size_t) {
        const auto p = sorted_uniform_nulls(n0, seed);
        double best = 0.0;
        for (std::size_t j = 2; j <= n0; ++j) best = std::max(best, scale * static_cast<double>(j) / p[j - 1]);
        return best;
      });
      const bool ok_inv = std::fabs(inv.mean - pi0 * alpha) <= 3.0 * inv.std_error;
      const bool ok_max = tail_max.mean <= 2.5 * pi0 * alpha + 3.0 * tail_max.std_error;
      out.record(ok_inv);
      out.record(ok_max);
      id.add({detail::as_int(n0), detail::as_int(n), alpha, std::string("alpha/(n p_(2))"), inv.mean, inv.std_error,
              pi0 * alpha, ok_inv});
      id.add({detail::as_int(n0), detail::as_int(n), alpha, std::string("max_{j>=2} alpha j/(n p_(j))"),
              tail_max.mean, tail_max.std_error, 2.5 * pi0 * alpha, ok_max});
    }
  }
  out.tables.push_back(std::move(t));
  out.tables.push_back(std::move(id));
  return out;
}

/// Points strictly inside an open interval, evenly spaced.
inline std::vector<double> interior_grid(const Interval& range, std::size_t count) {
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(range.lower + (range.upper - range.lower) * (static_cast<double>(k) + 0.5) /
                                    static_cast<double>(count));
  }
  return out;
}

/// E4: arbitrary-dependence bound against the log-correction bound inside the improvement range.
inline PresetResult preset_e4(const RunSettings&) {
  PresetResult out;
  Table t{"e4_arbitrary_dependence",
          {"n", "n0", "pi0", "alpha", "bound_new", "bound_log", "improved"},
          {}};
  Plot plot{"e4_arbitrary_dependence", "Arbitrary dependence, n=1000, n0=500", "alpha", "bound", {}};
  for (auto [n, n0] : {std::pair<std::uint64_t, std::uint64_t>{200, 100}, {1000, 500}, {10'000, 1000}}) {
    const double pi0 = static_cast<double>(n0) / static_cast<double>(n);
    const Interval range = improvement_range(n, n0, pi0);
    Series fresh{"arbitrary_dependence", {}, {}}, log_bound{"log_correction", {}, {}};
    for (double alpha : interior_grid(range, 20)) {
      const double a = arbitrary_dep_bound(n0, pi0, alpha);
      const double b = log_correction_bound(n, pi0, alpha);
      out.record(a < b);
      t.add({static_cast<std::int64_t>(n), static_cast<std::int64_t>(n0), pi0, alpha, a, b, a < b});
      fresh.x.push_back(alpha);
      fresh.y.push_back(a);
      log_bound.x.push_back(alpha);
      log_bound.y.push_back(b);
    }
    if (n == 1000) plot.series = {fresh, log_bound};
  }
  out.tables.push_back(std::move(t));
  out.plots.push_back(std::move(plot));
  return out;
}

/// The sampled dependence classes of the consistency experiment.
inline std::vector<DependenceClass> consistency_classes() {
  std::vector<DependenceClass> out;
  {
    DependenceClass c{"negative_equicorrelation", {}, std::nullopt};
    for (std::size_t n0 : {std::size_t{20}, std::size_t{100}}) {
      const double floor_rho = min_equicorrelation(n0);
      for (double rho : {floor_rho, floor_rho / 2.0}) {
        for (auto sided : {Sidedness::One, Sidedness::Two}) {
          c.members.push_back({"n0=" + std::to_string(n0) + " rho=" + format_double(rho) + " " + to_string(sided),
                               detail::equicorrelated(n0, 10 * n0, rho, sided), InformedAdversary{}});
        }
      }
    }
    out.push_back(std::move(c));
  }
  {
    DependenceClass c{"vanishing_null_proportion", {}, std::nullopt};
    for (std::size_t l : {std::size_t{10}, std::size_t{50}, std::size_t{200}}) {
      const auto [n, n0] = vanishing_null_family(l);
      c.members.push_back({"l=" + std::to_string(l) + " identical nulls",
                           detail::null_blocks(n0, n - n0, n0, WithinBlock::Identical, 0.0), InformedAdversary{}});
      c.members.push_back({"l=" + std::to_string(l) + " independent nulls", detail::iid(n0, n - n0),
                           InformedAdversary{}});
    }
    out.push_back(std::move(c));
  }
  {
    DependenceClass c{"two_sided_prdn", {}, 2.0};
    for (double rho : {0.0, 0.5, 0.9}) {
      c.members.push_back({"rho=" + format_double(rho), two_sided(detail::equicorrelated(100, 0, rho)), std::nullopt});
    }
    out.push_back(std::move(c));
  }
  {
    DependenceClass c{"block_b3", {}, 3.0};
    c.members.push_back({"identical", detail::null_blocks(99, 0, 3, WithinBlock::Identical, 0.0), std::nullopt});
    c.members.push_back({"rho_w=-0.5", detail::null_blocks(99, 0, 3, WithinBlock::Equicorrelated, -0.5), std::nullopt});
    out.push_back(std::move(c));
  }
  return out;
}

/// E5: FDR-consistency curves, with the log-correction reference that does not vanish uniformly in n.
inline PresetResult preset_e5(const RunSettings& s) {
  detail::CellSeeds seeds(s, 2000);
  const std::vector<double> grid{0.2, 0.1, 0.05, 0.02, 0.01};
  PresetResult out;
  Table t{"e5_consistency",
          {"class", "alpha", "curve", "stderr", "worst_member", "reference", "within_reference", "decreasing"},
          {}};
  Plot plot{"e5_consistency", "FDR consistency curves", "alpha", "max FDR over class", {}};
  for (const auto& cls : consistency_classes()) {
    const auto curve = consistency_curve(cls, grid, seeds.next());
    out.record(curve.decreasing);
    Series series{cls.name, curve.alpha, curve.curve};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double ref = cls.reference_multiplier ? *cls.reference_multiplier * grid[i] : NAN;
      const bool within = !cls.reference_multiplier || curve.curve[i] <= ref + 3.0 * curve.std_error[i];
      if (cls.reference_multiplier) out.record(within);
      t.add({cls.name, grid[i], curve.curve[i], curve.std_error[i], curve.worst_member[i],
             cls.reference_multiplier ? Cell{ref} : Cell{std::string()}, within, curve.decreasing});
    }
    plot.series.push_back(std::move(series));
  }
  Series guo{"guo_rao_reference n=10000", {}, {}};
  std::vector<double> ref_curve;
  for (double alpha : grid) ref_curve.push_back(guo_rao_reference(10'000, alpha));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.add({std::string("guo_rao_reference_n10000"), grid[i], ref_curve[i], 0.0, std::string("closed form"),
           std::string(), true, decreasing_toward_zero(grid, ref_curve)});
    guo.x.push_back(grid[i]);
    guo.y.push_back(ref_curve[i]);
  }
  plot.series.push_back(std::move(guo));
  out.tables.push_back(std::move(t));
  out.plots.push_back(std::move(plot));
  return out;
}

/// A generator/adversary cell of the linking grid.
struct LinkingCell {
  std::string generator;
  GeneratorSpec spec;
  std::string adversary;
  AdversarySpec adv;
};

inline std::vector<LinkingCell> linking_grid(std::size_t n0 = 100, std::size_t n1 = 1000) {
  std::vector<std::pair<std::string, GeneratorSpec>> gens{
      {"iid", detail::iid(n0, n1)},
      {"equicorrelated rho=-1/(n0-1)", detail::equicorrelated(n0, n1, min_equicorrelation(n0))},
      {"equicorrelated rho=0", detail::equicorrelated(n0, n1, 0.0)},
      {"equicorrelated rho=0.5", detail::equicorrelated(n0, n1, 0.5)},
      {"block b=3 identical", detail::null_blocks(n0, n1, 3, WithinBlock::Identical, 0.0)}};
  std::vector<std::pair<std::string, AdversarySpec>> advs{
      {"informed", InformedAdversary{}},
      {"fixed_zeros_0", FixedZerosAdversary{0}},
      {"bonferroni_masked", BonferroniMaskedAdversary{MaskedStrategy::ShiftedJStar}}};
  std::vector<LinkingCell> out;
  for (const auto& [gname, g] : gens) {
    for (const auto& [aname, a] : advs) out.push_back({gname, g, aname, a});
  }
  return out;
}

/// E6: slack of the linking bound with an estimated FDR_0 curve.
inline PresetResult preset_e6(const RunSettings& s) {
  detail::CellSeeds seeds(s, 10'000);
  const double alpha = 0.05;
  PresetResult out;
  Table t{"e6_linking", {"generator", "adversary", "alpha", "lhs_mean", "lhs_stderr", "rhs", "slack", "pass"}, {}};
  for (const auto& cell : linking_grid()) {
    const auto rep = verify_linking(cell.spec, cell.adv, alpha, seeds.next());
    const bool ok = rep.slack >= -3.0 * rep.lhs.std_error;
    out.record(ok);
    t.add({cell.generator, cell.adversary, alpha, rep.lhs.mean, rep.lhs.std_error, rep.rhs, rep.slack, ok});
  }
  out.tables.push_back(std::move(t));
  return out;
}

/// E7: exceedance probability P(FDP >= gamma) against pi0 alpha / gamma.
inline PresetResult preset_e7(const RunSettings& s) {
  detail::CellSeeds seeds(s, 10'000);
  const std::size_t n0 = 1000, n1 = 10'000;
  const double pi0 = static_cast<double>(n0) / static_cast<double>(n0 + n1);
  PresetResult out;
  Table t{"e7_fdx", {"generator", "alpha", "gamma", "fdx_mean", "fdx_stderr", "fdx_bound", "pass"}, {}};
  const std::vector<std::pair<std::string, GeneratorSpec>> gens{
      {"iid", detail::iid(n0, n1)}, {"equicorrelated rho=0.5", detail::equicorrelated(n0, n1, 0.5)}};
  for (const auto& [name, gen] : gens) {
    for (double alpha : {0.05, 0.1}) {
      for (double gamma : {0.1, 0.25, 0.5}) {
        const auto est = estimate_fdx(gen, InformedAdversary{}, Procedure::StepUp, alpha, gamma, seeds.next());
        const double b = fdx_bound(pi0, alpha, gamma);
        const bool ok = est.mean <= b + 3.0 * est.std_error;
        out.record(ok);
        t.add({name, alpha, gamma, est.mean, est.std_error, b, ok});
      }
    }
  }
  out.tables.push_back(std::move(t));
  return out;
}

/// Named covariance matrices used by E8.
inline std::vector<std::pair<std::string, Eigen::MatrixXd>> structural_examples() {
  std::vector<std::pair<std::string, Eigen::MatrixXd>> out;
  out.emplace_back("identity_4", Eigen::MatrixXd::Identity(4, 4));
  out.emplace_back("equicorrelated_4_rho0.3", equicorrelation_matrix(4, 0.3));
  out.emplace_back("equicorrelated_3_rho-0.2", equicorrelation_matrix(3, -0.2));
  Eigen::MatrixXd ar(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) ar(i, j) = std::pow(-0.6, std::abs(i - j));
  }
  out.emplace_back("ar1_5_phi-0.6", ar);
  Eigen::MatrixXd mixed(3, 3);
  mixed << 1.0, 0.4, -0.3, 0.4, 1.0, 0.2, -0.3, 0.2, 1.0;
  out.emplace_back("mixed_3", mixed);
  return out;
}

/// E8: PRDN / PRDS / MTP2 sign checks. Every index but the last is a null;
/// the MTP2 check runs on the null block.
inline PresetResult preset_e8(const RunSettings&) {
  PresetResult out;
  Table t{"e8_structure", {"matrix", "n", "nulls", "prdn", "prds", "mtp2_feasible", "signs"}, {}};
  for (const auto& [name, sigma] : structural_examples()) {
    const auto n = static_cast<std::size_t>(sigma.rows());
    std::vector<std::size_t> nulls;
    for (std::size_t i = 0; i + 1 < n; ++i) nulls.push_back(i);
    const auto k = static_cast<Eigen::Index>(nulls.size());
    std::string signs;
    const auto b = mtp2_sign_check(sigma.topLeftCorner(k, k));
    if (b) {
      for (int v : b->signs) signs += v > 0 ? '+' : '-';
    }
    std::string null_list;
    for (std::size_t i : nulls) null_list += (null_list.empty() ? "" : " ") + std::to_string(i);
    t.add({name, detail::as_int(n), null_list, prdn_check_gaussian(sigma, nulls), prds_check_gaussian(sigma, nulls),
           b.has_value(), signs});
  }
  out.tables.push_back(std::move(t));
  return out;
}

using PresetFn = std::function<PresetResult(const RunSettings&)>;

inline const std::map<std::string, PresetFn>& preset_registry() {
  static const std::map<std::string, PresetFn> registry{
      {"E1", preset_e1}, {"E2", preset_e2}, {"E3", preset_e3}, {"E4", preset_e4},
      {"E5", preset_e5}, {"E6", preset_e6}, {"E7", preset_e7}, {"E8", preset_e8}};
  return registry;
}

inline PresetResult run_preset(const std::string& name, const RunSettings& s) {
  const auto& reg = preset_registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw UnknownPresetError("unknown preset '" + name + "'");
  return it->second(s);
}

/// An explicit config: FDR (and FDX per gamma) at every alpha of the grid.
inline PresetResult run_custom(const std::string& name, const CustomExperiment& ex, const RunSettings& s) {
  detail::CellSeeds seeds(s, 10'000);
  PresetResult out;
  Table t{name, {"target", "generator_n", "n0", "procedure", "adversary", "alpha", "gamma", "mean", "stderr", "reps",
                 "seed"}, {}};
  const auto n = detail::as_int(total_count(ex.generator));
  const auto n0 = detail::as_int(null_count(ex.generator));
  const std::string adv = ex.adversary ? describe(*ex.adversary) : "none";
  Series fdr{"fdr", {}, {}};
  for (double alpha : ex.alpha_grid) {
    const auto est = estimate_fdr(ex.generator, ex.adversary, ex.procedure, alpha, seeds.next());
    t.add({std::string("fdr"), n, n0, std::string(to_string(ex.procedure)), adv, alpha, std::string(), est.mean,
           est.std_error, detail::as_int(est.reps), std::to_string(est.seed)});
    fdr.x.push_back(alpha);
    fdr.y.push_back(est.mean);
    for (double gamma : ex.gamma_grid) {
      const auto fx = estimate_fdx(ex.generator, ex.adversary, ex.procedure, alpha, gamma, seeds.next());
      t.add({std::string("fdx"), n, n0, std::string(to_string(ex.procedure)), adv, alpha, gamma, fx.mean,
             fx.std_error, detail::as_int(fx.reps), std::to_string(fx.seed)});
    }
  }
  out.tables.push_back(std::move(t));
  out.plots.push_back({name, name, "alpha", "FDR", {fdr}});
  return out;
}

}  // namespace fdrlink::experiments
