#pragma once

// Seeded Monte Carlo estimation.
//
// Replication r draws from seed replication_seed(master_seed, r) and writes
// its result into slot r; aggregation runs over the slots in index order.
// Estimates are therefore bit-identical for any number of workers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fdrlink/adversaries.hpp"
#include "fdrlink/bounds.hpp"
#include "fdrlink/dependence.hpp"
#include "fdrlink/numeric.hpp"
#include "fdrlink/testing.hpp"

namespace fdrlink {

inline constexpr std::uint64_t kDefaultMasterSeed = 20240917;

struct McConfig {
  std::size_t reps = 100'000;
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::size_t workers = 0;  // 0: one per hardware thread. Never affects results.
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(reps)
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  bool std_error_defined = false;  // false when reps == 1; std_error is then 0
};

/// splitmix64 finaliser.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of replication `index`: splitmix64(master ^ splitmix64(index)).
inline std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index));
}

inline std::size_t resolve_workers(const McConfig& cfg) {
  std::size_t w = cfg.workers;
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(w, cfg.reps));
}

/// Runs fn(seed, index) for every replication and returns the results by index.
template <typename Fn>
auto replicate(const McConfig& cfg, Fn fn) -> std::vector<decltype(fn(std::uint64_t{}, std::size_t{}))> {
  using T = decltype(fn(std::uint64_t{}, std::size_t{}));
  if (cfg.reps == 0) throw std::invalid_argument("McConfig: reps must be at least 1");
  std::vector<T> out(cfg.reps);
  const std::size_t workers = resolve_workers(cfg);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) out[r] = fn(replication_seed(cfg.master_seed, r), r);
  };
  if (workers == 1) {
    run_range(0, cfg.reps);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (cfg.reps + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(cfg.reps, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        run_range(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline McEstimate summarize(std::span<const double> values, std::uint64_t seed) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  const double count = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / count;
  McEstimate est{mean, 0.0, values.size(), seed, false};
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
    const double var = pairwise_sum(sq) / (count - 1.0);
    est.std_error = std::sqrt(var / count);
    est.std_error_defined = true;
  }
  return est;
}

/// Mean of fn(seed, index) over the replications.
template <typename Fn>
McEstimate estimate_mean(const McConfig& cfg, Fn fn) {
  const auto values = replicate(cfg, fn);
  return summarize(values, cfg.master_seed);
}

// ---------------------------------------------------------------------------
// Pipelines

/// Study seen by the procedure in one replication: the generated study, or
/// its nulls completed by the adversary.
inline PValueStudy realize_study(const GeneratorSpec& gen, const std::optional<AdversarySpec>& adv, double alpha,
                                 std::uint64_t seed) {
  if (!adv) return sample(gen, seed);
  return apply_adversary(*adv, sample(gen, seed, NonNullDraw::Skip), alpha).study;
}

inline Ratio replication_fdp(const GeneratorSpec& gen, const std::optional<AdversarySpec>& adv, Procedure proc,
                             double alpha, std::uint64_t seed) {
  const PValueStudy study = realize_study(gen, adv, alpha, seed);
  return run_procedure(proc, study, alpha).fdp();
}

namespace detail {
inline void require_nulls(const GeneratorSpec& gen) {
  validate(gen);
  if (null_count(gen) == 0) throw std::invalid_argument("generator has no null hypotheses");
}
}  // namespace detail

inline McEstimate estimate_fdr(const GeneratorSpec& gen, const std::optional<AdversarySpec>& adv, Procedure proc,
                               double alpha, const McConfig& cfg) {
  require_open_unit(alpha, "alpha");
  if (adv) detail::require_nulls(gen);
  return estimate_mean(cfg, [&](std::uint64_t seed, std::size_t) {
    return replication_fdp(gen, adv, proc, alpha, seed).value();
  });
}

/// P(FDP >= gamma).
inline McEstimate estimate_fdx(const GeneratorSpec& gen, const std::optional<AdversarySpec>& adv, Procedure proc,
                               double alpha, double gamma, const McConfig& cfg) {
  require_open_unit(alpha, "alpha");
  require_open_unit(gamma, "gamma");
  if (adv) detail::require_nulls(gen);
  return estimate_mean(cfg, [&](std::uint64_t seed, std::size_t) {
    return replication_fdp(gen, adv, proc, alpha, seed).value() >= gamma ? 1.0 : 0.0;
  });
}

/// E[FDP^k].
inline McEstimate estimate_fdp_moment(const GeneratorSpec& gen, const std::optional<AdversarySpec>& adv,
                                      Procedure proc, double alpha, int k, const McConfig& cfg) {
  require_open_unit(alpha, "alpha");
  if (k < 1) throw std::invalid_argument("estimate_fdp_moment: k must be at least 1");
  if (adv) detail::require_nulls(gen);
  return estimate_mean(cfg, [&](std::uint64_t seed, std::size_t) {
    const double f = replication_fdp(gen, adv, proc, alpha, seed).value();
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= f;
    return out;
  });
}

/// Simes p-values of the nulls, one per replication.
inline std::vector<double> simes_samples(const GeneratorSpec& null_gen, const McConfig& cfg) {
  detail::require_nulls(null_gen);
  return replicate(cfg, [&](std::uint64_t seed, std::size_t) { return simes_pvalue(sample_nulls(null_gen, seed)); });
}

/// Empirical CDF of the Simes p-value of the nulls, which estimates FDR_0(x) at every x.
inline EmpiricalCurve estimate_fdr0_curve(const GeneratorSpec& null_gen, const McConfig& cfg) {
  return EmpiricalCurve(simes_samples(null_gen, cfg));
}

// ---------------------------------------------------------------------------
// D_alpha

struct DAlphaOptions {
  std::size_t j_max = 10'000'000;
};

/// One draw of min{max_j j / ceil(S_j / alpha), 1}, S_j a sum of j unit exponentials.
/// Extends j until j >= ceil(20 / alpha) and alpha j / S_j falls below the running maximum.
inline double d_alpha_replication(double alpha, std::uint64_t seed, const DAlphaOptions& opts = {}) {
  require_open_unit(alpha, "alpha");
  RandomStream rng(seed);
  const auto j0 = static_cast<std::size_t>(std::ceil(20.0 / alpha));
  double s = 0.0;
  Ratio best{0, 1};
  for (std::size_t j = 1; j <= opts.j_max; ++j) {
    s += rng.exponential();
    const std::int64_t c = std::max<std::int64_t>(1, snapped_ceil(s / alpha));
    const Ratio r{static_cast<std::int64_t>(j), c};
    if (r > best) best = r;
    if (best >= Ratio{1, 1}) return 1.0;
    if (j >= j0 && alpha * static_cast<double>(j) / s < best.value()) break;
  }
  return best.value();
}

inline McEstimate estimate_D_alpha(double alpha, const McConfig& cfg, const DAlphaOptions& opts = {}) {
  require_open_unit(alpha, "alpha");
  return estimate_mean(cfg, [&](std::uint64_t seed, std::size_t) { return d_alpha_replication(alpha, seed, opts); });
}

// ---------------------------------------------------------------------------
// Linking check

struct LinkingReport {
  McEstimate lhs;  // FDR of the step-up procedure
  double rhs = 0.0;  // linking bound with the estimated FDR_0 curve
  double slack = 0.0;  // rhs - lhs.mean
};

/// Both sides come from the same replications: each one yields the FDP of
/// the step-up procedure and the Simes p-value of its nulls.
inline LinkingReport verify_linking(const GeneratorSpec& gen, const std::optional<AdversarySpec>& adv, double alpha,
                                    const McConfig& cfg) {
  require_open_unit(alpha, "alpha");
  detail::require_nulls(gen);
  struct Draw {
    double fdp = 0.0;
    double simes = 1.0;
  };
  const auto draws = replicate(cfg, [&](std::uint64_t seed, std::size_t) {
    const PValueStudy study = realize_study(gen, adv, alpha, seed);
    return Draw{bh_step_up(study, alpha).fdp().value(), simes_pvalue(study.null_pvalues())};
  });
  std::vector<double> fdp(draws.size()), simes(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    fdp[i] = draws[i].fdp;
    simes[i] = draws[i].simes;
  }
  const double pi0 = static_cast<double>(null_count(gen)) / static_cast<double>(total_count(gen));
  LinkingReport report;
  report.lhs = summarize(fdp, cfg.master_seed);
  report.rhs = fdr_link_bound(pi0, alpha, EmpiricalCurve(std::move(simes)));
  report.slack = report.rhs - report.lhs.mean;
  return report;
}

}  // namespace fdrlink
