#pragma once

// Multiple-testing procedures and FDP accounting.
//
// All threshold comparisons are of the form p <= alpha * j / n evaluated in
// binary floating point with no tolerance; bh_threshold is the single place
// that computes the right-hand side.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdrlink/numeric.hpp"

namespace fdrlink {

/// Exact non-negative rational number num/den with den >= 1.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    const __int128 lhs = static_cast<__int128>(a.num) * b.den;
    const __int128 rhs = static_cast<__int128>(b.num) * a.den;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend bool operator==(const Ratio& a, const Ratio& b) { return (a <=> b) == 0; }
};

inline double bh_threshold(double alpha, std::size_t j, std::size_t n) {
  return alpha * static_cast<double>(j) / static_cast<double>(n);
}

/// p-values with a mask marking the true nulls. Immutable once built.
class PValueStudy {
 public:
  PValueStudy(std::vector<double> pvalues, std::vector<bool> null_mask)
      : pvalues_(std::move(pvalues)), null_mask_(std::move(null_mask)) {
    if (pvalues_.empty()) throw std::invalid_argument("PValueStudy: need at least one p-value");
    if (null_mask_.size() != pvalues_.size()) {
      throw std::invalid_argument("PValueStudy: null mask length differs from p-value count");
    }
    for (double p : pvalues_) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("PValueStudy: p-value outside [0, 1]: " + std::to_string(p));
      }
    }
    n0_ = static_cast<std::size_t>(std::count(null_mask_.begin(), null_mask_.end(), true));
  }

  static PValueStudy global_null(std::vector<double> pvalues) {
    std::vector<bool> mask(pvalues.size(), true);
    return PValueStudy(std::move(pvalues), std::move(mask));
  }

  std::size_t n() const { return pvalues_.size(); }
  std::size_t n0() const { return n0_; }
  std::size_t n1() const { return n() - n0_; }
  double pi0() const { return static_cast<double>(n0_) / static_cast<double>(n()); }

  std::span<const double> pvalues() const { return pvalues_; }
  double pvalue(std::size_t i) const { return pvalues_.at(i); }
  bool is_null(std::size_t i) const { return null_mask_.at(i); }
  const std::vector<bool>& null_mask() const { return null_mask_; }

  /// Null p-values in index order.
  std::vector<double> null_pvalues() const {
    std::vector<double> out;
    out.reserve(n0_);
    for (std::size_t i = 0; i < n(); ++i) {
      if (null_mask_[i]) out.push_back(pvalues_[i]);
    }
    return out;
  }

 private:
  std::vector<double> pvalues_;
  std::vector<bool> null_mask_;
  std::size_t n0_ = 0;
};

/// A rejection set with its counts. fdp is kept as the exact ratio V / max(R, 1).
class RejectionOutcome {
 public:
  RejectionOutcome() = default;

  /// Indices may come in any order; duplicates or out-of-range indices throw.
  static RejectionOutcome from_indices(const PValueStudy& study, std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
      throw std::invalid_argument("RejectionOutcome: duplicate index");
    }
    RejectionOutcome out;
    for (std::size_t i : indices) {
      if (i >= study.n()) throw std::out_of_range("RejectionOutcome: index out of range");
      if (study.is_null(i)) ++out.false_rejections_;
    }
    out.rejected_ = std::move(indices);
    return out;
  }

  const std::vector<std::size_t>& rejected() const { return rejected_; }
  std::size_t R() const { return rejected_.size(); }
  std::size_t V() const { return false_rejections_; }
  Ratio fdp() const {
    return Ratio{static_cast<std::int64_t>(V()),
                 static_cast<std::int64_t>(std::max<std::size_t>(R(), 1))};
  }

 private:
  std::vector<std::size_t> rejected_;
  std::size_t false_rejections_ = 0;
};

namespace detail {

inline void require_alpha(double alpha) { require_open_unit(alpha, "alpha"); }

// Smallest j in [1, n] with p <= alpha*j/n, or n+1 when there is none.
// Starts from the ceiling estimate and corrects it against the exact
// floating-point thresholds, so the result agrees with direct comparison.
inline std::size_t first_threshold_index(double p, double alpha, std::size_t n) {
  const double guess = std::ceil(p * static_cast<double>(n) / alpha);
  std::size_t k = guess < 1.0 ? 1 : (guess > static_cast<double>(n) + 1.0 ? n + 1 : static_cast<std::size_t>(guess));
  while (k > 1 && p <= bh_threshold(alpha, k - 1, n)) --k;
  while (k <= n && p > bh_threshold(alpha, k, n)) ++k;
  return k;
}

// counts[j] = #{i : first_threshold_index(p_i) == j}, for j in [1, n+1].
inline std::vector<std::size_t> threshold_histogram(std::span<const double> p, double alpha) {
  const std::size_t n = p.size();
  std::vector<std::size_t> counts(n + 2, 0);
  for (double x : p) ++counts[first_threshold_index(x, alpha, n)];
  return counts;
}

// Indices sorted by (value, index).
inline std::vector<std::size_t> order_by_value(std::span<const double> p) {
  std::vector<std::size_t> idx(p.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  return idx;
}

}  // namespace detail

/// Benjamini-Hochberg step-up. Runs in O(n) via a histogram of the first
/// threshold each p-value clears.
inline RejectionOutcome bh_step_up(const PValueStudy& study, double alpha) {
  detail::require_alpha(alpha);
  const auto p = study.pvalues();
  const std::size_t n = p.size();
  const auto counts = detail::threshold_histogram(p, alpha);
  // #{p_i <= alpha j / n} >= j  <=>  p_(j) <= alpha j / n
  std::size_t cumulative = 0;
  std::size_t r = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    cumulative += counts[j];
    if (cumulative >= j) r = j;
  }
  std::vector<std::size_t> rejected;
  if (r > 0) {
    rejected.reserve(r);
    const double cut = bh_threshold(alpha, r, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i] <= cut) rejected.push_back(i);
    }
  }
  return RejectionOutcome::from_indices(study, std::move(rejected));
}

/// Step-down variant: stops at the first sorted p-value above its threshold.
inline RejectionOutcome bh_step_down(const PValueStudy& study, double alpha) {
  detail::require_alpha(alpha);
  const auto p = study.pvalues();
  const std::size_t n = p.size();
  const auto counts = detail::threshold_histogram(p, alpha);
  std::size_t cumulative = 0;
  std::size_t r = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    cumulative += counts[j];
    if (cumulative < j) break;
    r = j;
  }
  std::vector<std::size_t> rejected;
  if (r > 0) {
    const auto order = detail::order_by_value(p);
    rejected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r));
  }
  return RejectionOutcome::from_indices(study, std::move(rejected));
}

/// True iff every rejected p-value satisfies p <= alpha * R / n.
inline bool is_compliant(const PValueStudy& study, const RejectionOutcome& outcome, double alpha) {
  detail::require_alpha(alpha);
  const double cut = bh_threshold(alpha, outcome.R(), study.n());
  for (std::size_t i : outcome.rejected()) {
    if (i >= study.n()) throw std::out_of_range("is_compliant: index out of range");
    if (study.pvalue(i) > cut) return false;
  }
  return true;
}

/// min_j n0 p_(j) / j over the supplied null p-values, capped at 1.
inline double simes_pvalue(std::span<const double> nulls) {
  if (nulls.empty()) throw std::invalid_argument("simes_pvalue: empty input");
  std::vector<double> sorted(nulls.begin(), nulls.end());
  std::sort(sorted.begin(), sorted.end());
  const double n0 = static_cast<double>(sorted.size());
  double best = 1.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    best = std::min(best, n0 * sorted[j] / static_cast<double>(j + 1));
  }
  return best;
}

inline bool simes_rejects(std::span<const double> nulls, double x) {
  require_open_unit(x, "simes level");
  return simes_pvalue(nulls) <= x;
}

/// The denominator ceil(n p / alpha) of the FDP bound, at least 1.
inline std::int64_t fdp_bound_denominator(double p, std::size_t n, double alpha) {
  return std::max<std::int64_t>(1, snapped_ceil(static_cast<double>(n) * p / alpha));
}

/// min{ max_j j / ceil(n p_(j) / alpha), 1 } over the sorted nulls; exactly 1
/// when any null p-value is zero. Empty input gives 0 (no nulls, FDP is 0).
inline Ratio fdp_upper_bound(std::span<const double> nulls, std::size_t n, double alpha) {
  detail::require_alpha(alpha);
  if (n < nulls.size()) throw std::invalid_argument("fdp_upper_bound: n smaller than the null count");
  if (nulls.empty()) return Ratio{0, 1};
  std::vector<double> sorted(nulls.begin(), nulls.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == 0.0) return Ratio{1, 1};
  Ratio best{0, 1};
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    const Ratio r{static_cast<std::int64_t>(j + 1), fdp_bound_denominator(sorted[j], n, alpha)};
    if (r > best) best = r;
  }
  if (best > Ratio{1, 1}) return Ratio{1, 1};
  return best;
}

/// The compliant outcome with the largest FDP on a fixed study: an oracle
/// that knows the null mask. For each candidate R it rejects as many nulls as
/// possible among the p-values below alpha R / n and fills up with non-nulls.
inline RejectionOutcome max_fdp_compliant(const PValueStudy& study, double alpha) {
  detail::require_alpha(alpha);
  const auto p = study.pvalues();
  const std::size_t n = p.size();
  std::vector<std::size_t> null_counts(n + 2, 0), other_counts(n + 2, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = detail::first_threshold_index(p[i], alpha, n);
    (study.is_null(i) ? null_counts : other_counts)[k]++;
  }
  Ratio best{0, 1};
  std::size_t best_r = 0;
  std::size_t best_v = 0;
  std::size_t nulls_below = 0;
  std::size_t others_below = 0;
  for (std::size_t r = 1; r <= n; ++r) {
    nulls_below += null_counts[r];
    others_below += other_counts[r];
    if (nulls_below + others_below < r) continue;
    const std::size_t v = std::min(r, nulls_below);
    const Ratio fdp{static_cast<std::int64_t>(v), static_cast<std::int64_t>(r)};
    if (fdp > best) {
      best = fdp;
      best_r = r;
      best_v = v;
    }
  }
  std::vector<std::size_t> rejected;
  if (best_v > 0) {
    const auto order = detail::order_by_value(p);
    std::size_t taken_null = 0;
    std::size_t taken_other = 0;
    for (std::size_t i : order) {
      if (study.is_null(i)) {
        if (taken_null < best_v) {
          rejected.push_back(i);
          ++taken_null;
        }
      } else if (taken_other < best_r - best_v) {
        rejected.push_back(i);
        ++taken_other;
      }
    }
  }
  return RejectionOutcome::from_indices(study, std::move(rejected));
}

enum class Procedure { StepUp, StepDown, MostAntiConservative };

inline RejectionOutcome run_procedure(Procedure proc, const PValueStudy& study, double alpha) {
  switch (proc) {
    case Procedure::StepUp: return bh_step_up(study, alpha);
    case Procedure::StepDown: return bh_step_down(study, alpha);
    case Procedure::MostAntiConservative: return max_fdp_compliant(study, alpha);
  }
  throw std::invalid_argument("run_procedure: unknown procedure");
}

inline const char* to_string(Procedure proc) {
  switch (proc) {
    case Procedure::StepUp: return "step_up";
    case Procedure::StepDown: return "step_down";
    case Procedure::MostAntiConservative: return "most_anti_conservative";
  }
  return "?";
}

}  // namespace fdrlink
