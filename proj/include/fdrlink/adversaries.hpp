#pragma once

// Non-null constructions that push the FDP of compliant procedures towards
// its upper bound. Every construction sets non-null p-values to 0 or 1 only;
// zeros go to the lowest non-null indices.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fdrlink/testing.hpp"

namespace fdrlink {

enum class MaskedStrategy { PlugInSecond, ShiftedJStar };

inline const char* to_string(MaskedStrategy s) {
  return s == MaskedStrategy::PlugInSecond ? "plug_in_second" : "shifted_j_star";
}

struct InformedAdversary {};
struct MostAntiConservativeAdversary {};
struct BonferroniMaskedAdversary {
  MaskedStrategy strategy = MaskedStrategy::ShiftedJStar;
};
struct FixedZerosAdversary {
  std::size_t count = 0;
};

using AdversarySpec =
    std::variant<InformedAdversary, MostAntiConservativeAdversary, BonferroniMaskedAdversary, FixedZerosAdversary>;

/// A study whose non-null entries were chosen by an adversary.
struct CompletedStudy {
  PValueStudy study;
  std::size_t zero_count = 0;
  std::optional<std::size_t> j_star;
  std::optional<std::size_t> j_diamond;
  std::optional<std::size_t> masked_T;
};

namespace detail {

inline std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline void require_positive_nulls(std::span<const double> sorted) {
  if (sorted.empty()) throw std::invalid_argument("adversary: need at least one null p-value");
  if (sorted.front() <= 0.0) throw std::invalid_argument("adversary: null p-values must be positive");
}

// Position (1-based) maximising j / ceil(n p_(j) / alpha) over j in [first, last],
// restricted by `feasible`; the largest j wins ties. Returns 0 if nothing is feasible.
template <typename Feasible>
std::size_t argmax_ratio(std::span<const double> sorted, std::size_t first, std::size_t n, double alpha,
                         Feasible feasible) {
  std::size_t best_j = 0;
  Ratio best{0, 1};
  for (std::size_t j = first; j <= sorted.size(); ++j) {
    const std::int64_t c = fdp_bound_denominator(sorted[j - 1], n, alpha);
    if (!feasible(j, c)) continue;
    const Ratio r{static_cast<std::int64_t>(j), c};
    if (best_j == 0 || r >= best) {
      best = r;
      best_j = j;
    }
  }
  return best_j;
}

inline std::size_t positive_part_capped(std::int64_t x, std::size_t cap) {
  if (x <= 0) return 0;
  return std::min(static_cast<std::size_t>(x), cap);
}

// Nulls at indices [0, n0) in the given order, then n1 non-nulls: `zeros` zeros and ones after.
inline PValueStudy nulls_then_nonnulls(std::span<const double> nulls, std::size_t n1, std::size_t zeros) {
  std::vector<double> p(nulls.begin(), nulls.end());
  std::vector<bool> mask(nulls.size(), true);
  p.reserve(nulls.size() + n1);
  mask.reserve(nulls.size() + n1);
  for (std::size_t k = 0; k < n1; ++k) {
    p.push_back(k < zeros ? 0.0 : 1.0);
    mask.push_back(false);
  }
  return PValueStudy(std::move(p), std::move(mask));
}

inline void require_counts(std::size_t n0, std::size_t n1, std::size_t n) {
  if (n0 + n1 != n) throw std::invalid_argument("adversary: n must equal n0 + n1");
}

}  // namespace detail

/// argmax_j j / ceil(n p_(j) / alpha), the largest j on ties (1-based).
inline std::size_t j_star(std::span<const double> nulls, std::size_t n, double alpha) {
  detail::require_alpha(alpha);
  const auto sorted = detail::sorted_copy(nulls);
  detail::require_positive_nulls(sorted);
  if (n < sorted.size()) throw std::invalid_argument("j_star: n smaller than the null count");
  return detail::argmax_ratio(sorted, 1, n, alpha, [](std::size_t, std::int64_t) { return true; });
}

/// Sets min{(ceil(n p_(j*) / alpha) - j*)_+, n1} non-nulls to 0 and the rest to 1.
inline CompletedStudy informed_adversary(std::span<const double> nulls, std::size_t n1, std::size_t n,
                                         double alpha) {
  detail::require_counts(nulls.size(), n1, n);
  const std::size_t js = j_star(nulls, n, alpha);
  const auto sorted = detail::sorted_copy(nulls);
  const std::int64_t c = fdp_bound_denominator(sorted[js - 1], n, alpha);
  const std::size_t zeros = detail::positive_part_capped(c - static_cast<std::int64_t>(js), n1);
  CompletedStudy out{detail::nulls_then_nonnulls(nulls, n1, zeros), zeros, js, std::nullopt, std::nullopt};
  return out;
}

/// Like j_star but restricted to j with ceil(n p_(j) / alpha) - j <= n1; 0 if none qualifies.
inline std::size_t j_diamond(std::span<const double> nulls, std::size_t n1, std::size_t n, double alpha) {
  detail::require_alpha(alpha);
  detail::require_counts(nulls.size(), n1, n);
  const auto sorted = detail::sorted_copy(nulls);
  detail::require_positive_nulls(sorted);
  const auto budget = static_cast<std::int64_t>(n1);
  return detail::argmax_ratio(sorted, 1, n, alpha, [budget](std::size_t j, std::int64_t c) {
    return c - static_cast<std::int64_t>(j) <= budget;
  });
}

struct AntiConservativeResult {
  CompletedStudy completed;
  RejectionOutcome outcome;
};

/// Rejects the j_diamond smallest nulls plus (ceil(n p_(j_diamond) / alpha) - j_diamond)_+
/// zero-valued non-nulls. The returned study carries exactly those zeros.
inline AntiConservativeResult most_anti_conservative(std::span<const double> nulls, std::size_t n1,
                                                     std::size_t n, double alpha) {
  const std::size_t jd = j_diamond(nulls, n1, n, alpha);
  std::size_t zeros = 0;
  if (jd > 0) {
    const auto sorted = detail::sorted_copy(nulls);
    const std::int64_t c = fdp_bound_denominator(sorted[jd - 1], n, alpha);
    zeros = detail::positive_part_capped(c - static_cast<std::int64_t>(jd), n1);
  }
  CompletedStudy completed{detail::nulls_then_nonnulls(nulls, n1, zeros), zeros, std::nullopt, jd,
                           std::nullopt};
  std::vector<std::size_t> rejected;
  if (jd > 0) {
    const auto order = detail::order_by_value(nulls);
    rejected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(jd));
    for (std::size_t k = 0; k < zeros; ++k) rejected.push_back(nulls.size() + k);
  }
  auto outcome = RejectionOutcome::from_indices(completed.study, std::move(rejected));
  return AntiConservativeResult{std::move(completed), std::move(outcome)};
}

/// Number of zero non-nulls chosen without seeing the smallest null.
/// `tail` holds p_(2) <= ... <= p_(n0), so n0 = tail.size() + 1.
inline std::size_t bonferroni_masked_T(std::span<const double> tail, std::size_t n, std::size_t n1,
                                       double alpha, MaskedStrategy strategy) {
  detail::require_alpha(alpha);
  if (tail.empty()) throw std::invalid_argument("bonferroni_masked_T: needs n0 >= 2");
  if (!std::is_sorted(tail.begin(), tail.end())) {
    throw std::invalid_argument("bonferroni_masked_T: input must be sorted ascending");
  }
  if (tail.front() <= 0.0) throw std::invalid_argument("bonferroni_masked_T: null p-values must be positive");
  if (n < tail.size() + 1) throw std::invalid_argument("bonferroni_masked_T: n smaller than the null count");
  if (n1 == 0) return 0;
  auto all = [](std::size_t, std::int64_t) { return true; };
  switch (strategy) {
    case MaskedStrategy::PlugInSecond: {
      // p_(2) stands in for the hidden p_(1)
      std::vector<double> stand_in;
      stand_in.reserve(tail.size() + 1);
      stand_in.push_back(tail.front());
      stand_in.insert(stand_in.end(), tail.begin(), tail.end());
      const std::size_t js = detail::argmax_ratio(stand_in, 1, n, alpha, all);
      const std::int64_t c = fdp_bound_denominator(stand_in[js - 1], n, alpha);
      return detail::positive_part_capped(c - static_cast<std::int64_t>(js), n1);
    }
    case MaskedStrategy::ShiftedJStar: {
      // positions 2..n0 of the full sorted vector; tail[j - 2] is p_(j)
      std::size_t best_j = 0;
      Ratio best{0, 1};
      std::int64_t best_c = 1;
      for (std::size_t j = 2; j <= tail.size() + 1; ++j) {
        const std::int64_t c = fdp_bound_denominator(tail[j - 2], n, alpha);
        const Ratio r{static_cast<std::int64_t>(j), c};
        if (best_j == 0 || r >= best) {
          best = r;
          best_j = j;
          best_c = c;
        }
      }
      return detail::positive_part_capped(best_c - static_cast<std::int64_t>(best_j), n1);
    }
  }
  throw std::invalid_argument("bonferroni_masked_T: unknown strategy");
}

/// Replaces the non-null entries of `generated` according to `adv`, keeping
/// every null value and the null mask. The first k non-null indices get 0.
inline CompletedStudy apply_adversary(const AdversarySpec& adv, const PValueStudy& generated, double alpha) {
  detail::require_alpha(alpha);
  const std::size_t n = generated.n();
  const std::size_t n1 = generated.n1();
  const auto nulls = generated.null_pvalues();
  if (nulls.empty()) throw std::invalid_argument("apply_adversary: study has no nulls");

  CompletedStudy out{generated, 0, std::nullopt, std::nullopt, std::nullopt};
  std::visit(
      [&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, InformedAdversary>) {
          const std::size_t js = j_star(nulls, n, alpha);
          const auto sorted = detail::sorted_copy(nulls);
          const std::int64_t c = fdp_bound_denominator(sorted[js - 1], n, alpha);
          out.zero_count = detail::positive_part_capped(c - static_cast<std::int64_t>(js), n1);
          out.j_star = js;
        } else if constexpr (std::is_same_v<A, MostAntiConservativeAdversary>) {
          const std::size_t jd = j_diamond(nulls, n1, n, alpha);
          if (jd > 0) {
            const auto sorted = detail::sorted_copy(nulls);
            const std::int64_t c = fdp_bound_denominator(sorted[jd - 1], n, alpha);
            out.zero_count = detail::positive_part_capped(c - static_cast<std::int64_t>(jd), n1);
          }
          out.j_diamond = jd;
        } else if constexpr (std::is_same_v<A, BonferroniMaskedAdversary>) {
          if (nulls.size() < 2) throw std::invalid_argument("Bonferroni-masked adversary needs n0 >= 2");
          auto sorted = detail::sorted_copy(nulls);
          const std::span<const double> tail(sorted.data() + 1, sorted.size() - 1);
          out.zero_count = bonferroni_masked_T(tail, n, n1, alpha, a.strategy);
          out.masked_T = out.zero_count;
        } else {
          if (a.count > n1) throw std::invalid_argument("FixedZeros: more zeros than non-nulls");
          out.zero_count = a.count;
        }
      },
      adv);

  std::vector<double> p(generated.pvalues().begin(), generated.pvalues().end());
  std::size_t placed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (generated.is_null(i)) continue;
    p[i] = placed < out.zero_count ? 0.0 : 1.0;
    ++placed;
  }
  out.study = PValueStudy(std::move(p), generated.null_mask());
  return out;
}

inline std::string describe(const AdversarySpec& adv) {
  return std::visit(
      [](const auto& a) -> std::string {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, InformedAdversary>) return "informed";
        else if constexpr (std::is_same_v<A, MostAntiConservativeAdversary>) return "most_anti_conservative";
        else if constexpr (std::is_same_v<A, BonferroniMaskedAdversary>) return std::string("bonferroni_masked_") + to_string(a.strategy);
        else return "fixed_zeros_" + std::to_string(a.count);
      },
      adv);
}

}  // namespace fdrlink
