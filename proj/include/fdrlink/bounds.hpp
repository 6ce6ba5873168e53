#pragma once

// Closed-form FDR bounds and the linking bound
//
//   link(t) = t + t * integral_t^1 F(x) / x^2 dx,   t = pi0 * alpha,
//
// evaluated for analytic curves (Linear, WorstCase) and for empirical CDFs of
// Simes p-values. Nothing here uses numeric quadrature.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fdrlink/numeric.hpp"

namespace fdrlink {

/// F(x) = min(c x, 1).
struct LinearCurve {
  double slope = 1.0;
};

/// F(x) = 1.
struct WorstCaseCurve {};

/// Right-continuous empirical CDF of samples in [0, 1].
class EmpiricalCurve {
 public:
  explicit EmpiricalCurve(std::vector<double> samples) : knots_(std::move(samples)) {
    if (knots_.empty()) throw std::invalid_argument("EmpiricalCurve: no samples");
    for (double s : knots_) {
      if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("EmpiricalCurve: sample outside [0, 1]");
    }
    std::sort(knots_.begin(), knots_.end());
    // tail_inverse_[k] = sum_{i >= k} 1 / s_i, accumulated from the largest knot down
    tail_inverse_.assign(knots_.size() + 1, 0.0L);
    CompensatedSum<long double> acc;
    for (std::size_t k = knots_.size(); k-- > 0;) {
      if (knots_[k] > 0.0) acc.add(1.0L / static_cast<long double>(knots_[k]));
      tail_inverse_[k] = acc.value();
    }
  }

  std::size_t size() const { return knots_.size(); }
  const std::vector<double>& knots() const { return knots_; }

  double cdf(double x) const {
    return static_cast<double>(count_at_most(x)) / static_cast<double>(knots_.size());
  }

  /// link(t) for t in (0, 1]. Each sample s contributes min(t / s, 1), which
  /// is the antiderivative -1/x summed over the constancy intervals of F.
  double link(double t) const {
    const std::size_t below = count_at_most(t);
    const long double value =
        static_cast<long double>(below) + static_cast<long double>(t) * tail_inverse_[below];
    return static_cast<double>(value / static_cast<long double>(knots_.size()));
  }

 private:
  std::size_t count_at_most(double x) const {
    return static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), x) - knots_.begin());
  }

  std::vector<double> knots_;
  std::vector<long double> tail_inverse_;
};

using Fdr0Curve = std::variant<LinearCurve, WorstCaseCurve, EmpiricalCurve>;

inline double fdr0_at(const Fdr0Curve& curve, double x) {
  struct Visitor {
    double x;
    double operator()(const LinearCurve& c) const { return std::clamp(c.slope * x, 0.0, 1.0); }
    double operator()(const WorstCaseCurve&) const { return 1.0; }
    double operator()(const EmpiricalCurve& c) const { return c.cdf(x); }
  };
  return std::visit(Visitor{x}, curve);
}

/// link(t) = t + t * integral_t^1 F(x)/x^2 dx, unclamped.
inline double link_map(const Fdr0Curve& curve, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("link_map: t must lie in (0, 1]");
  struct Visitor {
    double t;
    double operator()(const LinearCurve& c) const {
      if (!(c.slope >= 0.0)) throw std::invalid_argument("LinearCurve: slope must be non-negative");
      if (c.slope == 0.0) return t;
      const double ct = c.slope * t;
      if (ct >= 1.0) return 1.0;  // F = 1 on [t, 1]
      if (c.slope <= 1.0) return t + ct * std::log(1.0 / t);
      // F = c x below 1/c and 1 above it
      return ct * (1.0 - std::log(ct));
    }
    double operator()(const WorstCaseCurve&) const { return 1.0; }
    double operator()(const EmpiricalCurve& c) const { return c.link(t); }
  };
  return std::visit(Visitor{t}, curve);
}

/// FDR-linking bound pi0*alpha + pi0*alpha * integral_{pi0 alpha}^1 F(x)/x^2 dx, clamped to [0, 1].
inline double fdr_link_bound(double pi0, double alpha, const Fdr0Curve& curve) {
  require_open_unit(alpha, "alpha");
  if (!(pi0 > 0.0 && pi0 <= 1.0)) throw std::domain_error("pi0 must lie in (0, 1]");
  return std::clamp(link_map(curve, pi0 * alpha), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Harmonic numbers

/// S(n) in long double. Direct compensated summation (smallest terms first)
/// up to 10^6; beyond that the Euler-Maclaurin expansion, whose truncation
/// error there is below 1e-36.
inline long double harmonic_extended(std::uint64_t n) {
  if (n == 0) throw std::domain_error("harmonic: n must be at least 1");
  if (n <= 1'000'000) {
    CompensatedSum<long double> acc;
    for (std::uint64_t k = n; k >= 1; --k) acc.add(1.0L / static_cast<long double>(k));
    return acc.value();
  }
  constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;
  const long double x = static_cast<long double>(n);
  const long double inv2 = 1.0L / (x * x);
  return std::log(x) + kEulerGamma + 1.0L / (2.0L * x) -
         inv2 * (1.0L / 12.0L - inv2 * (1.0L / 120.0L - inv2 / 252.0L));
}

inline double harmonic(std::uint64_t n) { return static_cast<double>(harmonic_extended(n)); }

// ---------------------------------------------------------------------------
// Closed-form bounds

namespace detail {
inline void require_pi0(double pi0) {
  if (!(pi0 > 0.0 && pi0 <= 1.0)) throw std::domain_error("pi0 must lie in (0, 1]");
}
inline double t_plus_t_log(double t) { return t + t * std::log(1.0 / t); }
}  // namespace detail

/// alpha + alpha log(1/alpha).
inline double prdn_bound(double alpha) {
  require_open_unit(alpha, "alpha");
  return detail::t_plus_t_log(alpha);
}

/// pi0 alpha + pi0 alpha log(1/(pi0 alpha)).
inline double prdn_bound_pi0(double pi0, double alpha) {
  require_open_unit(alpha, "alpha");
  detail::require_pi0(pi0);
  return detail::t_plus_t_log(pi0 * alpha);
}

inline double log_correction_raw(std::uint64_t n, double pi0, double alpha) {
  require_open_unit(alpha, "alpha");
  detail::require_pi0(pi0);
  return harmonic(n) * pi0 * alpha;
}

/// min{S(n) pi0 alpha, 1}.
inline double log_correction_bound(std::uint64_t n, double pi0, double alpha) {
  return std::min(log_correction_raw(n, pi0, alpha), 1.0);
}

/// 1 if alpha >= 1/(pi0 S(n0)), else x log(e/x) with x = S(n0) pi0 alpha.
inline double arbitrary_dep_bound(std::uint64_t n0, double pi0, double alpha) {
  require_open_unit(alpha, "alpha");
  detail::require_pi0(pi0);
  const double x = harmonic(n0) * pi0 * alpha;
  if (x >= 1.0) return 1.0;
  return x * (1.0 - std::log(x));
}

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool empty() const { return !(lower < upper); }
  bool contains(double x) const { return lower < x && x < upper; }
};

/// Open range of alpha on which arbitrary_dep_bound beats log_correction_bound.
inline Interval improvement_range(std::uint64_t n, std::uint64_t n0, double pi0) {
  if (n0 == 0) throw std::domain_error("improvement_range: n0 must be at least 1");
  if (n < n0) throw std::domain_error("improvement_range: n must be at least n0");
  detail::require_pi0(pi0);
  const long double s_n = harmonic_extended(n);
  const long double s_n0 = harmonic_extended(n0);
  const long double upper = 1.0L / (static_cast<long double>(pi0) * s_n0);
  const long double lower = n == n0 ? upper : upper * std::exp(1.0L - s_n / s_n0);
  return Interval{std::clamp(static_cast<double>(lower), 0.0, 1.0),
                  std::clamp(static_cast<double>(upper), 0.0, 1.0)};
}

inline double fdx_raw(double pi0, double alpha, double gamma) {
  require_open_unit(alpha, "alpha");
  require_open_unit(gamma, "gamma");
  detail::require_pi0(pi0);
  return pi0 * alpha / gamma;
}

/// min{pi0 alpha / gamma, 1}: bound on P(FDP >= gamma) under PRDN.
inline double fdx_bound(double pi0, double alpha, double gamma) {
  return std::min(fdx_raw(pi0, alpha, gamma), 1.0);
}

/// min{S(n) alpha, 1}, the global-null worst case under arbitrary dependence.
inline double guo_rao_reference(std::uint64_t n, double alpha) {
  require_open_unit(alpha, "alpha");
  return std::min(harmonic(n) * alpha, 1.0);
}

// ---------------------------------------------------------------------------
// Reports

enum class BoundKind { Prdn, PrdnPi0, LogCorrection, ArbitraryDependence, Fdx, GuoRao, LinkLinear };

struct BoundParams {
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> n0;
  std::optional<double> pi0;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::optional<double> c;
};

struct BoundReport {
  std::string name;
  BoundParams params;
  double value = 0.0;
  bool clamped = false;  // the unclamped value exceeded 1 or the bound is vacuous
};

inline const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Prdn: return "prdn";
    case BoundKind::PrdnPi0: return "prdn_pi0";
    case BoundKind::LogCorrection: return "log_correction";
    case BoundKind::ArbitraryDependence: return "arbitrary_dependence";
    case BoundKind::Fdx: return "fdx";
    case BoundKind::GuoRao: return "guo_rao_reference";
    case BoundKind::LinkLinear: return "fdr_link_linear";
  }
  return "?";
}

inline BoundReport evaluate_bound(BoundKind kind, const BoundParams& params) {
  auto need = [&](const auto& field, const char* name) {
    if (!field) throw std::invalid_argument(std::string(to_string(kind)) + ": missing parameter " + name);
    return *field;
  };
  double raw = 0.0;
  bool vacuous = false;
  switch (kind) {
    case BoundKind::Prdn: raw = prdn_bound(need(params.alpha, "alpha")); break;
    case BoundKind::PrdnPi0: raw = prdn_bound_pi0(need(params.pi0, "pi0"), need(params.alpha, "alpha")); break;
    case BoundKind::LogCorrection:
      raw = log_correction_raw(need(params.n, "n"), need(params.pi0, "pi0"), need(params.alpha, "alpha"));
      break;
    case BoundKind::ArbitraryDependence: {
      const double pi0 = need(params.pi0, "pi0");
      const double alpha = need(params.alpha, "alpha");
      const std::uint64_t n0 = need(params.n0, "n0");
      raw = arbitrary_dep_bound(n0, pi0, alpha);
      vacuous = harmonic(n0) * pi0 * alpha >= 1.0;
      break;
    }
    case BoundKind::Fdx:
      raw = fdx_raw(need(params.pi0, "pi0"), need(params.alpha, "alpha"), need(params.gamma, "gamma"));
      break;
    case BoundKind::GuoRao: {
      const double alpha = need(params.alpha, "alpha");
      require_open_unit(alpha, "alpha");
      raw = harmonic(need(params.n, "n")) * alpha;
      break;
    }
    case BoundKind::LinkLinear: {
      const double pi0 = need(params.pi0, "pi0");
      const double alpha = need(params.alpha, "alpha");
      require_open_unit(alpha, "alpha");
      detail::require_pi0(pi0);
      raw = link_map(LinearCurve{need(params.c, "c")}, pi0 * alpha);
      break;
    }
  }
  BoundReport report{to_string(kind), params, std::min(raw, 1.0), raw > 1.0 || vacuous};
  return report;
}

}  // namespace fdrlink
