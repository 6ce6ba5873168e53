#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace fdrlink {

// Ceiling that first snaps values lying within one ulp of an integer onto
// that integer, so 2.0000000000000004 maps to 2 rather than 3.
inline std::int64_t snapped_ceil(double x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("snapped_ceil: non-finite argument");
  }
  const double nearest = std::nearbyint(x);
  const double ulp = std::nextafter(std::fabs(x), INFINITY) - std::fabs(x);
  if (std::fabs(x - nearest) <= ulp) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::ceil(x));
}

/// Neumaier compensated accumulator.
template <typename Real = double>
class CompensatedSum {
 public:
  void add(Real x) {
    const Real t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Real value() const { return sum_ + comp_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

namespace detail {
inline double pairwise_sum_impl(const double* data, std::size_t size) {
  constexpr std::size_t kLeaf = 64;
  if (size <= kLeaf) {
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i < size; ++i) acc.add(data[i]);
    return acc.value();
  }
  const std::size_t half = size / 2;
  CompensatedSum<double> acc;
  acc.add(pairwise_sum_impl(data, half));
  acc.add(pairwise_sum_impl(data + half, size - half));
  return acc.value();
}
}  // namespace detail

// Pairwise summation with compensated leaves. The reduction tree depends only
// on the length of the input, so equal inputs give bit-identical sums.
inline double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return detail::pairwise_sum_impl(values.data(), values.size());
}

inline void require_open_unit(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in (0, 1)");
  }
}

}  // namespace fdrlink
