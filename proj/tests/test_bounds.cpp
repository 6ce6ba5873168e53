#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fdrlink/bounds.hpp"
#include "generators.hpp"

using namespace fdrlink;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Adaptive Simpson on [a, b]; the quadrature oracle for the linking integral.
double simpson(const std::function<double(double)>& f, double a, double b, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fhi, double fmid, double est, double tol, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::fabs(left + right - est) <= 15.0 * tol) return left + right + (left + right - est) / 15.0;
        return rec(lo, mid, flo, fmid, flm, left, tol / 2.0, d - 1) + rec(mid, hi, fmid, fhi, frm, right, tol / 2.0, d - 1);
      };
  return rec(a, b, fa, fb, fm, whole, eps, depth);
}

// t + t * integral_t^1 F/x^2, split at the given breakpoints so each piece is smooth.
double link_by_quadrature(const std::function<double(double)>& F, double t, std::vector<double> breaks) {
  breaks.push_back(t);
  breaks.push_back(1.0);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = std::max(breaks[i], t), b = breaks[i + 1];
    if (b <= a) continue;
    // F is constant or linear between breakpoints; evaluate it just inside the piece
    const double fl = F(a + (b - a) * 1e-12);
    const bool constant = F(b - (b - a) * 1e-12) == fl && F(0.5 * (a + b)) == fl;
    if (constant) {
      total += fl * (1.0 / a - 1.0 / b);
    } else {
      total += simpson([&](double x) { return F(x) / (x * x); }, a, b, 1e-15, 60);
    }
  }
  return t + t * total;
}

}  // namespace

TEST_CASE("harmonic numbers") {
  CHECK(harmonic(1) == 1.0);
  CHECK_THAT(harmonic(3), WithinRel(11.0 / 6.0, 1e-15));
  CHECK_THAT(harmonic(10), WithinRel(7381.0 / 2520.0, 1e-15));
  CHECK_THAT(harmonic(100), WithinRel(5.187377517639620260805118, 1e-15));
  CHECK_THAT(harmonic(1'000'000), WithinRel(14.39272672286572363138113, 1e-15));
  CHECK_THAT(harmonic(10'000'000), WithinRel(16.69531136585985181539912, 1e-15));
  CHECK_THAT(harmonic(1'000'000'000), WithinRel(21.3004815023479440166851, 1e-15));
  CHECK_THROWS(harmonic(0));
}

TEST_CASE("harmonic: the asymptotic branch joins the direct sum") {
  const long double direct = harmonic_extended(1'000'000);
  const long double next = harmonic_extended(1'000'001);
  CHECK(std::fabs(static_cast<double>(next - direct - 1.0L / 1'000'001.0L)) < 1e-17);
}

TEST_CASE("PRDN bound examples") {
  CHECK_THAT(prdn_bound(1.0 / std::exp(1.0)), WithinRel(2.0 / std::exp(1.0), 1e-14));
  CHECK_THAT(prdn_bound(0.05), WithinRel(0.19978661367769955, 1e-14));
  CHECK_THAT(prdn_bound_pi0(0.5, 0.05), WithinRel(0.11722198635284841, 1e-14));
  CHECK_THROWS(prdn_bound(0.0));
  CHECK_THROWS(prdn_bound_pi0(0.0, 0.1));
  CHECK_THROWS(prdn_bound_pi0(1.5, 0.1));
}

TEST_CASE("log-correction and Guo-Rao reference") {
  CHECK(log_correction_bound(1, 1.0, 0.05) == 0.05);
  CHECK_THAT(log_correction_bound(3, 1.0, 0.1), WithinRel(11.0 / 60.0, 1e-14));
  CHECK(log_correction_bound(1000, 1.0, 0.5) == 1.0);
  CHECK(guo_rao_reference(1, 0.07) == 0.07);
  CHECK_THAT(guo_rao_reference(3, 0.1), WithinRel(11.0 / 60.0, 1e-14));
  CHECK_THAT(guo_rao_reference(10'000, 0.01), WithinRel(0.097876060360443823, 1e-14));
  CHECK(guo_rao_reference(10'000, 0.2) == 1.0);
}

TEST_CASE("arbitrary-dependence bound") {
  CHECK_THAT(arbitrary_dep_bound(2, 1.0, 0.1), WithinRel(0.4345679977328822, 1e-14));
  const double edge = 1.0 / (0.5 * harmonic(10));
  CHECK(arbitrary_dep_bound(10, 0.5, std::nextafter(edge, 1.0)) == 1.0);
  CHECK_THAT(arbitrary_dep_bound(10, 0.5, std::nextafter(edge, 0.0)), WithinAbs(1.0, 1e-12));
}

TEST_CASE("arbitrary-dependence bound is the linking bound of a linear curve") {
  gen::Engine rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n0 = static_cast<std::uint64_t>(gen::size_in(rng, 1, 5000));
    const double pi0 = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const double alpha = gen::alpha(rng);
    const double expected = arbitrary_dep_bound(n0, pi0, alpha);
    REQUIRE_THAT(fdr_link_bound(pi0, alpha, LinearCurve{harmonic(n0)}), WithinRel(expected, 1e-12));
  }
}

TEST_CASE("improvement range") {
  const Interval r = improvement_range(200, 100, 0.5);
  CHECK_THAT(r.lower, WithinRel(0.33748903841767809, 1e-13));
  CHECK_THAT(r.upper, WithinRel(0.38555127194792011, 1e-13));
  CHECK(improvement_range(50, 50, 1.0).empty());
  CHECK_THROWS(improvement_range(10, 20, 0.5));
  gen::Engine rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n0 = static_cast<std::uint64_t>(gen::size_in(rng, 1, 2000));
    const auto n = n0 + static_cast<std::uint64_t>(gen::size_in(rng, 1, 20000));
    const double pi0 = static_cast<double>(n0) / static_cast<double>(n);
    const Interval range = improvement_range(n, n0, pi0);
    REQUIRE(range.lower >= 0.0);
    REQUIRE(range.upper <= 1.0);
    if (range.empty()) continue;
    for (int k = 1; k < 50; ++k) {
      const double alpha = range.lower + (range.upper - range.lower) * k / 50.0;
      if (!range.contains(alpha) || alpha >= 1.0) continue;
      REQUIRE(arbitrary_dep_bound(n0, pi0, alpha) < log_correction_bound(n, pi0, alpha));
    }
  }
}

TEST_CASE("FDX bound") {
  CHECK_THAT(fdx_bound(1.0, 0.05, 0.5), WithinRel(0.1, 1e-15));
  CHECK(fdx_bound(1.0, 0.3, 0.2) == 1.0);
  CHECK_THAT(fdx_bound(0.5, 0.1, 0.25), WithinRel(0.2, 1e-15));
  CHECK_THROWS(fdx_bound(1.0, 0.1, 1.5));
  CHECK_THROWS(fdx_bound(1.0, 0.1, 0.0));
}

TEST_CASE("linking bound for analytic curves") {
  CHECK(fdr_link_bound(0.7, 0.2, WorstCaseCurve{}) == 1.0);
  CHECK_THAT(fdr_link_bound(1.0, 0.05, LinearCurve{1.0}), WithinRel(0.19978661367769955, 1e-14));
  CHECK_THAT(link_map(LinearCurve{2.0}, 0.1), WithinRel(0.52188758248682007, 1e-14));
  CHECK_THAT(link_map(LinearCurve{0.5}, 0.03), WithinRel(0.082598368459799725, 1e-14));
  CHECK_THAT(link_map(LinearCurve{3.0}, 0.05), WithinRel(0.4345679977328822, 1e-14));
  CHECK(link_map(LinearCurve{0.0}, 0.3) == 0.3);
  CHECK(link_map(LinearCurve{5.0}, 0.3) == 1.0);
  CHECK_THROWS(link_map(LinearCurve{-1.0}, 0.3));
  CHECK_THROWS(fdr_link_bound(1.0, 1.0, LinearCurve{1.0}));
}

TEST_CASE("linear curve with c = 1 reproduces the strengthened PRDN bound") {
  gen::Engine rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const double pi0 = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    const double alpha = gen::alpha(rng);
    REQUIRE(fdr_link_bound(pi0, alpha, LinearCurve{1.0}) == prdn_bound_pi0(pi0, alpha));
    REQUIRE(prdn_bound_pi0(pi0, alpha) <= prdn_bound(alpha));
  }
}

TEST_CASE("empirical curve: hand-computed values") {
  const EmpiricalCurve c({1.0, 0.1, 0.4});
  CHECK(c.cdf(0.05) == 0.0);
  CHECK(c.cdf(0.1) == 1.0 / 3.0);
  CHECK(c.cdf(0.4) == 2.0 / 3.0);
  CHECK(c.cdf(1.0) == 1.0);
  // (1 + 0.5 + 0.2) / 3
  CHECK_THAT(c.link(0.2), WithinRel(1.7 / 3.0, 1e-15));
  CHECK(c.link(1.0) == 1.0);
  CHECK_THROWS(EmpiricalCurve({}));
  CHECK_THROWS(EmpiricalCurve({0.5, 1.2}));
}

TEST_CASE("closed forms agree with quadrature") {
  gen::Engine rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const double c = std::uniform_real_distribution<double>(0.0, 6.0)(rng);
    const double t = std::uniform_real_distribution<double>(0.001, 0.99)(rng);
    const double closed = link_map(LinearCurve{c}, t);
    const double quad = link_by_quadrature([c](double x) { return std::min(c * x, 1.0); }, t,
                                           c > 1.0 ? std::vector<double>{1.0 / c} : std::vector<double>{});
    REQUIRE_THAT(closed, WithinRel(quad, 1e-10));
  }
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> samples(gen::size_in(rng, 1, 60));
    for (double& s : samples) s = gen::unit(rng);
    const EmpiricalCurve curve(samples);
    const double t = std::uniform_real_distribution<double>(0.001, 0.99)(rng);
    const double quad = link_by_quadrature([&](double x) { return curve.cdf(x); }, t, samples);
    REQUIRE_THAT(curve.link(t), WithinRel(quad, 1e-10));
  }
}

TEST_CASE("the linking map is non-decreasing") {
  gen::Engine rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> samples(gen::size_in(rng, 1, 500));
    for (double& s : samples) s = trial % 2 ? gen::unit(rng) : gen::grid_pvalue(rng);
    const Fdr0Curve curves[] = {EmpiricalCurve(samples), LinearCurve{gen::unit(rng) * 4.0}, WorstCaseCurve{}};
    for (const auto& curve : curves) {
      double prev = 0.0;
      for (int k = 1; k <= 2000; ++k) {
        const double v = link_map(curve, k / 2000.0);
        REQUIRE(v >= prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("every bound is non-decreasing in alpha") {
  double prev[6] = {0, 0, 0, 0, 0, 0};
  for (int k = 1; k < 1000; ++k) {
    const double a = k / 1000.0;
    const double now[6] = {prdn_bound(a), prdn_bound_pi0(0.3, a), log_correction_bound(50, 0.3, a),
                           arbitrary_dep_bound(30, 0.3, a), fdx_bound(0.3, a, 0.2), guo_rao_reference(50, a)};
    for (int i = 0; i < 6; ++i) {
      REQUIRE(now[i] >= prev[i]);
      prev[i] = now[i];
    }
  }
}

TEST_CASE("bound reports echo parameters and flag clamping") {
  BoundParams p;
  p.n = 100;
  p.pi0 = 1.0;
  p.alpha = 0.5;
  const auto r = evaluate_bound(BoundKind::LogCorrection, p);
  CHECK(r.name == "log_correction");
  CHECK(r.value == 1.0);
  CHECK(r.clamped);
  CHECK(*r.params.n == 100);
  p.alpha = 0.01;
  const auto small = evaluate_bound(BoundKind::LogCorrection, p);
  CHECK_FALSE(small.clamped);
  CHECK_THAT(small.value, WithinRel(harmonic(100) * 0.01, 1e-15));
  CHECK_THROWS(evaluate_bound(BoundKind::Fdx, p));
  p.n0 = 5;
  p.alpha = 0.9;
  CHECK(evaluate_bound(BoundKind::ArbitraryDependence, p).clamped);
}
