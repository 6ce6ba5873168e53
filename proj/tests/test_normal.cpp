#include <catch_amalgamated.hpp>

#include <cmath>

#include "fdrlink/normal.hpp"

using namespace fdrlink;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

// Reference values from 40-digit arithmetic.

TEST_CASE("normal_quantile matches high-precision references") {
  CHECK_THAT(normal_quantile(0.975), WithinAbs(1.9599639845400542355, 1e-12));
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK_THAT(normal_quantile(0.001), WithinAbs(-3.0902323061678135415, 1e-12));
  CHECK_THAT(normal_quantile(0.3), WithinAbs(-0.52440051270804078404, 1e-12));
  CHECK_THAT(normal_quantile(1e-10), WithinAbs(-6.3613409024040562047, 1e-12));
  CHECK_THAT(normal_quantile(1e-20), WithinAbs(-9.2623400897984075737, 1e-12));
  CHECK_THAT(normal_quantile(1e-300), WithinAbs(-37.047096299361199237, 1e-12));
  // reference for the double nearest 0.999999, not the decimal
  CHECK_THAT(normal_quantile(0.999999), WithinAbs(4.7534243088170877657, 1e-12));
}

TEST_CASE("normal_quantile domain") {
  CHECK(std::isinf(normal_quantile(0.0)));
  CHECK(std::isinf(normal_quantile(1.0)));
  CHECK_THROWS(normal_quantile(-0.1));
  CHECK_THROWS(normal_quantile(1.5));
}

TEST_CASE("normal_cdf and normal_sf match references") {
  CHECK_THAT(normal_cdf(1.5), WithinAbs(0.933192798731141934, 1e-15));
  CHECK_THAT(normal_cdf(-3.0), WithinAbs(0.0013498980316300945267, 1e-15));
  CHECK_THAT(normal_cdf(-8.0), WithinRel(6.2209605742717841235e-16, 1e-13));
  CHECK_THAT(normal_sf(5.0), WithinRel(2.8665157187919391167e-7, 1e-13));
  CHECK_THAT(normal_sf(10.0), WithinRel(7.619853024160526066e-24, 1e-13));
  CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("quantile inverts the cdf across the range") {
  // above x = 5 the cdf is within 3e-7 of 1 and carries too few digits to invert
  for (double x = -30.0; x <= 5.0; x += 0.37) {
    const double p = normal_cdf(x);
    CHECK_THAT(normal_quantile(p), WithinAbs(x, 1e-9 * std::max(1.0, std::fabs(x))));
  }
  for (double x = 0.0; x <= 30.0; x += 0.37) {
    CHECK_THAT(-normal_quantile(normal_sf(x)), WithinAbs(x, 1e-9 * std::max(1.0, x)));
  }
  for (double p = 0.0005; p < 1.0; p += 0.0005) {
    CHECK_THAT(normal_cdf(normal_quantile(p)), WithinAbs(p, 1e-13));
  }
}
