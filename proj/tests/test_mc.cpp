#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fdrlink/mc.hpp"

using namespace fdrlink;
using Catch::Matchers::WithinAbs;

namespace {

double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - x[i], x[i] - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical(std::size_t reps) { return 1.6276 / std::sqrt(static_cast<double>(reps)); }

McConfig config(std::size_t reps, std::uint64_t seed, std::size_t workers = 1) { return McConfig{reps, seed, workers}; }

bool same_bits(const McEstimate& a, const McEstimate& b) {
  return a.mean == b.mean && a.std_error == b.std_error && a.reps == b.reps && a.seed == b.seed;
}

}  // namespace

TEST_CASE("seed derivation is fixed") {
  // splitmix64 reference outputs for state 0 and 1
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(1) == 0x910A2DEC89025CC1ULL);
  CHECK(replication_seed(0, 0) == splitmix64(splitmix64(0)));
  CHECK(replication_seed(42, 7) == splitmix64(42 ^ splitmix64(7)));
  CHECK(replication_seed(1, 0) != replication_seed(0, 1));
}

TEST_CASE("results do not depend on the number of workers") {
  const GeneratorSpec g{EquicorrelatedNormal{40, 10, 0.3, Sidedness::One, {}}};
  const auto base = estimate_fdr(g, InformedAdversary{}, Procedure::StepUp, 0.1, config(3001, 9, 1));
  for (std::size_t w : {2, 3, 7, 64}) {
    REQUIRE(same_bits(base, estimate_fdr(g, InformedAdversary{}, Procedure::StepUp, 0.1, config(3001, 9, w))));
  }
  const auto d1 = estimate_D_alpha(0.2, config(500, 4, 1));
  CHECK(same_bits(d1, estimate_D_alpha(0.2, config(500, 4, 5))));
  const auto s1 = simes_samples(GeneratorSpec{IidUniform{5, 0}}, config(1000, 3, 1));
  CHECK(s1 == simes_samples(GeneratorSpec{IidUniform{5, 0}}, config(1000, 3, 4)));
}

TEST_CASE("replicate propagates exceptions from workers") {
  CHECK_THROWS_AS(replicate(config(100, 1, 4),
                            [](std::uint64_t, std::size_t i) -> double {
                              if (i == 77) throw std::runtime_error("boom");
                              return 0.0;
                            }),
                  std::runtime_error);
  CHECK_THROWS(replicate(config(0, 1), [](std::uint64_t, std::size_t) { return 0.0; }));
}

TEST_CASE("summary statistics") {
  const std::vector<double> v{0.0, 1.0, 1.0, 0.0};
  const auto est = summarize(v, 5);
  CHECK(est.mean == 0.5);
  CHECK_THAT(est.std_error, WithinAbs(std::sqrt(1.0 / 3.0) / 2.0, 1e-15));
  CHECK(est.std_error_defined);
  CHECK(est.seed == 5);
  const std::vector<double> one{0.25};
  const auto single = summarize(one, 5);
  CHECK(single.mean == 0.25);
  CHECK(single.std_error == 0.0);
  CHECK_FALSE(single.std_error_defined);
}

TEST_CASE("global-null FDR of step-up equals alpha") {
  const GeneratorSpec g{IidUniform{20, 0}};
  for (double alpha : {0.05, 0.2}) {
    const auto est = estimate_fdr(g, std::nullopt, Procedure::StepUp, alpha, config(40000, 11));
    CHECK(std::fabs(est.mean - alpha) <= 3.0 * est.std_error);
  }
}

TEST_CASE("a single replication reports its FDP with zero stderr") {
  const GeneratorSpec g{IidUniform{5, 5}};
  const auto est = estimate_fdr(g, InformedAdversary{}, Procedure::StepUp, 0.3, config(1, 8));
  const double realized = replication_fdp(g, InformedAdversary{}, Procedure::StepUp, 0.3, replication_seed(8, 0)).value();
  CHECK(est.mean == realized);
  CHECK(est.std_error == 0.0);
  CHECK_FALSE(est.std_error_defined);
}

TEST_CASE("FDP moments") {
  const GeneratorSpec g{EquicorrelatedNormal{30, 10, 0.5, Sidedness::One, {}}};
  const auto cfg = config(4000, 12);
  const auto fdr = estimate_fdr(g, InformedAdversary{}, Procedure::StepUp, 0.1, cfg);
  const auto m1 = estimate_fdp_moment(g, InformedAdversary{}, Procedure::StepUp, 0.1, 1, cfg);
  CHECK(same_bits(fdr, m1));
  const auto m2 = estimate_fdp_moment(g, InformedAdversary{}, Procedure::StepUp, 0.1, 2, cfg);
  CHECK(m2.mean >= m1.mean * m1.mean);
  CHECK(m2.mean <= m1.mean);
  CHECK_THROWS(estimate_fdp_moment(g, InformedAdversary{}, Procedure::StepUp, 0.1, 0, cfg));
  // four identical nulls: FDP is 1 when p <= alpha and 0 otherwise, so every moment is alpha
  const GeneratorSpec all_null{BlockDependent{{4}, 4, WithinBlock::Identical, 0.0, {}, 2.0}};
  for (int k : {1, 2, 5}) {
    const auto m = estimate_fdp_moment(all_null, std::nullopt, Procedure::StepUp, 0.1, k, config(5000, 13));
    CHECK(std::fabs(m.mean - 0.1) <= 3.0 * m.std_error);
  }
}

TEST_CASE("FDX estimates") {
  const GeneratorSpec g{IidUniform{50, 500}};
  const auto cfg = config(4000, 14);
  CHECK_THROWS(estimate_fdx(g, InformedAdversary{}, Procedure::StepUp, 0.1, 1.5, cfg));
  CHECK_THROWS(estimate_fdx(g, InformedAdversary{}, Procedure::StepUp, 0.1, 0.0, cfg));
  for (double gamma : {0.1, 0.25, 0.5}) {
    const auto est = estimate_fdx(g, InformedAdversary{}, Procedure::StepUp, 0.1, gamma, cfg);
    CHECK(est.mean <= fdx_bound(50.0 / 550.0, 0.1, gamma) + 3.0 * est.std_error);
  }
  // every p-value 1: nothing is ever rejected
  const auto none = estimate_fdx(g, FixedZerosAdversary{0}, Procedure::StepUp, 0.001, 0.5, config(200, 1));
  CHECK(none.mean <= 0.05);
}

TEST_CASE("D_alpha lies between alpha and the PRDN bound") {
  for (double alpha : {0.1, 0.05, 0.01}) {
    const auto est = estimate_D_alpha(alpha, config(20000, 15));
    CHECK(est.mean > alpha);
    CHECK(est.mean <= prdn_bound(alpha) + 3.0 * est.std_error);
  }
  const auto d = estimate_D_alpha(0.1, config(20000, 16));
  CHECK(d.mean <= 0.3303);
  CHECK_THROWS(estimate_D_alpha(1.0, config(10, 1)));
}

TEST_CASE("doubling the D_alpha truncation cap moves the estimate by less than one stderr") {
  const double alpha = 0.05;
  const auto cfg = config(5000, 17);
  const auto capped = estimate_D_alpha(alpha, cfg, DAlphaOptions{2000});
  const auto doubled = estimate_D_alpha(alpha, cfg, DAlphaOptions{4000});
  CHECK(std::fabs(capped.mean - doubled.mean) < capped.std_error);
}

TEST_CASE("Simes p-values are uniform under independence and under identical nulls") {
  const std::size_t reps = 20000;
  const GeneratorSpec iid{IidUniform{25, 0}};
  CHECK(ks_uniform(simes_samples(iid, config(reps, 18))) < ks_critical(reps));
  const GeneratorSpec identical{BlockDependent{{25}, 25, WithinBlock::Identical, 0.0, {}, 2.0}};
  CHECK(ks_uniform(simes_samples(identical, config(reps, 19))) < ks_critical(reps));
  const GeneratorSpec single{IidUniform{1, 0}};
  CHECK(ks_uniform(simes_samples(single, config(reps, 20))) < ks_critical(reps));
  CHECK_THROWS(simes_samples(GeneratorSpec{EquicorrelatedNormal{5, 0, 0.0, Sidedness::One, {}}}, config(10, 1)));
}

TEST_CASE("Simes p-values are stochastically larger than uniform under positive dependence") {
  const std::size_t reps = 20000;
  const GeneratorSpec gens[] = {
      GeneratorSpec{EquicorrelatedNormal{30, 30, 0.5, Sidedness::One, {}}},
      GeneratorSpec{EquicorrelatedNormal{30, 30, 0.0, Sidedness::One, {}}},
      two_sided(GeneratorSpec{EquicorrelatedNormal{30, 30, 0.8, Sidedness::One, {}}}),
  };
  for (const auto& g : gens) {
    const EmpiricalCurve curve = estimate_fdr0_curve(g, config(reps, 21));
    double worst = -1.0;
    for (int k = 1; k < 1000; ++k) worst = std::max(worst, curve.cdf(k / 1000.0) - k / 1000.0);
    CHECK(worst <= ks_critical(reps));
  }
}

TEST_CASE("linking bound holds with the FDR_0 curve from the same draws") {
  const GeneratorSpec iid{IidUniform{50, 500}};
  double previous_slack = 1.0;
  for (double alpha : {0.2, 0.1, 0.05}) {
    const auto r = verify_linking(iid, InformedAdversary{}, alpha, config(4000, 22));
    CHECK(r.slack >= -3.0 * r.lhs.std_error);
    CHECK(r.slack == r.rhs - r.lhs.mean);
    CHECK(r.slack < previous_slack + 3.0 * r.lhs.std_error);
    previous_slack = r.slack;
  }
  const auto loose = verify_linking(iid, FixedZerosAdversary{0}, 0.1, config(4000, 23));
  // only nulls can be rejected, so the FDR is the global-null level pi0 alpha
  CHECK(std::fabs(loose.lhs.mean - 0.1 * 50.0 / 550.0) <= 3.0 * loose.lhs.std_error);
  CHECK(loose.slack > 3.0 * loose.lhs.mean);
  const auto global = verify_linking(GeneratorSpec{IidUniform{30, 0}}, std::nullopt, 0.1, config(4000, 24));
  CHECK(global.slack >= -3.0 * global.lhs.std_error);
}

TEST_CASE("every replication respects the FDP upper bound") {
  const GeneratorSpec gens[] = {
      GeneratorSpec{IidUniform{20, 200}},
      GeneratorSpec{EquicorrelatedNormal{60, 20, -1.0 / 19.0, Sidedness::One, {}}},
      GeneratorSpec{BlockDependent{{3, 3, 3, 3, 3, 3, 3, 3, 3, 3}, 3, WithinBlock::Identical, 0.0,
                                   std::vector<bool>{true, true, true, true, true, true, true, true, true, true,
                                                     true, true, true, true, true, false, false, false, false,
                                                     false, false, false, false, false, false, false, false,
                                                     false, false, false},
                                   2.0}},
  };
  const AdversarySpec advs[] = {InformedAdversary{}, MostAntiConservativeAdversary{},
                                BonferroniMaskedAdversary{MaskedStrategy::PlugInSecond},
                                BonferroniMaskedAdversary{MaskedStrategy::ShiftedJStar}, FixedZerosAdversary{3}};
  for (const auto& g : gens) {
    for (const auto& adv : advs) {
      for (std::uint64_t r = 0; r < 300; ++r) {
        const auto study = realize_study(g, adv, 0.1, replication_seed(25, r));
        const Ratio bound = fdp_upper_bound(study.null_pvalues(), study.n(), 0.1);
        for (auto proc : {Procedure::StepUp, Procedure::StepDown, Procedure::MostAntiConservative}) {
          REQUIRE(run_procedure(proc, study, 0.1).fdp() <= bound);
        }
      }
    }
  }
}

TEST_CASE("PRDN generators stay under the strengthened PRDN bound") {
  const GeneratorSpec g{EquicorrelatedNormal{110, 10, 0.4, Sidedness::One, {}}};
  for (double alpha : {0.05, 0.2}) {
    const auto est = estimate_fdr(g, InformedAdversary{}, Procedure::StepUp, alpha, config(4000, 26));
    CHECK(est.mean <= prdn_bound_pi0(10.0 / 110.0, alpha) + 3.0 * est.std_error);
  }
}
