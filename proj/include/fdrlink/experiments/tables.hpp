#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdrlink/bounds.hpp"
#include "fdrlink/experiments/output.hpp"
#include "fdrlink/mc.hpp"

namespace fdrlink::experiments {

struct BoundsTableParams {
  std::uint64_t n = 0;
  std::uint64_t n0 = 0;
  std::optional<double> pi0;  // defaults to n0 / n
  std::vector<double> alpha_grid;
  std::optional<double> gamma;
  std::optional<double> c;  // slope of a linear FDR_0 curve
};

/// Every closed-form bound that the parameters determine, one row per (bound, alpha).
inline Table bounds_table(const BoundsTableParams& p) {
  if (p.alpha_grid.empty()) throw std::invalid_argument("bounds_table: empty alpha grid");
  if (p.n == 0 || p.n0 == 0 || p.n0 > p.n) throw std::invalid_argument("bounds_table: need 1 <= n0 <= n");
  const double pi0 = p.pi0.value_or(static_cast<double>(p.n0) / static_cast<double>(p.n));
  Table t{"bounds", {"bound_name", "n", "n0", "pi0", "alpha", "gamma", "value", "clamped_flag"}, {}};
  std::vector<BoundKind> kinds{BoundKind::Prdn, BoundKind::PrdnPi0, BoundKind::LogCorrection,
                               BoundKind::ArbitraryDependence, BoundKind::GuoRao};
  if (p.gamma) kinds.push_back(BoundKind::Fdx);
  if (p.c) kinds.push_back(BoundKind::LinkLinear);
  for (double alpha : p.alpha_grid) {
    for (BoundKind kind : kinds) {
      const BoundParams params{p.n, p.n0, pi0, alpha, p.gamma, p.c};
      const BoundReport r = evaluate_bound(kind, params);
      t.add({r.name, static_cast<std::int64_t>(p.n), static_cast<std::int64_t>(p.n0), pi0, alpha,
             kind == BoundKind::Fdx ? Cell{*p.gamma} : Cell{std::string()}, r.value, r.clamped});
    }
  }
  return t;
}

/// One sampled law from a dependence class: a generator and, optionally, an
/// adversary that overwrites its non-nulls.
struct ClassMember {
  std::string label;
  GeneratorSpec generator;
  std::optional<AdversarySpec> adversary;
};

struct DependenceClass {
  std::string name;
  std::vector<ClassMember> members;
  std::optional<double> reference_multiplier;  // known envelope c * alpha, if any
};

struct ConsistencyCurve {
  std::string name;
  std::vector<double> alpha;
  std::vector<double> curve;     // max over members of the estimated FDR
  std::vector<double> std_error;  // of the maximising member
  std::vector<std::string> worst_member;
  bool decreasing = false;  // non-increasing as alpha falls, and below its starting value
};

inline bool decreasing_toward_zero(const std::vector<double>& alpha, const std::vector<double>& curve) {
  std::vector<std::size_t> order(alpha.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return alpha[a] > alpha[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (curve[order[k]] > curve[order[k - 1]]) return false;
  }
  return order.size() < 2 || curve[order.back()] < curve[order.front()];
}

/// Max-over-members FDR estimate of the step-up procedure at each alpha.
/// Member m at grid point a uses master seed replication_seed(cfg.master_seed, a * members + m).
inline ConsistencyCurve consistency_curve(const DependenceClass& cls, const std::vector<double>& alpha_grid,
                                          const McConfig& cfg) {
  if (alpha_grid.empty()) throw std::invalid_argument("consistency_curve: empty alpha grid");
  if (cls.members.empty()) throw std::invalid_argument("consistency_curve: class has no members");
  ConsistencyCurve out{cls.name, alpha_grid, {}, {}, {}, false};
  for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
    double best = -1.0, best_se = 0.0;
    std::string who;
    for (std::size_t m = 0; m < cls.members.size(); ++m) {
      McConfig c = cfg;
      c.master_seed = replication_seed(cfg.master_seed, a * cls.members.size() + m);
      const auto& member = cls.members[m];
      const McEstimate est = estimate_fdr(member.generator, member.adversary, Procedure::StepUp, alpha_grid[a], c);
      if (est.mean > best) {
        best = est.mean;
        best_se = est.std_error;
        who = member.label;
      }
    }
    out.curve.push_back(best);
    out.std_error.push_back(best_se);
    out.worst_member.push_back(who);
  }
  out.decreasing = decreasing_toward_zero(out.alpha, out.curve);
  return out;
}

}  // namespace fdrlink::experiments
