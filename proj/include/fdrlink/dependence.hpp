#pragma once

// p-value generators for the dependence structures under study, plus the
// Gaussian sufficient conditions for PRDN / PRDS / two-sided MTP2.
//
// sample() is a pure function of (spec, seed). All Gaussian draws go through
// normal_quantile of an open-interval uniform, so the stream of values is
// fixed by the std::mt19937_64 engine alone.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fdrlink/normal.hpp"
#include "fdrlink/testing.hpp"

namespace fdrlink {

/// Deterministic source of uniforms, normals and exponentials.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }
  double normal() { return normal_quantile(uniform()); }
  double exponential() { return -std::log(uniform()); }

 private:
  std::mt19937_64 engine_;
};

enum class Sidedness { One, Two };

inline const char* to_string(Sidedness s) { return s == Sidedness::One ? "one" : "two"; }

inline constexpr double kDefaultAlternativeShift = 2.0;

/// Independent Uniform(0,1) nulls at indices [0, n0), Gaussian-shift non-nulls after.
struct IidUniform {
  std::size_t n0 = 1;
  std::size_t n1 = 0;
  double mu_alt = kDefaultAlternativeShift;
};

/// Nulls at [0, n0) are rho-equicorrelated standard normals; non-nulls are
/// independent N(mu, 1). mu_alt may be empty (default shift), one value
/// (broadcast) or one value per non-null.
struct EquicorrelatedNormal {
  std::size_t n = 1;
  std::size_t n0 = 1;
  double rho = 0.0;
  Sidedness sided = Sidedness::One;
  std::vector<double> mu_alt;
};

/// X ~ N(mu, Sigma). Build through make_gaussian so the square root is cached.
struct GaussianGenerator {
  Eigen::MatrixXd sigma;
  std::vector<std::size_t> null_idx;
  Eigen::VectorXd mu;
  Sidedness sided = Sidedness::One;
  std::shared_ptr<const Eigen::MatrixXd> root;  // root * root^T == sigma
};

enum class WithinBlock { Identical, Equicorrelated };

/// Independent blocks; inside a block the z-scores are all equal (Identical)
/// or rho_w-equicorrelated. Non-nulls are shifted by mu_alt. An empty null
/// mask means the global null.
struct BlockDependent {
  std::vector<std::size_t> block_sizes;
  std::size_t max_block = 1;
  WithinBlock within = WithinBlock::Identical;
  double rho_w = 0.0;
  std::vector<bool> null_mask;
  double mu_alt = kDefaultAlternativeShift;
};

struct GeneratorSpec;

/// Two-sided transform applied to every p-value of the inner generator.
struct TwoSidedWrap {
  std::shared_ptr<const GeneratorSpec> inner;
};

struct GeneratorSpec {
  std::variant<IidUniform, EquicorrelatedNormal, GaussianGenerator, BlockDependent, TwoSidedWrap> kind;
};

inline GeneratorSpec two_sided(GeneratorSpec inner) {
  return GeneratorSpec{TwoSidedWrap{std::make_shared<const GeneratorSpec>(std::move(inner))}};
}

// ---------------------------------------------------------------------------
// Equicorrelation

/// Coefficients of the symmetric square root diag_coef * I + common_coef * 1 1^T
/// of the n x n equicorrelation matrix, from its eigenvalues 1 - rho and
/// 1 + (n - 1) rho.
struct EquicorrelationRoot {
  double diag_coef = 1.0;
  double common_coef = 0.0;
};

inline double min_equicorrelation(std::size_t n) {
  return n <= 1 ? -1.0 : -1.0 / static_cast<double>(n - 1);
}

inline EquicorrelationRoot equicorrelation_root(std::size_t n, double rho) {
  if (n == 0) throw std::invalid_argument("equicorrelation: n must be positive");
  if (!(rho < 1.0) || rho < min_equicorrelation(n)) {
    throw std::domain_error("equicorrelation: rho must lie in [-1/(n-1), 1)");
  }
  const double nn = static_cast<double>(n);
  const double small = std::sqrt(1.0 - rho);
  const double large = std::sqrt(std::max(0.0, 1.0 + (nn - 1.0) * rho));
  return EquicorrelationRoot{small, (large - small) / nn};
}

inline Eigen::MatrixXd equicorrelation_matrix(std::size_t n, double rho) {
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(m, m, rho);
  out.diagonal().setOnes();
  return out;
}

inline Eigen::MatrixXd equicorrelation_sqrt(std::size_t n, double rho) {
  const auto root = equicorrelation_root(n, rho);
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(m, m, root.common_coef);
  out.diagonal().array() += root.diag_coef;
  return out;
}

namespace detail {
// In place: z <- A z for the symmetric equicorrelation root A.
inline void apply_equicorrelation(std::span<double> z, const EquicorrelationRoot& root) {
  double total = 0.0;
  for (double v : z) total += v;
  const double shared = root.common_coef * total;
  for (double& v : z) v = root.diag_coef * v + shared;
}

inline double pvalue_from_z(double z, Sidedness sided) {
  return sided == Sidedness::One ? normal_sf(z) : 2.0 * normal_sf(std::fabs(z));
}
}  // namespace detail

/// 2p for p <= 1/2, 2(1 - p) otherwise.
inline double two_sided_from_one_sided(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("two_sided_from_one_sided: p outside [0, 1]");
  return p <= 0.5 ? 2.0 * p : 2.0 * (1.0 - p);
}

// ---------------------------------------------------------------------------
// Construction and validation

/// Validates Sigma (symmetric, unit diagonal, PSD), null_idx and mu, and
/// caches a square root from the eigendecomposition.
inline GeneratorSpec make_gaussian(Eigen::MatrixXd sigma, std::vector<std::size_t> null_idx, Eigen::VectorXd mu,
                                   Sidedness sided = Sidedness::One) {
  const Eigen::Index n = sigma.rows();
  if (n == 0 || sigma.cols() != n) throw std::invalid_argument("Gaussian generator: Sigma must be square and non-empty");
  if (mu.size() == 0) mu = Eigen::VectorXd::Zero(n);
  if (mu.size() != n) throw std::invalid_argument("Gaussian generator: mu has the wrong length");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("Gaussian generator: Sigma is not symmetric");
  }
  if ((sigma.diagonal().array() - 1.0).abs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("Gaussian generator: Sigma must have unit diagonal");
  }
  std::sort(null_idx.begin(), null_idx.end());
  if (std::adjacent_find(null_idx.begin(), null_idx.end()) != null_idx.end()) {
    throw std::invalid_argument("Gaussian generator: duplicate null index");
  }
  for (std::size_t i : null_idx) {
    if (i >= static_cast<std::size_t>(n)) throw std::out_of_range("Gaussian generator: null index out of range");
    if (mu[static_cast<Eigen::Index>(i)] != 0.0) {
      throw std::invalid_argument("Gaussian generator: mu must vanish on the nulls");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) throw std::runtime_error("Gaussian generator: eigendecomposition failed");
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw std::domain_error("Gaussian generator: Sigma is not positive semidefinite");
  }
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  auto root = std::make_shared<const Eigen::MatrixXd>(eig.eigenvectors() * roots.asDiagonal());
  return GeneratorSpec{GaussianGenerator{std::move(sigma), std::move(null_idx), std::move(mu), sided, std::move(root)}};
}

namespace detail {
inline double mu_for(const std::vector<double>& mu_alt, std::size_t k) {
  if (mu_alt.empty()) return kDefaultAlternativeShift;
  if (mu_alt.size() == 1) return mu_alt.front();
  return mu_alt[k];
}
}  // namespace detail

inline void validate(const GeneratorSpec& spec) {
  std::visit(
      [](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, IidUniform>) {
          if (g.n0 + g.n1 == 0) throw std::invalid_argument("IidUniform: n0 + n1 must be positive");
        } else if constexpr (std::is_same_v<G, EquicorrelatedNormal>) {
          if (g.n == 0 || g.n0 > g.n) throw std::invalid_argument("EquicorrelatedNormal: need 0 <= n0 <= n, n >= 1");
          if (!(g.rho < 1.0) || g.rho < min_equicorrelation(g.n0)) {
            throw std::domain_error("EquicorrelatedNormal: rho must lie in [-1/(n0-1), 1)");
          }
          const std::size_t n1 = g.n - g.n0;
          if (g.mu_alt.size() > 1 && g.mu_alt.size() != n1) {
            throw std::invalid_argument("EquicorrelatedNormal: mu_alt needs 0, 1 or n1 entries");
          }
        } else if constexpr (std::is_same_v<G, GaussianGenerator>) {
          if (!g.root) throw std::invalid_argument("GaussianGenerator: build it with make_gaussian");
        } else if constexpr (std::is_same_v<G, BlockDependent>) {
          if (g.block_sizes.empty()) throw std::invalid_argument("BlockDependent: no blocks");
          std::size_t total = 0;
          for (std::size_t b : g.block_sizes) {
            if (b == 0 || b > g.max_block) throw std::invalid_argument("BlockDependent: block size outside [1, b]");
            total += b;
          }
          if (!g.null_mask.empty() && g.null_mask.size() != total) {
            throw std::invalid_argument("BlockDependent: null mask length differs from the block total");
          }
          if (g.within == WithinBlock::Equicorrelated) {
            const std::size_t largest = *std::max_element(g.block_sizes.begin(), g.block_sizes.end());
            if (!(g.rho_w < 1.0) || g.rho_w < min_equicorrelation(largest)) {
              throw std::domain_error("BlockDependent: rho_w outside the admissible range");
            }
          }
        } else {
          if (!g.inner) throw std::invalid_argument("TwoSidedWrap: missing inner generator");
          validate(*g.inner);
        }
      },
      spec.kind);
}

inline std::size_t total_count(const GeneratorSpec& spec) {
  return std::visit(
      [](const auto& g) -> std::size_t {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, IidUniform>) return g.n0 + g.n1;
        else if constexpr (std::is_same_v<G, EquicorrelatedNormal>) return g.n;
        else if constexpr (std::is_same_v<G, GaussianGenerator>) return static_cast<std::size_t>(g.sigma.rows());
        else if constexpr (std::is_same_v<G, BlockDependent>) {
          std::size_t t = 0;
          for (std::size_t b : g.block_sizes) t += b;
          return t;
        } else return total_count(*g.inner);
      },
      spec.kind);
}

inline std::size_t null_count(const GeneratorSpec& spec) {
  return std::visit(
      [](const auto& g) -> std::size_t {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, IidUniform>) return g.n0;
        else if constexpr (std::is_same_v<G, EquicorrelatedNormal>) return g.n0;
        else if constexpr (std::is_same_v<G, GaussianGenerator>) return g.null_idx.size();
        else if constexpr (std::is_same_v<G, BlockDependent>) {
          if (g.null_mask.empty()) return total_count(GeneratorSpec{g});
          return static_cast<std::size_t>(std::count(g.null_mask.begin(), g.null_mask.end(), true));
        } else return null_count(*g.inner);
      },
      spec.kind);
}

// ---------------------------------------------------------------------------
// Sampling

enum class NonNullDraw {
  Generate,  // draw the non-null values from the generator's alternative law
  Skip       // leave them at 1; the nulls are identical to the Generate case
};

namespace detail {

inline PValueStudy sample_impl(const GeneratorSpec& spec, RandomStream& rng, NonNullDraw policy) {
  return std::visit(
      [&](const auto& g) -> PValueStudy {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, IidUniform>) {
          std::vector<double> p(g.n0 + g.n1, 1.0);
          std::vector<bool> mask(g.n0 + g.n1, false);
          for (std::size_t i = 0; i < g.n0; ++i) {
            p[i] = rng.uniform();
            mask[i] = true;
          }
          if (policy == NonNullDraw::Generate) {
            for (std::size_t i = g.n0; i < p.size(); ++i) p[i] = normal_sf(rng.normal() + g.mu_alt);
          }
          return PValueStudy(std::move(p), std::move(mask));
        } else if constexpr (std::is_same_v<G, EquicorrelatedNormal>) {
          std::vector<double> z(g.n0);
          for (double& v : z) v = rng.normal();
          if (g.n0 > 0) apply_equicorrelation(z, equicorrelation_root(g.n0, g.rho));
          std::vector<double> p(g.n, 1.0);
          std::vector<bool> mask(g.n, false);
          for (std::size_t i = 0; i < g.n0; ++i) {
            p[i] = pvalue_from_z(z[i], g.sided);
            mask[i] = true;
          }
          if (policy == NonNullDraw::Generate) {
            for (std::size_t k = 0; k < g.n - g.n0; ++k) {
              p[g.n0 + k] = pvalue_from_z(rng.normal() + mu_for(g.mu_alt, k), g.sided);
            }
          }
          return PValueStudy(std::move(p), std::move(mask));
        } else if constexpr (std::is_same_v<G, GaussianGenerator>) {
          const Eigen::Index n = g.sigma.rows();
          Eigen::VectorXd z(n);
          for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
          const Eigen::VectorXd x = g.mu + (*g.root) * z;
          std::vector<double> p(static_cast<std::size_t>(n));
          std::vector<bool> mask(static_cast<std::size_t>(n), false);
          for (std::size_t i : g.null_idx) mask[i] = true;
          for (Eigen::Index i = 0; i < n; ++i) {
            p[static_cast<std::size_t>(i)] = pvalue_from_z(x[i], g.sided);
          }
          return PValueStudy(std::move(p), std::move(mask));
        } else if constexpr (std::is_same_v<G, BlockDependent>) {
          std::size_t total = 0;
          for (std::size_t b : g.block_sizes) total += b;
          std::vector<bool> mask = g.null_mask.empty() ? std::vector<bool>(total, true) : g.null_mask;
          std::vector<double> p(total);
          std::size_t start = 0;
          for (std::size_t b : g.block_sizes) {
            std::vector<double> z(b);
            if (g.within == WithinBlock::Identical) {
              std::fill(z.begin(), z.end(), rng.normal());
            } else {
              for (double& v : z) v = rng.normal();
              apply_equicorrelation(z, equicorrelation_root(b, g.rho_w));
            }
            for (std::size_t k = 0; k < b; ++k) {
              const std::size_t i = start + k;
              p[i] = normal_sf(z[k] + (mask[i] ? 0.0 : g.mu_alt));
            }
            start += b;
          }
          return PValueStudy(std::move(p), std::move(mask));
        } else {
          const PValueStudy inner = sample_impl(*g.inner, rng, policy);
          std::vector<double> p(inner.pvalues().begin(), inner.pvalues().end());
          for (double& v : p) v = two_sided_from_one_sided(v);
          return PValueStudy(std::move(p), inner.null_mask());
        }
      },
      spec.kind);
}

}  // namespace detail

inline PValueStudy sample(const GeneratorSpec& spec, std::uint64_t seed, NonNullDraw policy = NonNullDraw::Generate) {
  validate(spec);
  RandomStream rng(seed);
  return detail::sample_impl(spec, rng, policy);
}

inline std::vector<double> sample_nulls(const GeneratorSpec& spec, std::uint64_t seed) {
  return sample(spec, seed, NonNullDraw::Skip).null_pvalues();
}

/// p^(l) = min{b_l * min_{i in block l} p_i, 1}; blocks are consecutive runs of `block_sizes`.
inline std::vector<double> block_adjusted_pvalues(const PValueStudy& study, std::span<const std::size_t> block_sizes) {
  std::size_t total = 0;
  for (std::size_t b : block_sizes) {
    if (b == 0) throw std::invalid_argument("block_adjusted_pvalues: empty block");
    total += b;
  }
  if (total != study.n()) throw std::invalid_argument("block_adjusted_pvalues: partition does not cover the study");
  std::vector<double> out;
  out.reserve(block_sizes.size());
  std::size_t start = 0;
  for (std::size_t b : block_sizes) {
    const auto p = study.pvalues().subspan(start, b);
    const double smallest = *std::min_element(p.begin(), p.end());
    out.push_back(std::min(static_cast<double>(b) * smallest, 1.0));
    start += b;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural checks

namespace detail {
inline std::vector<bool> null_membership(const Eigen::MatrixXd& sigma, std::span<const std::size_t> null_idx) {
  if (sigma.rows() != sigma.cols()) throw std::invalid_argument("covariance must be square");
  std::vector<bool> is_null(static_cast<std::size_t>(sigma.rows()), false);
  for (std::size_t i : null_idx) {
    if (i >= is_null.size()) throw std::out_of_range("null index out of range");
    is_null[i] = true;
  }
  return is_null;
}
}  // namespace detail

/// Sigma_ij >= 0 for every pair of nulls.
inline bool prdn_check_gaussian(const Eigen::MatrixXd& sigma, std::span<const std::size_t> null_idx) {
  const auto is_null = detail::null_membership(sigma, null_idx);
  for (std::size_t i : null_idx) {
    for (std::size_t j : null_idx) {
      if (sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) < 0.0) return false;
    }
  }
  return true;
}

/// PRDN plus Sigma_ij >= 0 for every (null, non-null) pair.
inline bool prds_check_gaussian(const Eigen::MatrixXd& sigma, std::span<const std::size_t> null_idx) {
  if (!prdn_check_gaussian(sigma, null_idx)) return false;
  const auto is_null = detail::null_membership(sigma, null_idx);
  for (std::size_t i : null_idx) {
    for (std::size_t j = 0; j < is_null.size(); ++j) {
      if (!is_null[j] && sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) < 0.0) return false;
    }
  }
  return true;
}

/// Diagonal of a +-1 matrix B.
struct SignAssignment {
  std::vector<int> signs;
};

/// K = -(Sigma0)^{-1}. Throws if Sigma0 is singular.
inline Eigen::MatrixXd negative_precision(const Eigen::MatrixXd& sigma0) {
  if (sigma0.rows() == 0 || sigma0.rows() != sigma0.cols()) {
    throw std::invalid_argument("covariance must be square and non-empty");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma0);
  if (!lu.isInvertible()) throw std::domain_error("covariance is singular");
  return -lu.inverse();
}

/// |K_ij| at or below this value leaves the pair unconstrained.
inline double sign_tolerance(const Eigen::MatrixXd& k) { return 1e-10 * k.cwiseAbs().maxCoeff(); }

/// Finds B with every off-diagonal entry of -B Sigma0^{-1} B non-negative,
/// i.e. b_i b_j = sign(K_ij) on each significant entry of K = -Sigma0^{-1}.
/// Solved as a parity 2-colouring of the graph of significant entries.
inline std::optional<SignAssignment> mtp2_sign_check(const Eigen::MatrixXd& sigma0) {
  const Eigen::MatrixXd k = negative_precision(sigma0);
  const double tol = sign_tolerance(k);
  const auto n = static_cast<std::size_t>(k.rows());
  std::vector<int> sign(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (sign[root] != 0) continue;
    sign[root] = 1;
    std::queue<std::size_t> frontier;
    frontier.push(root);
    while (!frontier.empty()) {
      const std::size_t i = frontier.front();
      frontier.pop();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double kij = k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (std::fabs(kij) <= tol) continue;
        const int wanted = kij > 0.0 ? sign[i] : -sign[i];
        if (sign[j] == 0) {
          sign[j] = wanted;
          frontier.push(j);
        } else if (sign[j] != wanted) {
          return std::nullopt;
        }
      }
    }
  }
  return SignAssignment{std::move(sign)};
}

/// Sigma0_{i,-i} / Sigma0_{ii}: slope of E[X_{-i} | X_i = x] in x.
inline Eigen::VectorXd conditional_slope(const Eigen::MatrixXd& sigma0, std::size_t i) {
  const Eigen::Index n = sigma0.rows();
  if (sigma0.cols() != n) throw std::invalid_argument("conditional_slope: covariance must be square");
  if (static_cast<Eigen::Index>(i) >= n) throw std::out_of_range("conditional_slope: index out of range");
  const auto ii = static_cast<Eigen::Index>(i);
  const double var = sigma0(ii, ii);
  if (!(var > 0.0)) throw std::domain_error("conditional_slope: zero variance");
  Eigen::VectorXd out(n - 1);
  Eigen::Index pos = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != ii) out[pos++] = sigma0(ii, j) / var;
  }
  return out;
}

/// Schedule for families with vanishing null proportion: n0 = l and
/// n = max(l, ceil(scale * l * log(max(l, 2)))).
struct VanishingSchedule {
  double scale = 1.0;
};

inline std::pair<std::size_t, std::size_t> vanishing_null_family(std::size_t l, VanishingSchedule schedule = {}) {
  if (l == 0) throw std::invalid_argument("vanishing_null_family: l must be positive");
  const double ll = static_cast<double>(l);
  const double raw = schedule.scale * ll * std::log(std::max(ll, 2.0));
  const auto n = std::max<std::size_t>(l, static_cast<std::size_t>(snapped_ceil(raw)));
  return {n, l};
}

/// Dense matrix: one row per line, whitespace-separated decimals. Blank lines
/// and lines starting with '#' are skipped.
inline Eigen::MatrixXd load_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string token;
    while (ls >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("matrix: not a number: " + token);
      }
      if (used != token.size()) throw std::invalid_argument("matrix: not a number: " + token);
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("matrix: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("matrix: no rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

inline Eigen::MatrixXd load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  return load_matrix(in);
}

}  // namespace fdrlink
