#pragma once

#include <flsh/domain.hpp>
#include <flsh/function_source.hpp>

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>

namespace flsh {

enum class Sampler { IidUniform, Sobol };

struct McEmbedConfig {
  std::size_t sample_count = 64;
  /// Exponent of the target L^p space, 0 < p <= 2.
  double p = 2.0;
  Sampler sampler = Sampler::IidUniform;
  std::uint64_t seed = 0;
  /// Sobol only: nested uniform digit scrambling keyed by seed.
  bool scramble = false;

  /// Throws ConfigError.
  void validate() const;
};

/// Base-2 radical inverse of i (bit-reversed fraction). i = 1, 2, 3, 4, ...
/// gives 1/2, 1/4, 3/4, 1/8, ...
double radical_inverse_base2(std::uint64_t i) noexcept;

/// Owen-style nested scramble of the radical inverse: bit d of the output is
/// flipped by a hash of (seed, d, leading d output bits). Bits past 32 are
/// filled uniformly, so the result lies strictly inside (0, 1).
double scrambled_radical_inverse_base2(std::uint64_t i, std::uint64_t seed) noexcept;

/// Abscissae shared by every function hashed under one family.
class SamplePlan {
public:
  SamplePlan(IntervalDomain domain, Eigen::VectorXd abscissae);

  const IntervalDomain &domain() const noexcept { return domain_; }
  const Eigen::VectorXd &abscissae() const noexcept { return abscissae_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(abscissae_.size());
  }
  /// (V / N)^(1/p).
  double scale(double p) const;

private:
  IntervalDomain domain_;
  Eigen::VectorXd abscissae_;
};

/// Deterministic in (domain, cfg). IidUniform draws from mu / V with a
/// counter-based stream; Sobol takes points 1..N of the base-2 van der Corput
/// sequence. Both go through the measure's inverse CDF (identity map for
/// Lebesgue, x = mid + half cos(pi u) for the Chebyshev weight).
SamplePlan make_sample_plan(const IntervalDomain &domain, const McEmbedConfig &cfg);

/// (V/N)^(1/p) (f(x_1), ..., f(x_N)). NonFiniteError names the abscissa.
Eigen::VectorXd embed_mc(const FunctionSource &f, const SamplePlan &plan, double p);

/// (sum |u_i - v_i|^p)^(1/p); a quasi-norm for p < 1.
template <typename DerivedA, typename DerivedB>
auto lp_distance(const Eigen::MatrixBase<DerivedA> &u,
                 const Eigen::MatrixBase<DerivedB> &v, double p) {
  using std::pow;
  const auto diff = (u - v).cwiseAbs();
  if (p == 2.0)
    return diff.norm();
  if (p == 1.0)
    return diff.sum();
  return pow(diff.array().pow(p).sum(), 1.0 / p);
}

/// (V^2 / N) times the sample variance of |f(x_i) - g(x_i)|^p: the variance
/// of the p-th power of the embedded distance.
double estimate_embedding_variance(const FunctionSource &f,
                                   const FunctionSource &g,
                                   const SamplePlan &plan, double p);

} // namespace flsh
