#pragma once

#include <flsh/rng.hpp>

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

namespace flsh {

enum class CoefficientLaw {
  Normal,  ///< p = 2
  Cauchy,  ///< p = 1
  Stable,  ///< any other p in (0, 2), Chambers-Mallows-Stuck
};

CoefficientLaw law_for(double p);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * Lazily materialized projection coefficients alpha_0, alpha_1, ...
 *
 * Entry i is a pure function of (seed, stream, i). The cache is grow-only and
 * published as an immutable snapshot, so hashers that observe different cache
 * lengths still read identical values.
 */
class CoefficientStream {
public:
  CoefficientStream(std::uint64_t seed, std::uint64_t stream, double p);
  CoefficientStream(const CoefficientStream &other);
  CoefficientStream &operator=(const CoefficientStream &other);

  double at(std::size_t i) const noexcept;

  /// Snapshot holding at least n coefficients.
  std::shared_ptr<const std::vector<double>> prefix(std::size_t n) const;

  std::size_t materialized() const;
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  double p_;
  CoefficientLaw law_;
  CounterRng rng_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const std::vector<double>> cache_;
};

/// floor(alpha . x / r + b) with alpha drawn i.i.d. p-stable.
class PStableHashFunction {
public:
  /// Offset b is drawn from the (seed, stream) pair as well.
  static PStableHashFunction sample(double p, double r, std::uint64_t seed,
                                    std::uint64_t stream);

  /// Rebuild from persisted parameters.
  PStableHashFunction(double p, double r, double b, std::uint64_t seed,
                      std::uint64_t stream);

  /// Grows the stream to x.size() if needed and dots over x.size() terms only.
  /// Throws OverflowError if the pre-floor value leaves the int64 range and
  /// NonFiniteError for non-finite input.
  std::int64_t hash(const Eigen::Ref<const Eigen::VectorXd> &x) const;

  double projection(const Eigen::Ref<const Eigen::VectorXd> &x) const;

  double p() const noexcept { return p_; }
  double r() const noexcept { return r_; }
  double b() const noexcept { return b_; }
  const CoefficientStream &stream() const noexcept { return alpha_; }

private:
  double p_;
  double r_;
  double b_;
  CoefficientStream alpha_;
};

/// Sign of the projection onto a lazily grown standard-normal vector.
class SimHashFunction {
public:
  SimHashFunction(std::uint64_t seed, std::uint64_t stream);

  /// Throws ZeroVectorError for an all-zero input.
  bool hash(const Eigen::Ref<const Eigen::VectorXd> &x) const;

  double projection(const Eigen::Ref<const Eigen::VectorXd> &x) const;
  const CoefficientStream &stream() const noexcept { return alpha_; }

private:
  CoefficientStream alpha_;
};

/// Offset b shared by PStableHashFunction::sample.
double sample_offset(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Throws OverflowError if value cannot be floored into an int64.
std::int64_t checked_floor(double value);

/**
 * A batch of hash functions sharing one row-major coefficient matrix.
 *
 * Row i uses stream first_stream + i, so hash(x)[i] equals the i-th single
 * function's hash bit-for-bit.
 */
class PStableHashBank {
public:
  PStableHashBank(double p, double r, std::uint64_t seed,
                  std::uint64_t first_stream, std::size_t count);
  explicit PStableHashBank(std::vector<PStableHashFunction> functions);

  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>
  hash(const Eigen::Ref<const Eigen::VectorXd> &x) const;

  std::size_t size() const noexcept { return functions_.size(); }
  const std::vector<PStableHashFunction> &functions() const noexcept {
    return functions_;
  }

private:
  std::shared_ptr<const RowMatrix> coefficients(Eigen::Index dim) const;

  std::vector<PStableHashFunction> functions_;
  Eigen::VectorXd offsets_;
  Eigen::VectorXd widths_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const RowMatrix> cache_;
};

class SimHashBank {
public:
  SimHashBank(std::uint64_t seed, std::uint64_t first_stream, std::size_t count);

  /// One sign bit per function. Throws ZeroVectorError.
  std::vector<bool> hash(const Eigen::Ref<const Eigen::VectorXd> &x) const;

  std::size_t size() const noexcept { return functions_.size(); }
  const std::vector<SimHashFunction> &functions() const noexcept {
    return functions_;
  }

private:
  std::shared_ptr<const RowMatrix> coefficients(Eigen::Index dim) const;

  std::vector<SimHashFunction> functions_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const RowMatrix> cache_;
};

// Collision probabilities

struct CollisionModel {
  double p = 2.0;
  double r = 1.0;
  /// Initial panel count of the adaptive quadrature.
  std::size_t resolution = 64;

  /// Throws UnsupportedPError unless p is 1 or 2; ConfigError for r <= 0 or
  /// resolution < 64.
  void validate() const;
};

/// Density of |Z| for Z standard p-stable, p in {1, 2}, on s >= 0.
double folded_stable_density(double p, double s);

/// Supremum of folded_stable_density: 2/sqrt(2 pi) for p = 2, 2/pi for p = 1.
double folded_stable_density_sup(double p);

/// P(c) = integral over [0, r/c] of f_p(s) (1 - c s / r) ds.
double collision_prob_pstable(const CollisionModel &model, double c);

/// 1 - arccos(cossim) / pi. Inputs within 1e-12 outside [-1, 1] are clamped;
/// anything further is a RangeError.
double collision_prob_simhash(double cossim);

struct CollisionBounds {
  double lower;
  double upper;
  /// Unperturbed collision probability at distance c.
  double nominal;
};

/**
 * Collision-probability sandwich when both embeddings are within eps/2 of
 * the exact ones:
 *   upper = P + min(eps/(c-eps), eps r |f_p|_inf / (2 (c-eps)^2))
 *   lower = P - min(2 eps/(c+eps), eps r |f_p|_inf / (2 c (c+eps)))
 * Throws EpsilonTooLargeError when eps >= c.
 */
CollisionBounds perturbed_collision_bounds(const CollisionModel &model, double c,
                                           double eps);

} // namespace flsh
