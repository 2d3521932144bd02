#pragma once

#include <flsh/domain.hpp>
#include <flsh/function_source.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <optional>

namespace flsh {

enum class JacobianMode {
  /// Coefficients against e_0 = 1/sqrt(pi), e_k = sqrt(2/pi) cos(k theta);
  /// Euclidean norm tracks the Chebyshev-weighted L^2 norm.
  ChebyshevWeighted,
  /// Samples pre-multiplied by sqrt(sin(theta) (b - a) / 2) so the Euclidean
  /// norm tracks the Lebesgue L^2 norm on [a, b].
  LebesgueJacobian,
};

struct OrthoEmbedConfig {
  /// Hard cap on the number of retained terms.
  std::size_t max_terms = 1024;
  /// When set, exactly this many terms are kept (no adaptive search).
  std::optional<std::size_t> fixed_terms;
  /// Adaptive threshold on the trailing-coefficient norm.
  double tail_tolerance = 1e-10;
  JacobianMode jacobian_mode = JacobianMode::ChebyshevWeighted;
  /// Number of Chebyshev nodes to sample. Unset means one node per retained
  /// term; a larger count computes that many coefficients and truncates,
  /// which makes the output a true partial sum (Bessel's inequality holds).
  std::optional<std::size_t> sample_nodes;

  static OrthoEmbedConfig fixed(std::size_t terms,
                                JacobianMode mode = JacobianMode::ChebyshevWeighted) {
    OrthoEmbedConfig cfg;
    cfg.fixed_terms = terms;
    cfg.max_terms = std::max(cfg.max_terms, terms);
    cfg.jacobian_mode = mode;
    return cfg;
  }

  /// Throws ConfigError.
  void validate() const;
};

/// Identifies the orthonormal basis a coefficient vector is expressed in.
struct OrthoBasis {
  double a = 0.0;
  double b = 1.0;
  JacobianMode mode = JacobianMode::ChebyshevWeighted;

  friend bool operator==(const OrthoBasis &, const OrthoBasis &) = default;
};

struct CoefficientVector {
  Eigen::VectorXd coefficients;
  OrthoBasis basis;
  /// Norm of the trailing quarter of the unweighted Chebyshev coefficients;
  /// stands in for the truncation error |f - f_hat|.
  double tail_estimate = 0.0;

  Eigen::Index size() const noexcept { return coefficients.size(); }
};

/// Chebyshev points of the first kind mapped to [a, b], in node order
/// j = 0..n-1 (descending x).
Eigen::VectorXd chebyshev_nodes(double a, double b, std::size_t n);

/// Orthonormal-basis embedding via a DCT-II at Chebyshev nodes.
/// Throws NonFiniteError or TruncationError.
CoefficientVector embed_ortho(const FunctionSource &f, const OrthoEmbedConfig &cfg);

/// Euclidean distance with the shorter vector zero-padded.
/// Throws BasisMismatchError.
double embedded_distance(const CoefficientVector &u, const CoefficientVector &v);

struct ErrorBound {
  double value = 0.0;
  /// True when known_norm^2 < |u|^2 and the radicand was clamped to zero.
  bool clamped = false;
};

/// sqrt(max(0, known_norm^2 - |u|^2)) when the true norm is known, otherwise
/// the vector's tail estimate.
ErrorBound embedding_error_bound(const CoefficientVector &u,
                                 std::optional<double> known_norm = std::nullopt);

} // namespace flsh
