#include <flsh/dct.hpp>
#include <flsh/error.hpp>
#include <flsh/ortho_embed.hpp>

#include <cmath>
#include <numbers>

namespace flsh {

void OrthoEmbedConfig::validate() const {
  if (max_terms == 0)
    throw ConfigError("max_terms must be positive");
  if (fixed_terms && (*fixed_terms == 0 || *fixed_terms > max_terms))
    throw ConfigError("fixed_terms must lie in [1, max_terms]");
  if (!(tail_tolerance >= 0.0))
    throw ConfigError("tail_tolerance must be nonnegative");
  if (sample_nodes && *sample_nodes == 0)
    throw ConfigError("sample_nodes must be positive");
}

Eigen::VectorXd chebyshev_nodes(double a, double b, std::size_t n) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j)
    x[static_cast<Eigen::Index>(j)] =
        mid + half * std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) /
                              static_cast<double>(n));
  return x;
}

namespace {

/// Coefficients against the orthonormal cosine basis on [0, pi] from samples
/// at theta_j = pi (j + 1/2) / n.
Eigen::VectorXd cosine_coefficients(const Eigen::VectorXd &samples) {
  const double n = static_cast<double>(samples.size());
  Eigen::VectorXd c = dct2(samples);
  c *= std::sqrt(2.0 * std::numbers::pi) / n;
  c[0] /= std::numbers::sqrt2;
  return c;
}

Eigen::VectorXd sample(const FunctionSource &f, std::size_t n,
                       JacobianMode mode) {
  const auto &dom = f.domain();
  Eigen::VectorXd y = chebyshev_nodes(dom.a(), dom.b(), n);
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    y[j] = f.evaluate_unchecked(y[j]);
    if (mode == JacobianMode::LebesgueJacobian) {
      const double theta = std::numbers::pi * (static_cast<double>(j) + 0.5) /
                           static_cast<double>(n);
      y[j] *= std::sqrt(std::sin(theta) * dom.half_width());
    }
  }
  return y;
}

/// Norm of entries [floor(3 terms / 4), end).
double tail_norm(const Eigen::VectorXd &c, std::size_t terms) {
  const auto start = static_cast<Eigen::Index>(3 * terms / 4);
  if (start >= c.size())
    return 0.0;
  return c.tail(c.size() - start).norm();
}

std::size_t adaptive_terms(const FunctionSource &f, const OrthoEmbedConfig &cfg,
                           double &tail) {
  for (std::size_t n = 2; n <= cfg.max_terms; n *= 2) {
    // Sampling at 2n exposes both the trailing quarter of the first n terms
    // and anything aliased into them from beyond n.
    const std::size_t m = std::max(2 * n, cfg.sample_nodes.value_or(0));
    const Eigen::VectorXd c =
        cosine_coefficients(sample(f, m, JacobianMode::ChebyshevWeighted));
    tail = tail_norm(c, n);
    if (tail <= cfg.tail_tolerance)
      return n;
  }
  throw TruncationError("no power of two up to max_terms = " +
                        std::to_string(cfg.max_terms) +
                        " meets the tail tolerance");
}

} // namespace

CoefficientVector embed_ortho(const FunctionSource &f, const OrthoEmbedConfig &cfg) {
  cfg.validate();
  CoefficientVector out;
  out.basis = {f.domain().a(), f.domain().b(), cfg.jacobian_mode};

  std::size_t terms = 0;
  double adaptive_tail = 0.0;
  if (cfg.fixed_terms)
    terms = *cfg.fixed_terms;
  else
    terms = adaptive_terms(f, cfg, adaptive_tail);

  const std::size_t nodes = std::max(terms, cfg.sample_nodes.value_or(terms));
  const Eigen::VectorXd full =
      cosine_coefficients(sample(f, nodes, cfg.jacobian_mode));
  out.coefficients = full.head(static_cast<Eigen::Index>(terms));

  if (!cfg.fixed_terms) {
    out.tail_estimate = adaptive_tail;
  } else if (cfg.jacobian_mode == JacobianMode::ChebyshevWeighted) {
    out.tail_estimate = tail_norm(full, terms);
  } else {
    out.tail_estimate = tail_norm(
        cosine_coefficients(sample(f, nodes, JacobianMode::ChebyshevWeighted)),
        terms);
  }
  return out;
}

double embedded_distance(const CoefficientVector &u, const CoefficientVector &v) {
  if (!(u.basis == v.basis))
    throw BasisMismatchError("coefficient vectors use different bases");
  const Eigen::Index common = std::min(u.size(), v.size());
  double sq = (u.coefficients.head(common) - v.coefficients.head(common)).squaredNorm();
  if (u.size() > common)
    sq += u.coefficients.tail(u.size() - common).squaredNorm();
  if (v.size() > common)
    sq += v.coefficients.tail(v.size() - common).squaredNorm();
  return std::sqrt(sq);
}

ErrorBound embedding_error_bound(const CoefficientVector &u,
                                 std::optional<double> known_norm) {
  if (!known_norm)
    return {u.tail_estimate, false};
  const double radicand = *known_norm * *known_norm - u.coefficients.squaredNorm();
  if (radicand < 0.0)
    return {0.0, true};
  return {std::sqrt(radicand), false};
}

} // namespace flsh
