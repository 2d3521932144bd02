#pragma once

#include <flsh/distribution.hpp>
#include <flsh/mc_embed.hpp>
#include <flsh/ortho_embed.hpp>

#include <variant>

namespace flsh {

/// Inverse of the standard normal CDF, absolute error well under 1e-9 on
/// (0, 1). Acklam's rational approximation refined by one Halley step on
/// erfc.
double inverse_normal_cdf(double u);

/// F^{-1}(u). Gaussian: mean + stddev * inverse_normal_cdf(u). Empirical:
/// left-continuous step quantile, the sample at 1-based index ceil(u n).
/// Throws RangeError unless 0 < u < 1.
double quantile(const Distribution1D &d, double u);

/// Embedding route for wasserstein_via_embedding.
using WassersteinMethod = std::variant<OrthoEmbedConfig, McEmbedConfig>;

/**
 * W^p estimate from embedded inverse CDFs on [clip, 1 - clip].
 *
 * Ortho route: L^2 only (p must be 2); the config's jacobian mode should be
 * LebesgueJacobian to match the Lebesgue integral over u. MC route: the
 * sampler config's p is overridden by `p`.
 */
double wasserstein_via_embedding(const Distribution1D &d1,
                                 const Distribution1D &d2, double p,
                                 const WassersteinMethod &method,
                                 QuantileClip clip = {});

/// sqrt((mu1 - mu2)^2 + (sigma1 - sigma2)^2). KindError for empirical inputs.
double wasserstein_gaussian_exact(const Distribution1D &d1,
                                  const Distribution1D &d2);

/// Exact W^p between step quantiles, O(m + n) sweep over merged breakpoints.
double wasserstein_empirical_exact(const Distribution1D &d1,
                                   const Distribution1D &d2, double p);

} // namespace flsh
