#pragma once

#include <flsh/domain.hpp>
#include <flsh/function_source.hpp>

#include <cstddef>
#include <functional>
#include <vector>

namespace flsh {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
QuadratureRule gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre over [a, b]: total_nodes / order panels of
/// `order` points each.
double integrate_gauss_legendre(const std::function<double(double)> &fn,
                                double a, double b,
                                std::size_t total_nodes = 4096,
                                std::size_t order = 16);

/// n-point Gauss-Chebyshev: integral of fn(cos t) dt over [0, pi].
double integrate_gauss_chebyshev(const std::function<double(double)> &fn,
                                 std::size_t n);

/// Integral of fn against the domain's measure: composite Gauss-Legendre for
/// Lebesgue, Gauss-Chebyshev for the Chebyshev weight.
double integrate(const std::function<double(double)> &fn,
                 const IntervalDomain &domain, std::size_t nodes = 4096);

/// Adaptive Simpson. `initial_panels` uniform panels are refined independently
/// until the local Richardson estimate meets the panel's share of `tol`.
double adaptive_simpson(const std::function<double(double)> &fn, double a,
                        double b, double tol = 1e-13,
                        std::size_t initial_panels = 64, int max_depth = 48);

// Ground-truth functionals used by tests and experiment reporting.

inline constexpr std::size_t kOracleNodes = 4096;

/// <f, g> under the shared domain measure.
double inner_product_oracle(const FunctionSource &f, const FunctionSource &g,
                            std::size_t nodes = kOracleNodes);

/// (integral |f - g|^p dmu)^(1/p) under the shared domain measure.
double distance_oracle(const FunctionSource &f, const FunctionSource &g,
                       double p = 2.0, std::size_t nodes = kOracleNodes);

double norm_oracle(const FunctionSource &f, std::size_t nodes = kOracleNodes);

/// <f, g> / (|f| |g|). Throws ZeroNormError if either norm is below 1e-14.
double cosine_similarity_oracle(const FunctionSource &f,
                                const FunctionSource &g,
                                std::size_t nodes = kOracleNodes);

} // namespace flsh
