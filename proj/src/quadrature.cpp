#include <flsh/error.hpp>
#include <flsh/quadrature.hpp>

#include <cmath>
#include <numbers>

namespace flsh {

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0)
    throw ConfigError("gauss_legendre needs n >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.nodes[n / 2] = 0.0;
  return rule;
}

double integrate_gauss_legendre(const std::function<double(double)> &fn,
                                double a, double b, std::size_t total_nodes,
                                std::size_t order) {
  const QuadratureRule rule = gauss_legendre(order);
  const std::size_t panels = std::max<std::size_t>(1, total_nodes / order);
  const double width = (b - a) / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double mid = lo + 0.5 * width;
    double panel = 0.0;
    for (std::size_t i = 0; i < order; ++i)
      panel += rule.weights[i] * fn(mid + 0.5 * width * rule.nodes[i]);
    sum += 0.5 * width * panel;
  }
  return sum;
}

double integrate_gauss_chebyshev(const std::function<double(double)> &fn,
                                 std::size_t n) {
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    sum += fn(std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) /
                       static_cast<double>(n)));
  return std::numbers::pi / static_cast<double>(n) * sum;
}

double integrate(const std::function<double(double)> &fn,
                 const IntervalDomain &domain, std::size_t nodes) {
  if (domain.measure() == Measure::Lebesgue)
    return integrate_gauss_legendre(fn, domain.a(), domain.b(), nodes);
  const double mid = domain.midpoint();
  const double half = domain.half_width();
  return integrate_gauss_chebyshev(
      [&](double t) { return fn(mid + half * t); }, nodes);
}

namespace {

double simpson_refine(const std::function<double(double)> &fn, double a,
                      double b, double fa, double fm, double fb, double whole,
                      double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_refine(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_refine(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)> &fn, double a,
                        double b, double tol, std::size_t initial_panels,
                        int max_depth) {
  if (!(b > a))
    return 0.0;
  const std::size_t panels = std::max<std::size_t>(1, initial_panels);
  const double width = (b - a) / static_cast<double>(panels);
  const double panel_tol = tol / static_cast<double>(panels);
  double sum = 0.0;
  double fa = fn(a);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double hi = p + 1 == panels ? b : lo + width;
    const double fm = fn(0.5 * (lo + hi));
    const double fb = fn(hi);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    sum += simpson_refine(fn, lo, hi, fa, fm, fb, whole, panel_tol, max_depth);
    fa = fb;
  }
  return sum;
}

namespace {

void require_shared_domain(const FunctionSource &f, const FunctionSource &g) {
  if (!(f.domain() == g.domain()))
    throw DomainError("oracle needs both functions on the same domain");
}

} // namespace

double inner_product_oracle(const FunctionSource &f, const FunctionSource &g,
                            std::size_t nodes) {
  require_shared_domain(f, g);
  return integrate(
      [&](double x) { return f.evaluate_unchecked(x) * g.evaluate_unchecked(x); },
      f.domain(), nodes);
}

double distance_oracle(const FunctionSource &f, const FunctionSource &g,
                       double p, std::size_t nodes) {
  require_shared_domain(f, g);
  const double integral = integrate(
      [&](double x) {
        return std::pow(std::abs(f.evaluate_unchecked(x) - g.evaluate_unchecked(x)), p);
      },
      f.domain(), nodes);
  return std::pow(std::max(integral, 0.0), 1.0 / p);
}

double norm_oracle(const FunctionSource &f, std::size_t nodes) {
  const double sq = integrate(
      [&](double x) {
        const double y = f.evaluate_unchecked(x);
        return y * y;
      },
      f.domain(), nodes);
  return std::sqrt(std::max(sq, 0.0));
}

double cosine_similarity_oracle(const FunctionSource &f,
                                const FunctionSource &g, std::size_t nodes) {
  const double nf = norm_oracle(f, nodes);
  const double ng = norm_oracle(g, nodes);
  if (nf < 1e-14 || ng < 1e-14)
    throw ZeroNormError("cosine similarity undefined for a zero-norm function");
  const double c = inner_product_oracle(f, g, nodes) / (nf * ng);
  return std::clamp(c, -1.0, 1.0);
}

} // namespace flsh
