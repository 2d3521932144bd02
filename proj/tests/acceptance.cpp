// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

#include <flsh/experiments.hpp>
#include <flsh/hash_families.hpp>
#include <flsh/ortho_embed.hpp>
#include <flsh/quadrature.hpp>
#include <flsh/rng.hpp>
#include <flsh/wasserstein.hpp>

#include "support/sine_benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace flsh;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string &detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// Runs one collision experiment per method and checks mean/max tolerances.
void collision_criterion(int id, Experiment kind, double mean_tol, double max_tol) {
  bool ok = true;
  std::string detail;
  for (Method method : {Method::Chebyshev, Method::MonteCarlo}) {
    ExperimentConfig cfg;
    cfg.experiment = kind;
    cfg.method = method;
    cfg.seed = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const auto records = run_collision_experiment(cfg);
    const double elapsed = seconds_since(t0);
    const auto s = summarize(records, cfg);
    ok = ok && s.mean_abs_error <= mean_tol && s.max_abs_error <= max_tol &&
         s.within_five_sigma >= 0.99 && elapsed < 60.0;
    detail += fmt("%s mean %.4f max %.4f within5sigma %.3f %.1fs; ",
                  std::string(to_string(method)).c_str(), s.mean_abs_error, s.max_abs_error,
                  s.within_five_sigma, elapsed);
  }
  report(id, ok, detail);
}

void sandwich_criterion() {
  const CollisionModel model{2.0, 1.0, 64};
  const double c = 1.0;
  const Eigen::Index dim = 64;
  const std::size_t draws = 10000;
  const std::size_t pairs = 10;
  const CounterRng rng(404, 0);
  auto direction = [&](std::uint64_t lane) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      v[i] = rng.normal(lane * 1000 + static_cast<std::uint64_t>(i));
    return Eigen::VectorXd(v.normalized());
  };

  bool ok = true;
  std::string detail;
  std::uint64_t lane = 0;
  for (double eps : {0.05, 0.1, 0.2}) {
    const auto b = perturbed_collision_bounds(model, c, eps);
    const double sigma = std::sqrt(b.nominal * (1 - b.nominal) / static_cast<double>(draws));
    double lo = 1.0;
    double hi = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
      const Eigen::VectorXd x = 3.0 * direction(lane++);
      const Eigen::VectorXd y = x + c * direction(lane++);
      // each endpoint moves by eps / 2, so the distance stays in [c - eps, c + eps]
      const Eigen::VectorXd xp = x + 0.5 * eps * direction(lane++);
      const Eigen::VectorXd yp = y + 0.5 * eps * direction(lane++);
      const PStableHashBank bank(2.0, model.r, 7000 + lane, 0, draws);
      const auto hx = bank.hash(xp);
      const auto hy = bank.hash(yp);
      const double rate = static_cast<double>((hx.array() == hy.array()).count()) /
                          static_cast<double>(draws);
      lo = std::min(lo, rate);
      hi = std::max(hi, rate);
      ok = ok && rate >= b.lower - 3 * sigma && rate <= b.upper + 3 * sigma;
    }
    detail += fmt("eps %.2f rates [%.4f, %.4f] in [%.4f, %.4f] +- 3s; ", eps, lo, hi, b.lower,
                  b.upper);
  }
  report(4, ok, detail);
}

void convergence_criterion() {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::Convergence;
  cfg.seeds = 100;
  cfg.seed = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const auto study = run_convergence_study(cfg);
  const double elapsed = seconds_since(t0);
  const bool ok = study.slope_mc >= -0.65 && study.slope_mc <= -0.35 &&
                  study.slope_sobol <= -0.8 && elapsed < 120.0;
  report(5, ok,
         fmt("iid slope %.3f, sobol slope %.3f, 100 seeds, %.1fs", study.slope_mc,
             study.slope_sobol, elapsed));
}

void ortho_oracle_criterion() {
  const IntervalDomain dom(0, 1, Measure::ChebyshevWeight);
  const auto cfg = OrthoEmbedConfig::fixed(64, JacobianMode::ChebyshevWeighted);
  const CounterRng rng(606, 0);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    auto sine = [&](std::uint64_t k) {
      return FunctionSource::sine(0.5 + rng.uniform(k, 0),
                                  1.0 + static_cast<double>(rng.bits(k, 1) % 3),
                                  2.0 * std::numbers::pi * rng.uniform(k, 2), dom);
    };
    const auto f = sine(2 * i);
    const auto g = sine(2 * i + 1);
    const double embedded = embedded_distance(embed_ortho(f, cfg), embed_ortho(g, cfg));
    worst = std::max(worst, std::abs(embedded - distance_oracle(f, g)));
  }
  report(6, worst <= 1e-9, fmt("max |embedded - oracle| %.3g over 100 pairs, N_f = 64", worst));
}

void exact_oracle_criterion() {
  double worst = 0.0;
  auto expect = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
  auto gauss = [](double m, double s) { return Distribution1D::gaussian(m, s); };
  auto emp = [](std::vector<double> xs) { return Distribution1D::empirical(std::move(xs)); };

  expect(wasserstein_gaussian_exact(gauss(0, 1), gauss(0, 1)), 0.0);
  expect(wasserstein_gaussian_exact(gauss(0, 1), gauss(1, 1)), 1.0);
  expect(wasserstein_gaussian_exact(gauss(0, 1), gauss(1, 2)), std::sqrt(2.0));
  for (double p : {1.0, 1.5, 2.0, 3.0})
    expect(wasserstein_empirical_exact(emp({0}), emp({1}), p), 1.0);
  expect(wasserstein_empirical_exact(emp({0, 2}), emp({1, 3}), 1), 1.0);
  expect(wasserstein_empirical_exact(emp({0}), emp({0, 1}), 2), std::sqrt(0.5));
  expect(wasserstein_empirical_exact(emp({0, 3}), emp({1, 2, 4}), 1), 7.0 / 6.0);

  // metric axioms, symmetry and the triangle inequality up to 1e-12
  bool axioms = true;
  const CounterRng rng(707, 0);
  for (std::uint64_t t = 0; t < 200; ++t) {
    auto g = [&](std::uint64_t k) {
      return gauss(-1 + 2 * rng.uniform(k, 0), 0.1 + 0.9 * rng.uniform(k, 1));
    };
    const auto x = g(3 * t);
    const auto y = g(3 * t + 1);
    const auto z = g(3 * t + 2);
    const double xy = wasserstein_gaussian_exact(x, y);
    axioms = axioms && xy == wasserstein_gaussian_exact(y, x) &&
             wasserstein_gaussian_exact(x, x) == 0.0 && xy > 0.0 &&
             xy <= wasserstein_gaussian_exact(x, z) + wasserstein_gaussian_exact(z, y) + 1e-12;
    auto e = [&](std::uint64_t k, std::size_t n) {
      std::vector<double> xs(n);
      for (std::size_t i = 0; i < n; ++i)
        xs[i] = rng.normal(1000 * k + i);
      return emp(std::move(xs));
    };
    const auto a = e(3 * t, 3 + t % 7);
    const auto b = e(3 * t + 1, 4 + t % 5);
    const auto c = e(3 * t + 2, 2 + t % 9);
    for (double p : {1.0, 2.0}) {
      const double ab = wasserstein_empirical_exact(a, b, p);
      axioms = axioms && std::abs(ab - wasserstein_empirical_exact(b, a, p)) <= 1e-12 &&
               wasserstein_empirical_exact(a, a, p) == 0.0 &&
               ab <= wasserstein_empirical_exact(a, c, p) +
                         wasserstein_empirical_exact(c, b, p) + 1e-12;
    }
  }
  report(7, worst <= 1e-12 && axioms,
         fmt("closed-form max error %.3g, metric axioms %s", worst, axioms ? "hold" : "violated"));
}

void index_criterion() {
  using namespace flsh::testing;
  const auto bench = make_sine_benchmark(kBenchItems, kBenchQueries, kBenchSeed);
  const auto result = measure_recall(bench_index_config(), bench);
  report(8, result.recall >= 0.9 && result.mean_candidate_fraction <= 0.2,
         fmt("recall %.3f, mean candidates %.1f%% (L = %zu, K = %zu, r = %.2f)", result.recall,
             100 * result.mean_candidate_fraction, kBenchTables, kBenchBands, kBenchWidth));
}

} // namespace

int main() {
  const std::vector<std::function<void()>> criteria{
      [] { collision_criterion(1, Experiment::Cosine, 0.03, 0.08); },
      [] { collision_criterion(2, Experiment::L2, 0.03, 0.08); },
      // W2 has no max tolerance
      [] { collision_criterion(3, Experiment::Wasserstein, 0.05, 1.0); },
      sandwich_criterion,
      convergence_criterion,
      ortho_oracle_criterion,
      exact_oracle_criterion,
      index_criterion,
  };
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception &e) {
      report(static_cast<int>(i) + 1, false, std::string("exception: ") + e.what());
    }
  }
  return failures == 0 ? 0 : 1;
}
