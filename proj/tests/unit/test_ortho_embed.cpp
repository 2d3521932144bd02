#include <flsh/dct.hpp>
#include <flsh/error.hpp>
#include <flsh/ortho_embed.hpp>
#include <flsh/quadrature.hpp>
#include <flsh/rng.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace flsh;
using std::numbers::pi;

namespace {

const IntervalDomain kCheb(-1, 1, Measure::ChebyshevWeight);

OrthoEmbedConfig truncating(std::size_t terms, JacobianMode mode) {
  auto cfg = OrthoEmbedConfig::fixed(terms, mode);
  cfg.sample_nodes = 256;
  return cfg;
}

} // namespace

TEST_CASE("DCT-II: FFT path matches the direct sum") {
  const CounterRng rng(7, 0);
  for (std::size_t n : {4, 8, 16, 64, 256, 1024}) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = rng.normal(static_cast<std::uint64_t>(i) + 1000 * n);
    const Eigen::VectorXd a = dct2_direct(x);
    const Eigen::VectorXd b = dct2_fft(x);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-11 * std::max(1.0, a.norm()));
  }
  // non powers of two take the direct path
  Eigen::VectorXd x(6);
  x << 1, 2, 3, 4, 5, 6;
  CHECK((dct2(x) - dct2_direct(x)).norm() == 0.0);
  CHECK(dct2(x)[0] == doctest::Approx(21.0));
}

TEST_CASE("chebyshev nodes") {
  const auto x = chebyshev_nodes(0, 2, 4);
  for (Eigen::Index j = 0; j < 4; ++j)
    CHECK(x[j] == doctest::Approx(1.0 + std::cos(pi * (j + 0.5) / 4)));
  CHECK(x[0] > x[3]);
}

TEST_CASE("embed_ortho examples") {
  SUBCASE("constant") {
    const auto f = FunctionSource::composite(kCheb, [](double) { return 2.5; });
    const auto u = embed_ortho(f, OrthoEmbedConfig::fixed(16));
    CHECK(std::abs(u.coefficients[0] - 2.5 * std::sqrt(pi)) <= 1e-12);
    CHECK(u.coefficients.tail(15).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("identity") {
    const auto f = FunctionSource::composite(kCheb, [](double x) { return x; });
    const auto u = embed_ortho(f, OrthoEmbedConfig::fixed(16));
    // cos(theta) is e_1 scaled by sqrt(pi / 2)
    CHECK(std::abs(u.coefficients[1] - std::sqrt(pi / 2)) <= 1e-12);
    for (Eigen::Index k = 0; k < u.size(); ++k)
      if (k != 1)
        CHECK(std::abs(u.coefficients[k]) < 1e-12);
  }
  SUBCASE("sine tail at 64 terms") {
    const auto u = embed_ortho(FunctionSource::sine(1, 1, 0), OrthoEmbedConfig::fixed(64));
    CHECK(u.tail_estimate < 1e-12);
    CHECK(u.size() == 64);
  }
}

TEST_CASE("embedded_distance examples") {
  CoefficientVector u{Eigen::Vector2d(1, 0), {}, 0};
  CoefficientVector v{Eigen::Vector2d(0, 1), {}, 0};
  CHECK(embedded_distance(u, u) == 0.0);
  CHECK(embedded_distance(u, v) == doctest::Approx(std::sqrt(2.0)));

  CoefficientVector w{Eigen::Vector3d(1, 0, 2), {}, 0};
  CHECK(embedded_distance(u, w) == doctest::Approx(2.0));
  CHECK(embedded_distance(w, u) == doctest::Approx(2.0));

  CoefficientVector other = v;
  other.basis.mode = JacobianMode::LebesgueJacobian;
  CHECK_THROWS_AS(embedded_distance(u, other), BasisMismatchError);
  other = v;
  other.basis.b = 2.0;
  CHECK_THROWS_AS(embedded_distance(u, other), BasisMismatchError);
}

TEST_CASE("embedded distance agrees with the quadrature oracle at 64 terms") {
  const auto cfg = OrthoEmbedConfig::fixed(64);
  for (const auto &dom : {kCheb, IntervalDomain(0, 1, Measure::ChebyshevWeight)}) {
    const std::vector<std::pair<FunctionSource, FunctionSource>> pairs{
        {FunctionSource::sine(1, 1, 0, dom), FunctionSource::sine(1, 1, 1, dom)},
        {FunctionSource::sine(1, 2, 0.3, dom), FunctionSource::sine(0.4, 1, 2, dom)},
        {FunctionSource::sine(1, 1, 0, dom), FunctionSource::sine(2, 1, 0.5, dom)},
    };
    for (const auto &[f, g] : pairs)
      CHECK(std::abs(embedded_distance(embed_ortho(f, cfg), embed_ortho(g, cfg)) -
                     distance_oracle(f, g)) <= 1e-9);
  }
}

TEST_CASE("Lebesgue mode is the same-size Gauss-Chebyshev rule") {
  // With N nodes and N terms the embedded distance squared is exactly the
  // N-point rule applied to |f - g|^2 (x(t)) sin(t) (b - a) / 2. The sin(t)
  // factor is not smooth under even extension, so against the true integral
  // the error only falls like N^-2.
  const auto f = FunctionSource::sine(1, 1, 0);
  const auto g = FunctionSource::sine(1, 1, 1);
  const double truth = distance_oracle(f, g);
  double previous_error = INFINITY;
  for (std::size_t n : {16, 64, 256}) {
    const auto cfg = OrthoEmbedConfig::fixed(n, JacobianMode::LebesgueJacobian);
    const double embedded = embedded_distance(embed_ortho(f, cfg), embed_ortho(g, cfg));
    const double rule = std::sqrt(integrate_gauss_chebyshev(
        [&](double t) {
          const double x = 0.5 + 0.5 * t;
          const double d = f(x) - g(x);
          return d * d * std::sqrt(1 - t * t) * 0.5;
        },
        n));
    CHECK(std::abs(embedded - rule) <= 1e-12);
    const double error = std::abs(embedded - truth);
    CHECK(error < previous_error / 10);
    previous_error = error;
  }
  CHECK(previous_error < 1e-5);
}

TEST_CASE("embedding_error_bound") {
  const auto one = FunctionSource::composite(kCheb, [](double) { return 1.0; });
  const auto u = embed_ortho(one, OrthoEmbedConfig::fixed(1));
  CHECK(embedding_error_bound(u, std::sqrt(pi)).value <= 1e-7);
  CHECK(embedding_error_bound(u, u.coefficients.norm()).value == 0.0);
  const auto over = embedding_error_bound(u, 0.5);
  CHECK(over.value == 0.0);
  CHECK(over.clamped);

  const auto f = FunctionSource::sine(1, 1, 0);
  const auto u4 = embed_ortho(f, OrthoEmbedConfig::fixed(4));
  const auto u64 = embed_ortho(f, OrthoEmbedConfig::fixed(64));
  CHECK(embedding_error_bound(u4).value > embedding_error_bound(u64).value);
  CHECK(embedding_error_bound(u4).value == u4.tail_estimate);
}

TEST_CASE("adaptive truncation") {
  OrthoEmbedConfig cfg;
  const auto u = embed_ortho(FunctionSource::sine(1, 1, 0), cfg);
  CHECK(is_power_of_two(static_cast<std::size_t>(u.size())));
  CHECK(u.tail_estimate <= cfg.tail_tolerance);
  // a higher frequency needs more terms
  CHECK(embed_ortho(FunctionSource::sine(1, 8, 0), cfg).size() > u.size());

  const auto zero = FunctionSource::composite({}, [](double) { return 0.0; });
  const auto z = embed_ortho(zero, cfg);
  CHECK(z.size() == 2);
  CHECK(z.coefficients.norm() == 0.0);

  OrthoEmbedConfig tight;
  tight.max_terms = 16;
  const auto kink = FunctionSource::composite({-1, 1}, [](double x) { return std::abs(x); });
  CHECK_THROWS_AS(embed_ortho(kink, tight), TruncationError);
}

TEST_CASE("embed_ortho errors and config validation") {
  const auto bad = FunctionSource::composite({}, [](double x) { return x > 0.5 ? NAN : x; });
  CHECK_THROWS_AS(embed_ortho(bad, OrthoEmbedConfig::fixed(8)), NonFiniteError);
  OrthoEmbedConfig cfg;
  cfg.fixed_terms = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = OrthoEmbedConfig{};
  cfg.max_terms = 4;
  cfg.fixed_terms = 8;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = OrthoEmbedConfig{};
  cfg.tail_tolerance = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("Bessel inequality and monotone Parseval limit") {
  const std::vector<FunctionSource> fs{
      FunctionSource::sine(1, 1, 0.3, kCheb),
      FunctionSource::composite(kCheb, [](double x) { return std::exp(x); }),
      FunctionSource::composite(kCheb, [](double x) { return 1.0 / (1.2 + x); }),
  };
  for (const auto &f : fs) {
    const double oracle = norm_oracle(f);
    double previous = 0.0;
    for (std::size_t n = 1; n <= 128; n *= 2) {
      const double norm =
          embed_ortho(f, truncating(n, JacobianMode::ChebyshevWeighted)).coefficients.norm();
      CHECK(norm <= oracle + 1e-9);
      CHECK(norm >= previous - 1e-12);
      previous = norm;
    }
    CHECK(std::abs(previous - oracle) < 1e-9);
  }
}

TEST_CASE("tail estimate decreases with more terms") {
  const auto f = FunctionSource::sine(1, 2, 0.4);
  double previous = INFINITY;
  for (std::size_t n = 4; n <= 64; n *= 2) {
    const double tail = embed_ortho(f, OrthoEmbedConfig::fixed(n)).tail_estimate;
    CHECK(tail >= 0.0);
    CHECK(tail <= previous);
    previous = tail;
  }
}

TEST_CASE("linearity") {
  const auto f = FunctionSource::sine(1, 1, 0.2);
  const auto g = FunctionSource::sine(0.5, 3, 1.0);
  const double alpha = 1.5;
  const double beta = -0.75;
  const auto h = FunctionSource::composite({}, [&](double x) { return alpha * f(x) + beta * g(x); });
  for (auto mode : {JacobianMode::ChebyshevWeighted, JacobianMode::LebesgueJacobian}) {
    const auto cfg = OrthoEmbedConfig::fixed(32, mode);
    const Eigen::VectorXd lhs = embed_ortho(h, cfg).coefficients;
    const Eigen::VectorXd rhs =
        alpha * embed_ortho(f, cfg).coefficients + beta * embed_ortho(g, cfg).coefficients;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("distance consistency within the tail estimates") {
  const auto f = FunctionSource::sine(1, 1, 0, kCheb);
  const auto g = FunctionSource::sine(1, 2, 1, kCheb);
  const double oracle = distance_oracle(f, g);
  for (std::size_t n = 4; n <= 64; n *= 2) {
    const auto cfg = truncating(n, JacobianMode::ChebyshevWeighted);
    const auto u = embed_ortho(f, cfg);
    const auto v = embed_ortho(g, cfg);
    CHECK(std::abs(embedded_distance(u, v) - oracle) <=
          u.tail_estimate + v.tail_estimate + 1e-12);
  }
}
