#include <flsh/error.hpp>
#include <flsh/hash_families.hpp>
#include <flsh/quadrature.hpp>
#include <flsh/rng.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

using namespace flsh;
using std::numbers::pi;

namespace {

// Closed forms of the collision integral.
double closed_form_p2(double c, double r) {
  const double t = r / c;
  const double phi = 0.5 * std::erfc(t / std::numbers::sqrt2);
  return 1.0 - 2.0 * phi - 2.0 / (std::sqrt(2.0 * pi) * t) * (1.0 - std::exp(-t * t / 2));
}

double closed_form_p1(double c, double r) {
  const double t = r / c;
  return 2.0 * std::atan(t) / pi - std::log1p(t * t) / (pi * t);
}

Eigen::VectorXd random_vector(std::uint64_t seed, Eigen::Index n) {
  const CounterRng rng(seed, 0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = rng.normal(static_cast<std::uint64_t>(i));
  return v;
}

double collision_rate(const PStableHashBank &bank, const Eigen::VectorXd &x,
                      const Eigen::VectorXd &y) {
  const auto hx = bank.hash(x);
  const auto hy = bank.hash(y);
  return static_cast<double>((hx.array() == hy.array()).count()) /
         static_cast<double>(bank.size());
}

} // namespace

TEST_CASE("p-stable hash examples") {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(8);
  for (double r : {0.1, 1.0, 7.0}) {
    CHECK(PStableHashFunction(2, r, 0.5, 1, 0).hash(zero) == 0);
    CHECK(PStableHashFunction(2, r, 0.99, 1, 0).hash(zero) == 0);
  }
  CHECK_THROWS_AS(PStableHashFunction(2, 1, 1.0, 1, 0), ConfigError);
  CHECK_THROWS_AS(PStableHashFunction(2, 0, 0.5, 1, 0), ConfigError);
  CHECK_THROWS_AS(PStableHashFunction(3, 1, 0.5, 1, 0), ConfigError);

  const auto h = PStableHashFunction::sample(2, 1, 5, 3);
  CHECK(h.b() >= 0.0);
  CHECK(h.b() < 1.0);
  CHECK(h.b() == sample_offset(5, 3));
  const Eigen::VectorXd x = random_vector(1, 16);
  CHECK(h.hash(x) == static_cast<std::int64_t>(std::floor(h.projection(x) / h.r() + h.b())));
}

TEST_CASE("lazy growth is order independent") {
  const Eigen::VectorXd x8 = random_vector(3, 8);
  const Eigen::VectorXd x16 = random_vector(4, 16);
  const Eigen::VectorXd x40 = random_vector(5, 40);
  for (double p : {0.7, 1.0, 2.0}) {
    const auto lazy = PStableHashFunction::sample(p, 1, 9, 2);
    const auto h8 = lazy.hash(x8);
    CHECK(lazy.stream().materialized() >= 8);
    const auto h16 = lazy.hash(x16);
    const auto h40 = lazy.hash(x40);

    const auto fresh = PStableHashFunction::sample(p, 1, 9, 2);
    fresh.stream().prefix(64);
    CHECK(fresh.hash(x16) == h16);
    CHECK(fresh.hash(x40) == h40);
    CHECK(fresh.hash(x8) == h8);
    for (std::size_t i = 0; i < 40; ++i)
      CHECK(lazy.stream().at(i) == fresh.stream().at(i));
  }
}

TEST_CASE("banks hash bit-identically to single functions") {
  const PStableHashBank bank(2, 0.7, 21, 5, 32);
  const SimHashBank sbank(21, 5, 32);
  for (Eigen::Index n : {3, 17, 64}) {
    const Eigen::VectorXd x = random_vector(static_cast<std::uint64_t>(n), n);
    const auto hb = bank.hash(x);
    const auto sb = sbank.hash(x);
    for (std::size_t i = 0; i < 32; ++i) {
      CHECK(hb[static_cast<Eigen::Index>(i)] ==
            PStableHashFunction::sample(2, 0.7, 21, 5 + i).hash(x));
      CHECK(sb[i] == SimHashFunction(21, 5 + i).hash(x));
    }
  }
}

TEST_CASE("concurrent hashing observes one coefficient stream") {
  const auto h = PStableHashFunction::sample(2, 1, 77, 0);
  std::vector<std::vector<std::int64_t>> results(4);
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < results.size(); ++t)
    workers.emplace_back([&, t] {
      for (Eigen::Index n = 1; n <= 200; ++n) {
        const Eigen::Index len = (n * static_cast<Eigen::Index>(t + 3)) % 200 + 1;
        results[t].push_back(h.hash(Eigen::VectorXd::Ones(len)));
      }
    });
  for (auto &w : workers)
    w.join();
  for (std::size_t t = 0; t < results.size(); ++t)
    for (Eigen::Index n = 1; n <= 200; ++n) {
      const Eigen::Index len = (n * static_cast<Eigen::Index>(t + 3)) % 200 + 1;
      const auto fresh = PStableHashFunction::sample(2, 1, 77, 0);
      CHECK(results[t][static_cast<std::size_t>(n - 1)] ==
            fresh.hash(Eigen::VectorXd::Ones(len)));
    }
}

TEST_CASE("hash errors") {
  const auto h = PStableHashFunction(2, 1e-12, 0.5, 1, 0);
  CHECK_THROWS_AS(h.hash(Eigen::VectorXd::Constant(4, 1e10)), OverflowError);
  Eigen::VectorXd nan = Eigen::VectorXd::Zero(3);
  nan[1] = NAN;
  CHECK_THROWS_AS(PStableHashFunction(2, 1, 0.5, 1, 0).hash(nan), NonFiniteError);
  CHECK_THROWS_AS(checked_floor(9.3e18), OverflowError);
  CHECK(checked_floor(-2.5) == -3);
}

TEST_CASE("SimHash examples") {
  const Eigen::VectorXd x = random_vector(8, 20);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const SimHashFunction h(3, s);
    CHECK(h.hash(x) == h.hash(2.0 * x));
    CHECK(h.hash(x) != h.hash(-x));
  }
  CHECK_THROWS_AS(SimHashFunction(3, 0).hash(Eigen::VectorXd::Zero(5)), ZeroVectorError);
  CHECK_THROWS_AS(SimHashBank(3, 0, 4).hash(Eigen::VectorXd::Zero(5)), ZeroVectorError);

  // vectors at cosine similarity 0.5
  const Eigen::Vector2d a(1, 0);
  const Eigen::Vector2d b(0.5, std::sqrt(3.0) / 2);
  const SimHashBank bank(12, 0, 1024);
  const auto ha = bank.hash(a);
  const auto hb = bank.hash(b);
  double same = 0;
  for (std::size_t i = 0; i < ha.size(); ++i)
    same += ha[i] == hb[i];
  CHECK(std::abs(same / 1024.0 - 2.0 / 3.0) <= 0.05);
}

TEST_CASE("SimHash collision rate matches the closed form") {
  const SimHashBank bank(31, 0, 4096);
  for (double cs : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    const Eigen::Vector3d a(1, 0, 0);
    const Eigen::Vector3d b(cs, std::sqrt(1 - cs * cs), 0);
    const auto ha = bank.hash(a);
    const auto hb = bank.hash(b);
    double same = 0;
    for (std::size_t i = 0; i < ha.size(); ++i)
      same += ha[i] == hb[i];
    const double p = collision_prob_simhash(cs);
    const double sigma = std::sqrt(p * (1 - p) / 4096.0);
    CHECK(std::abs(same / 4096.0 - p) <= 3.0 * sigma);
  }
}

TEST_CASE("collision_prob_simhash") {
  CHECK(collision_prob_simhash(1.0) == 1.0);
  CHECK(collision_prob_simhash(0.0) == 0.5);
  CHECK(collision_prob_simhash(-1.0) == 0.0);
  CHECK(collision_prob_simhash(1.0 + 1e-13) == 1.0);
  CHECK_THROWS_AS(collision_prob_simhash(1.001), RangeError);
  CHECK_THROWS_AS(collision_prob_simhash(NAN), RangeError);
}

TEST_CASE("collision_prob_pstable") {
  for (double p : {1.0, 2.0}) {
    const CollisionModel m{p, 1.0, 64};
    CHECK(collision_prob_pstable(m, 1e-9) >= 1 - 1e-6);
    CHECK(collision_prob_pstable(m, 1e9) <= 1e-6);
  }
  SUBCASE("closed forms") {
    for (double r : {0.5, 1.0, 4.0})
      for (double c : {0.05, 0.3, 1.0, 2.0, 10.0}) {
        CHECK(std::abs(collision_prob_pstable({2, r, 64}, c) - closed_form_p2(c, r)) <= 1e-10);
        CHECK(std::abs(collision_prob_pstable({1, r, 64}, c) - closed_form_p1(c, r)) <= 1e-10);
      }
    // frozen reference values
    CHECK(collision_prob_pstable({2, 1, 64}, 1.0) == doctest::Approx(0.3687463803725072).epsilon(1e-12));
    CHECK(collision_prob_pstable({1, 1, 64}, 1.0) == doctest::Approx(0.2793643998473484).epsilon(1e-12));
  }
  SUBCASE("monotone in c and r") {
    for (double p : {1.0, 2.0}) {
      double prev = 1.0;
      for (double c = 0.1; c <= 4.0; c += 0.1) {
        const double v = collision_prob_pstable({p, 1, 64}, c);
        CHECK(v <= prev);
        prev = v;
      }
      prev = 0.0;
      for (double r = 0.25; r <= 4.0; r += 0.25) {
        const double v = collision_prob_pstable({p, r, 64}, 1.0);
        CHECK(v >= prev);
        prev = v;
      }
    }
  }
  SUBCASE("simulation at c = 1") {
    // 1e5 Gaussian projections of two points at distance 1
    const CounterRng rng(4242, 0);
    std::size_t same = 0;
    const std::size_t n = 100000;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double proj = rng.normal(i);
      const double b = rng.uniform(i, 2);
      same += std::floor(b) == std::floor(proj + b);
    }
    CHECK(std::abs(static_cast<double>(same) / n - collision_prob_pstable({2, 1, 64}, 1.0)) <=
          2e-3 + 3.0 * std::sqrt(0.25 / n));
  }
  SUBCASE("unsupported models") {
    CHECK_THROWS_AS(collision_prob_pstable({1.5, 1, 64}, 1.0), UnsupportedPError);
    CHECK_THROWS_AS(collision_prob_pstable({2, 0, 64}, 1.0), ConfigError);
    CHECK_THROWS_AS(collision_prob_pstable({2, 1, 16}, 1.0), ConfigError);
    CHECK_THROWS_AS(collision_prob_pstable({2, 1, 64}, 0.0), ConfigError);
  }
}

TEST_CASE("folded densities") {
  CHECK(folded_stable_density(2, 0) == doctest::Approx(2.0 / std::sqrt(2 * pi)));
  CHECK(folded_stable_density(1, 0) == doctest::Approx(2.0 / pi));
  CHECK(folded_stable_density_sup(2) == folded_stable_density(2, 0));
  CHECK(folded_stable_density_sup(1) == folded_stable_density(1, 0));
  CHECK(adaptive_simpson([](double s) { return folded_stable_density(2, s); }, 0, 40) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(folded_stable_density(0.5, 1), UnsupportedPError);
}

TEST_CASE("perturbed collision bounds") {
  const CollisionModel m{2, 1, 64};
  const auto zero = perturbed_collision_bounds(m, 1.0, 0.0);
  CHECK(zero.lower == zero.nominal);
  CHECK(zero.upper == zero.nominal);
  for (double p : {1.0, 2.0})
    for (double c : {0.3, 1.0, 3.0})
      for (double eps : {0.01, 0.1, 0.25}) {
        const auto b = perturbed_collision_bounds({p, 1, 64}, c, eps);
        CHECK(b.lower <= b.nominal);
        CHECK(b.nominal <= b.upper);
        // the exact probabilities at c -/+ eps lie inside the sandwich
        CHECK(collision_prob_pstable({p, 1, 64}, c - eps) <= b.upper + 1e-12);
        CHECK(collision_prob_pstable({p, 1, 64}, c + eps) >= b.lower - 1e-12);
      }
  CHECK_THROWS_AS(perturbed_collision_bounds(m, 1.0, 1.0), EpsilonTooLargeError);

  // Dropping the tail term, eps r sup / (2 (c+eps)^2) alone, is not a bound:
  // at c = 3, eps = 0.25 it sits above P(c + eps).
  const double c = 3.0;
  const double eps = 0.25;
  const double slope_only = collision_prob_pstable(m, c) -
                            eps * folded_stable_density_sup(2) / (2 * (c + eps) * (c + eps));
  CHECK(collision_prob_pstable(m, c + eps) < slope_only);
  CHECK(collision_prob_pstable(m, c + eps) >= perturbed_collision_bounds(m, c, eps).lower);
  CHECK_THROWS_AS(perturbed_collision_bounds(m, 1.0, -0.1), ConfigError);
}

TEST_CASE("perturbed pairs collide within the sandwich") {
  const Eigen::Index dim = 32;
  const Eigen::VectorXd x = random_vector(100, dim);
  const Eigen::VectorXd dir = random_vector(101, dim).normalized();
  const Eigen::VectorXd y = x + dir;
  const PStableHashBank bank(2, 1, 555, 0, 10000);
  const double eps = 0.1;
  const auto bounds = perturbed_collision_bounds({2, 1, 64}, 1.0, eps);
  // each endpoint moves by eps / 2
  const Eigen::VectorXd xp = x + 0.5 * eps * random_vector(102, dim).normalized();
  const Eigen::VectorXd yp = y + 0.5 * eps * random_vector(103, dim).normalized();
  const double rate = collision_rate(bank, xp, yp);
  const double sigma = std::sqrt(bounds.nominal * (1 - bounds.nominal) / 1e4);
  CHECK(rate >= bounds.lower - 3 * sigma);
  CHECK(rate <= bounds.upper + 3 * sigma);
}

TEST_CASE("observed collision rate falls with distance") {
  const Eigen::Index dim = 16;
  const Eigen::VectorXd x = random_vector(7, dim);
  const Eigen::VectorXd dir = random_vector(8, dim).normalized();
  const PStableHashBank bank(2, 1, 99, 0, 2048);
  double prev = 1.0;
  for (int i = 1; i <= 20; ++i) {
    const double c = 0.1 * i;
    const double rate = collision_rate(bank, x, x + c * dir);
    const double p = collision_prob_pstable({2, 1, 64}, c);
    CHECK(rate <= prev + 3.0 * std::sqrt(p * (1 - p) / 2048.0) + 1e-12);
    prev = rate;
  }
}

TEST_CASE("coefficient laws") {
  CHECK(law_for(2.0) == CoefficientLaw::Normal);
  CHECK(law_for(1.0) == CoefficientLaw::Cauchy);
  CHECK(law_for(1.5) == CoefficientLaw::Stable);
  CHECK_THROWS_AS(law_for(2.5), ConfigError);

  // stability: x1 + x2 has the law of 2^(1/a) x, compared through the median
  // of |.|
  const double alpha = 1.5;
  const CoefficientStream s(1, 0, alpha);
  const std::size_t n = 40000;
  std::vector<double> single;
  std::vector<double> pair;
  for (std::size_t i = 0; i < n; ++i) {
    single.push_back(std::abs(s.at(i)));
    pair.push_back(std::abs(s.at(n + 2 * i) + s.at(n + 2 * i + 1)));
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
  };
  CHECK(median(pair) / median(single) == doctest::Approx(std::pow(2.0, 1 / alpha)).epsilon(0.03));

  // Cauchy: median of |x| is 1; normal: 0.6745
  const CoefficientStream cauchy(2, 0, 1.0);
  const CoefficientStream normal(2, 0, 2.0);
  single.clear();
  pair.clear();
  for (std::size_t i = 0; i < n; ++i) {
    single.push_back(std::abs(cauchy.at(i)));
    pair.push_back(std::abs(normal.at(i)));
  }
  CHECK(median(single) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(median(pair) == doctest::Approx(0.6744897501960817).epsilon(0.03));
}
