#include <flsh/error.hpp>
#include <flsh/hash_families.hpp>
#include <flsh/quadrature.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace flsh {

CoefficientLaw law_for(double p) {
  if (!(p > 0.0 && p <= 2.0))
    throw ConfigError("p must lie in (0, 2]");
  if (p == 2.0)
    return CoefficientLaw::Normal;
  if (p == 1.0)
    return CoefficientLaw::Cauchy;
  return CoefficientLaw::Stable;
}

CoefficientStream::CoefficientStream(std::uint64_t seed, std::uint64_t stream,
                                     double p)
    : seed_(seed), stream_(stream), p_(p), law_(law_for(p)), rng_(seed, stream),
      cache_(std::make_shared<const std::vector<double>>()) {}

CoefficientStream::CoefficientStream(const CoefficientStream &other)
    : seed_(other.seed_), stream_(other.stream_), p_(other.p_),
      law_(other.law_), rng_(other.rng_) {
  std::lock_guard lock(other.mutex_);
  cache_ = other.cache_;
}

CoefficientStream &CoefficientStream::operator=(const CoefficientStream &other) {
  if (this == &other)
    return *this;
  std::shared_ptr<const std::vector<double>> snapshot;
  {
    std::lock_guard lock(other.mutex_);
    snapshot = other.cache_;
  }
  std::lock_guard lock(mutex_);
  seed_ = other.seed_;
  stream_ = other.stream_;
  p_ = other.p_;
  law_ = other.law_;
  rng_ = other.rng_;
  cache_ = std::move(snapshot);
  return *this;
}

double CoefficientStream::at(std::size_t i) const noexcept {
  switch (law_) {
  case CoefficientLaw::Normal:
    return rng_.normal(i);
  case CoefficientLaw::Cauchy:
    return rng_.cauchy(i);
  case CoefficientLaw::Stable:
    break;
  }
  return rng_.symmetric_stable(p_, i);
}

std::shared_ptr<const std::vector<double>>
CoefficientStream::prefix(std::size_t n) const {
  std::lock_guard lock(mutex_);
  if (cache_->size() >= n)
    return cache_;
  auto grown = std::make_shared<std::vector<double>>(*cache_);
  grown->reserve(n);
  for (std::size_t i = grown->size(); i < n; ++i)
    grown->push_back(at(i));
  cache_ = std::move(grown);
  return cache_;
}

std::size_t CoefficientStream::materialized() const {
  std::lock_guard lock(mutex_);
  return cache_->size();
}

double sample_offset(std::uint64_t seed, std::uint64_t stream) noexcept {
  const CounterRng rng(derive_seed(seed, 0x0FF5E7ULL), stream);
  // uniform() is in (0, 1); the floor keeps b strictly below 1.
  return rng.uniform(0);
}

std::int64_t checked_floor(double value) {
  if (!std::isfinite(value))
    throw NonFiniteError("hash input produced a non-finite projection");
  const double f = std::floor(value);
  // 2^63 is exactly representable; anything at or above it overflows.
  if (f >= 0x1.0p63 || f < -0x1.0p63)
    throw OverflowError("hash value exceeds the 64-bit range; r is too small "
                        "for the data scale");
  return static_cast<std::int64_t>(f);
}

namespace {

// Plain left-to-right sum. Single functions and banks both go through here so
// their hashes agree bit for bit regardless of buffer alignment.
double sequential_dot(const double *alpha,
                      const Eigen::Ref<const Eigen::VectorXd> &x) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    acc += alpha[i] * x[i];
  return acc;
}

double dot_prefix(const CoefficientStream &stream,
                  const Eigen::Ref<const Eigen::VectorXd> &x) {
  const auto alpha = stream.prefix(static_cast<std::size_t>(x.size()));
  return sequential_dot(alpha->data(), x);
}

} // namespace

PStableHashFunction PStableHashFunction::sample(double p, double r,
                                                std::uint64_t seed,
                                                std::uint64_t stream) {
  return {p, r, sample_offset(seed, stream), seed, stream};
}

PStableHashFunction::PStableHashFunction(double p, double r, double b,
                                         std::uint64_t seed, std::uint64_t stream)
    : p_(p), r_(r), b_(b), alpha_(seed, stream, p) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw ConfigError("hash width r must be positive");
  if (!(b >= 0.0 && b < 1.0))
    throw ConfigError("hash offset b must lie in [0, 1)");
}

double PStableHashFunction::projection(const Eigen::Ref<const Eigen::VectorXd> &x) const {
  return dot_prefix(alpha_, x);
}

std::int64_t PStableHashFunction::hash(const Eigen::Ref<const Eigen::VectorXd> &x) const {
  return checked_floor(projection(x) / r_ + b_);
}

SimHashFunction::SimHashFunction(std::uint64_t seed, std::uint64_t stream)
    : alpha_(seed, stream, 2.0) {}

double SimHashFunction::projection(const Eigen::Ref<const Eigen::VectorXd> &x) const {
  return dot_prefix(alpha_, x);
}

bool SimHashFunction::hash(const Eigen::Ref<const Eigen::VectorXd> &x) const {
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0)
    throw ZeroVectorError("SimHash of the zero vector is undefined");
  const double proj = projection(x);
  if (!std::isfinite(proj))
    throw NonFiniteError("hash input produced a non-finite projection");
  return proj >= 0.0;
}

namespace {

/// Grow-only coefficient matrix: rows are functions, columns coordinates.
template <typename Fn>
std::shared_ptr<const RowMatrix>
grow_matrix(std::mutex &mutex, std::shared_ptr<const RowMatrix> &cache,
            const std::vector<Fn> &functions, Eigen::Index dim) {
  std::lock_guard lock(mutex);
  if (cache && cache->cols() >= dim)
    return cache;
  const Eigen::Index rows = static_cast<Eigen::Index>(functions.size());
  auto grown = std::make_shared<RowMatrix>(rows, dim);
  const Eigen::Index have = cache ? cache->cols() : 0;
  if (have > 0)
    grown->leftCols(have) = *cache;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto alpha = functions[static_cast<std::size_t>(i)].stream().prefix(
        static_cast<std::size_t>(dim));
    for (Eigen::Index j = have; j < dim; ++j)
      (*grown)(i, j) = (*alpha)[static_cast<std::size_t>(j)];
  }
  cache = std::move(grown);
  return cache;
}

} // namespace

namespace {

std::vector<PStableHashFunction> sample_functions(double p, double r,
                                                  std::uint64_t seed,
                                                  std::uint64_t first_stream,
                                                  std::size_t count) {
  std::vector<PStableHashFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(PStableHashFunction::sample(p, r, seed, first_stream + i));
  return out;
}

} // namespace

PStableHashBank::PStableHashBank(double p, double r, std::uint64_t seed,
                                 std::uint64_t first_stream, std::size_t count)
    : PStableHashBank(sample_functions(p, r, seed, first_stream, count)) {}

PStableHashBank::PStableHashBank(std::vector<PStableHashFunction> functions)
    : functions_(std::move(functions)) {
  const auto count = static_cast<Eigen::Index>(functions_.size());
  offsets_.resize(count);
  widths_.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    offsets_[i] = functions_[static_cast<std::size_t>(i)].b();
    widths_[i] = functions_[static_cast<std::size_t>(i)].r();
  }
}

std::shared_ptr<const RowMatrix> PStableHashBank::coefficients(Eigen::Index dim) const {
  return grow_matrix(mutex_, cache_, functions_, dim);
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>
PStableHashBank::hash(const Eigen::Ref<const Eigen::VectorXd> &x) const {
  const auto alpha = coefficients(x.size());
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> out(alpha->rows());
  for (Eigen::Index i = 0; i < alpha->rows(); ++i)
    out[i] = checked_floor(sequential_dot(alpha->row(i).data(), x) / widths_[i] +
                           offsets_[i]);
  return out;
}

SimHashBank::SimHashBank(std::uint64_t seed, std::uint64_t first_stream,
                         std::size_t count) {
  functions_.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    functions_.emplace_back(seed, first_stream + i);
}

std::shared_ptr<const RowMatrix> SimHashBank::coefficients(Eigen::Index dim) const {
  return grow_matrix(mutex_, cache_, functions_, dim);
}

std::vector<bool> SimHashBank::hash(const Eigen::Ref<const Eigen::VectorXd> &x) const {
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0)
    throw ZeroVectorError("SimHash of the zero vector is undefined");
  const auto alpha = coefficients(x.size());
  std::vector<bool> out(static_cast<std::size_t>(alpha->rows()));
  for (Eigen::Index i = 0; i < alpha->rows(); ++i) {
    const double proj = sequential_dot(alpha->row(i).data(), x);
    if (!std::isfinite(proj))
      throw NonFiniteError("hash input produced a non-finite projection");
    out[static_cast<std::size_t>(i)] = proj >= 0.0;
  }
  return out;
}

// Collision probabilities

void CollisionModel::validate() const {
  if (p != 1.0 && p != 2.0)
    throw UnsupportedPError("collision probability is only available for p = 1 "
                            "and p = 2");
  if (!(r > 0.0) || !std::isfinite(r))
    throw ConfigError("r must be positive");
  if (resolution < 64)
    throw ConfigError("quadrature resolution must be at least 64");
}

double folded_stable_density(double p, double s) {
  if (s < 0.0)
    return 0.0;
  if (p == 2.0)
    return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * s * s);
  if (p == 1.0)
    return 2.0 / (std::numbers::pi * (1.0 + s * s));
  throw UnsupportedPError("folded density only available for p = 1 and p = 2");
}

double folded_stable_density_sup(double p) {
  if (p == 2.0)
    return 2.0 / std::sqrt(2.0 * std::numbers::pi);
  if (p == 1.0)
    return 2.0 / std::numbers::pi;
  throw UnsupportedPError("folded density only available for p = 1 and p = 2");
}

double collision_prob_pstable(const CollisionModel &model, double c) {
  model.validate();
  if (!(c > 0.0))
    throw ConfigError("distance c must be positive");
  const double upper = model.r / c;
  constexpr double tol = 1e-13;
  double value = 0.0;
  if (model.p == 2.0) {
    // The Gaussian density is below 1e-300 past s = 38.
    const double cut = std::min(upper, 38.0);
    value = adaptive_simpson(
        [&](double s) { return folded_stable_density(2.0, s) * (1.0 - c * s / model.r); },
        0.0, cut, tol, model.resolution);
  } else {
    // s = tan(phi) flattens the Cauchy tail: f_1(s) ds = (2 / pi) d(phi).
    const double phi_max = std::atan(upper);
    value = adaptive_simpson(
        [&](double phi) {
          return 2.0 / std::numbers::pi * (1.0 - c * std::tan(phi) / model.r);
        },
        0.0, phi_max, tol, model.resolution);
  }
  return std::clamp(value, 0.0, 1.0);
}

double collision_prob_simhash(double cossim) {
  constexpr double slack = 1e-12;
  if (!(cossim >= -1.0 - slack && cossim <= 1.0 + slack))
    throw RangeError("cosine similarity outside [-1, 1]");
  return 1.0 - std::acos(std::clamp(cossim, -1.0, 1.0)) / std::numbers::pi;
}

CollisionBounds perturbed_collision_bounds(const CollisionModel &model, double c,
                                           double eps) {
  if (!(eps >= 0.0))
    throw ConfigError("eps must be nonnegative");
  if (eps >= c)
    throw EpsilonTooLargeError("eps must be smaller than c");
  const double nominal = collision_prob_pstable(model, c);
  const double sup = folded_stable_density_sup(model.p);
  const double up = std::min(eps / (c - eps),
                             eps * model.r * sup / (2.0 * (c - eps) * (c - eps)));
  // The second term covers both the shifted slope and the lost tail on
  // [r/(c+eps), r/c]: eps r sup / (2 (c+eps)^2) + r sup eps^2 / (2 c (c+eps)^2).
  const double down = std::min(2.0 * eps / (c + eps),
                               eps * model.r * sup / (2.0 * c * (c + eps)));
  return {nominal - down, nominal + up, nominal};
}

} // namespace flsh
