#include <flsh/error.hpp>
#include <flsh/mc_embed.hpp>
#include <flsh/rng.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace flsh {

void McEmbedConfig::validate() const {
  if (sample_count == 0)
    throw ConfigError("sample_count must be positive");
  if (!(p > 0.0 && p <= 2.0))
    throw ConfigError("p must lie in (0, 2]");
}

namespace {

std::uint64_t reverse_bits(std::uint64_t v) noexcept {
  v = ((v >> 1) & 0x5555555555555555ULL) | ((v & 0x5555555555555555ULL) << 1);
  v = ((v >> 2) & 0x3333333333333333ULL) | ((v & 0x3333333333333333ULL) << 2);
  v = ((v >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((v & 0x0F0F0F0F0F0F0F0FULL) << 4);
  return __builtin_bswap64(v);
}

} // namespace

double radical_inverse_base2(std::uint64_t i) noexcept {
  // Exact for i < 2^53: the reversed word then has at most 53 significant bits.
  return static_cast<double>(reverse_bits(i)) * 0x1.0p-64;
}

double scrambled_radical_inverse_base2(std::uint64_t i, std::uint64_t seed) noexcept {
  const std::uint64_t key = mix64(seed ^ 0xA0761D6478BD642FULL);
  const auto digits = static_cast<std::uint32_t>(reverse_bits(i) >> 32);
  std::uint32_t out = 0;
  std::uint64_t prefix = 0;
  for (int d = 0; d < 32; ++d) {
    const std::uint32_t bit = (digits >> (31 - d)) & 1U;
    const std::uint64_t h = mix64(key ^ mix64((std::uint64_t(d) << 32) | prefix));
    out |= (bit ^ static_cast<std::uint32_t>(h & 1U)) << (31 - d);
    prefix = (prefix << 1) | bit;
  }
  const CounterRng fill(seed, 0x5C7A3B1EULL);
  return (static_cast<double>(out) + fill.uniform(i)) * 0x1.0p-32;
}

SamplePlan::SamplePlan(IntervalDomain domain, Eigen::VectorXd abscissae)
    : domain_(domain), abscissae_(std::move(abscissae)) {
  if (abscissae_.size() == 0)
    throw ConfigError("sample plan needs at least one abscissa");
  for (Eigen::Index i = 0; i < abscissae_.size(); ++i)
    if (!(abscissae_[i] > domain_.a() && abscissae_[i] < domain_.b()))
      throw DomainError("sample plan abscissae must lie strictly inside the domain");
}

double SamplePlan::scale(double p) const {
  return std::pow(domain_.volume() / static_cast<double>(size()), 1.0 / p);
}

SamplePlan make_sample_plan(const IntervalDomain &domain, const McEmbedConfig &cfg) {
  cfg.validate();
  const CounterRng rng(cfg.seed, 0x1D5A3F0ULL);
  Eigen::VectorXd x(static_cast<Eigen::Index>(cfg.sample_count));
  for (std::size_t i = 0; i < cfg.sample_count; ++i) {
    double u = 0.0;
    switch (cfg.sampler) {
    case Sampler::IidUniform:
      u = rng.uniform(i);
      break;
    case Sampler::Sobol:
      // Index 0 maps to the endpoint 0, so the sequence starts at 1.
      u = cfg.scramble ? scrambled_radical_inverse_base2(i + 1, cfg.seed)
                       : radical_inverse_base2(i + 1);
      break;
    }
    double xi = 0.0;
    switch (domain.measure()) {
    case Measure::Lebesgue:
      xi = domain.a() + (domain.b() - domain.a()) * u;
      break;
    case Measure::ChebyshevWeight:
      xi = domain.midpoint() + domain.half_width() * std::cos(std::numbers::pi * u);
      break;
    default:
      throw UnsupportedMeasureError("no inverse transform for this measure");
    }
    // Rounding at the far end of a wide interval could land on b itself.
    x[static_cast<Eigen::Index>(i)] =
        std::clamp(xi, std::nextafter(domain.a(), domain.b()),
                   std::nextafter(domain.b(), domain.a()));
  }
  return {domain, std::move(x)};
}

namespace {

Eigen::VectorXd raw_samples(const FunctionSource &f, const SamplePlan &plan) {
  const auto &x = plan.abscissae();
  Eigen::VectorXd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    try {
      y[i] = f.evaluate_unchecked(x[i]);
    } catch (const NonFiniteError &) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "non-finite sample at abscissa " << i << " (x = " << x[i] << ")";
      throw NonFiniteError(msg.str());
    }
  }
  return y;
}

} // namespace

Eigen::VectorXd embed_mc(const FunctionSource &f, const SamplePlan &plan, double p) {
  if (!(p > 0.0 && p <= 2.0))
    throw ConfigError("p must lie in (0, 2]");
  return plan.scale(p) * raw_samples(f, plan);
}

double estimate_embedding_variance(const FunctionSource &f,
                                   const FunctionSource &g,
                                   const SamplePlan &plan, double p) {
  const Eigen::ArrayXd w = (raw_samples(f, plan) - raw_samples(g, plan)).array().abs().pow(p);
  const double n = static_cast<double>(w.size());
  if (w.size() < 2)
    return 0.0;
  const double var = (w - w.mean()).square().sum() / (n - 1.0);
  const double v = plan.domain().volume();
  return v * v / n * var;
}

} // namespace flsh
