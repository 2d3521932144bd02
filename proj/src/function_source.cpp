#include <flsh/error.hpp>
#include <flsh/function_source.hpp>
#include <flsh/wasserstein.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace flsh {

std::string_view to_string(Measure m) noexcept {
  return m == Measure::Lebesgue ? "lebesgue" : "chebyshev";
}

Measure parse_measure(std::string_view s) {
  if (s == "lebesgue")
    return Measure::Lebesgue;
  if (s == "chebyshev")
    return Measure::ChebyshevWeight;
  throw ConfigError("unknown measure '" + std::string(s) + "'");
}

IntervalDomain::IntervalDomain(double a, double b, Measure measure)
    : a_(a), b_(b), measure_(measure) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
    throw DomainError("interval domain needs finite a < b");
}

Empirical::Empirical(std::vector<double> samples) {
  if (samples.empty())
    throw ConfigError("empirical distribution needs at least one sample");
  if (!std::all_of(samples.begin(), samples.end(),
                   [](double v) { return std::isfinite(v); }))
    throw NonFiniteError("empirical samples must be finite");
  std::sort(samples.begin(), samples.end());
  samples_ = std::make_shared<const std::vector<double>>(std::move(samples));
}

Distribution1D::Distribution1D(Gaussian g) : kind_(g) {
  if (!std::isfinite(g.mean) || !std::isfinite(g.stddev) || !(g.stddev > 0.0))
    throw ConfigError("gaussian needs finite mean and stddev > 0");
}

const Gaussian &Distribution1D::as_gaussian() const {
  if (const auto *g = std::get_if<Gaussian>(&kind_))
    return *g;
  throw KindError("distribution is not gaussian");
}

const Empirical &Distribution1D::as_empirical() const {
  if (const auto *e = std::get_if<Empirical>(&kind_))
    return *e;
  throw KindError("distribution is not empirical");
}

QuantileClip::QuantileClip(double delta) : delta_(delta) {
  if (!(delta > 0.0 && delta < 0.5))
    throw ConfigError("quantile clip must lie in (0, 0.5)");
}

FunctionSource FunctionSource::sine(double amplitude, double frequency,
                                    double phase, IntervalDomain domain) {
  if (!std::isfinite(amplitude) || !std::isfinite(frequency) ||
      !std::isfinite(phase))
    throw NonFiniteError("sine parameters must be finite");
  return {domain, ParametricSine{amplitude, frequency, phase}};
}

FunctionSource FunctionSource::tabulated(std::vector<double> abscissae,
                                         std::vector<double> ordinates,
                                         Measure measure) {
  if (abscissae.size() != ordinates.size() || abscissae.size() < 2)
    throw ConfigError("table needs at least two (x, y) pairs");
  for (std::size_t i = 0; i < abscissae.size(); ++i) {
    if (!std::isfinite(abscissae[i]) || !std::isfinite(ordinates[i]))
      throw NonFiniteError("table entries must be finite");
    if (i > 0 && !(abscissae[i] > abscissae[i - 1]))
      throw ConfigError("table abscissae must be strictly increasing");
  }
  IntervalDomain domain(abscissae.front(), abscissae.back(), measure);
  return {domain,
          TabulatedSamples{
              std::make_shared<const std::vector<double>>(std::move(abscissae)),
              std::make_shared<const std::vector<double>>(std::move(ordinates))}};
}

FunctionSource FunctionSource::quantile(Distribution1D dist, QuantileClip clip) {
  IntervalDomain domain(clip.lower(), clip.upper());
  return {domain, Quantile{std::move(dist), clip}};
}

FunctionSource FunctionSource::composite(IntervalDomain domain,
                                         std::function<double(double)> fn) {
  if (!fn)
    throw ConfigError("composite source needs a callable");
  return {domain, Composite{std::move(fn)}};
}

namespace {

struct RawEvaluator {
  double x;

  double operator()(const ParametricSine &s) const {
    return s.amplitude *
           std::sin(2.0 * std::numbers::pi * s.frequency * x + s.phase);
  }

  double operator()(const TabulatedSamples &t) const {
    const auto &xs = *t.abscissae;
    const auto &ys = *t.ordinates;
    auto hi = std::upper_bound(xs.begin(), xs.end(), x);
    if (hi == xs.begin())
      return ys.front();
    if (hi == xs.end())
      return ys.back();
    const auto i = static_cast<std::size_t>(hi - xs.begin());
    const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
  }

  double operator()(const Quantile &q) const {
    return flsh::quantile(q.distribution, x);
  }

  double operator()(const Composite &c) const { return c.fn(x); }
};

} // namespace

double FunctionSource::evaluate_unchecked(double x) const {
  const double y = std::visit(RawEvaluator{x}, eval_);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "non-finite value at x = " << x;
    throw NonFiniteError(msg.str());
  }
  return y;
}

double FunctionSource::operator()(double x) const {
  if (!domain_.contains(x)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "x = " << x << " outside [" << domain_.a() << ", " << domain_.b()
        << "]";
    throw DomainError(msg.str());
  }
  return evaluate_unchecked(x);
}

double evaluate(const FunctionSource &f, double x) { return f(x); }

std::string FunctionSource::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (const auto *s = std::get_if<ParametricSine>(&eval_)) {
    out << "sine," << s->amplitude << ',' << s->frequency << ',' << s->phase;
  } else if (const auto *q = std::get_if<Quantile>(&eval_)) {
    if (q->distribution.is_gaussian()) {
      const auto &g = q->distribution.as_gaussian();
      out << "gaussian," << g.mean << ',' << g.stddev;
    } else {
      out << "empirical," << q->distribution.as_empirical().size();
    }
  } else if (const auto *t = std::get_if<TabulatedSamples>(&eval_)) {
    out << "table," << t->abscissae->size();
  } else {
    out << "composite";
  }
  return out.str();
}

} // namespace flsh
