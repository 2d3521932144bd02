#pragma once

#include <flsh/distribution.hpp>
#include <flsh/domain.hpp>

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace flsh {

/// amplitude * sin(2 pi frequency x + phase)
struct ParametricSine {
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
};

/// Piecewise-linear interpolant through (abscissae, ordinates).
struct TabulatedSamples {
  std::shared_ptr<const std::vector<double>> abscissae;
  std::shared_ptr<const std::vector<double>> ordinates;
};

/// Inverse CDF of a distribution restricted to [clip, 1 - clip].
struct Quantile {
  Distribution1D distribution;
  QuantileClip clip;
};

struct Composite {
  std::function<double(double)> fn;
};

using Evaluator = std::variant<ParametricSine, TabulatedSamples, Quantile, Composite>;

/**
 * A real function on an interval domain. Immutable once built, so copies can
 * be evaluated from any thread.
 */
class FunctionSource {
public:
  static FunctionSource sine(double amplitude, double frequency, double phase,
                             IntervalDomain domain = {});
  static FunctionSource tabulated(std::vector<double> abscissae,
                                  std::vector<double> ordinates,
                                  Measure measure = Measure::Lebesgue);
  static FunctionSource quantile(Distribution1D dist, QuantileClip clip = {});
  static FunctionSource composite(IntervalDomain domain,
                                  std::function<double(double)> fn);

  const IntervalDomain &domain() const noexcept { return domain_; }
  const Evaluator &evaluator() const noexcept { return eval_; }

  /// Checked evaluation; see flsh::evaluate.
  double operator()(double x) const;

  /// Evaluation without the domain check, used by embeddings whose sample
  /// sites are constructed inside the domain. Still rejects non-finite values.
  double evaluate_unchecked(double x) const;

  /// Short text form matching the dataset row format where one exists.
  std::string describe() const;

private:
  FunctionSource(IntervalDomain domain, Evaluator eval)
      : domain_(domain), eval_(std::move(eval)) {}

  IntervalDomain domain_;
  Evaluator eval_;
};

/// f(x). Throws DomainError outside the closed domain and NonFiniteError if
/// the evaluator produces NaN or infinity.
double evaluate(const FunctionSource &f, double x);

} // namespace flsh
