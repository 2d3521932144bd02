#pragma once

#include <numbers>
#include <string_view>

namespace flsh {

enum class Measure {
  Lebesgue,
  /// dx / sqrt((x - a)(b - x)); the pull-back of d(theta) under
  /// x = (a+b)/2 + (b-a)/2 cos(theta). Total mass pi on any interval.
  ChebyshevWeight,
};

std::string_view to_string(Measure m) noexcept;
Measure parse_measure(std::string_view s);

/// Closed interval [a, b] with a measure.
class IntervalDomain {
public:
  IntervalDomain() : IntervalDomain(0.0, 1.0) {}
  IntervalDomain(double a, double b, Measure measure = Measure::Lebesgue);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  Measure measure() const noexcept { return measure_; }
  double midpoint() const noexcept { return 0.5 * (a_ + b_); }
  double half_width() const noexcept { return 0.5 * (b_ - a_); }

  /// Total mass of the measure.
  double volume() const noexcept {
    return measure_ == Measure::Lebesgue ? b_ - a_ : std::numbers::pi;
  }

  bool contains(double x) const noexcept { return x >= a_ && x <= b_; }

  friend bool operator==(const IntervalDomain &,
                         const IntervalDomain &) = default;

private:
  double a_;
  double b_;
  Measure measure_;
};

} // namespace flsh
