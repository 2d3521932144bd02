#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace flsh {

struct Gaussian {
  double mean = 0.0;
  double stddev = 1.0;
};

/// Empirical distribution of a finite sample set (kept sorted ascending).
class Empirical {
public:
  explicit Empirical(std::vector<double> samples);

  std::span<const double> samples() const noexcept { return *samples_; }
  std::size_t size() const noexcept { return samples_->size(); }

private:
  std::shared_ptr<const std::vector<double>> samples_;
};

/// One-dimensional probability distribution exposing an inverse CDF.
class Distribution1D {
public:
  Distribution1D(Gaussian g);
  Distribution1D(Empirical e) : kind_(std::move(e)) {}

  static Distribution1D gaussian(double mean, double stddev) {
    return Distribution1D(Gaussian{mean, stddev});
  }
  static Distribution1D empirical(std::vector<double> samples) {
    return Distribution1D(Empirical(std::move(samples)));
  }

  bool is_gaussian() const noexcept {
    return std::holds_alternative<Gaussian>(kind_);
  }
  const Gaussian &as_gaussian() const;
  const Empirical &as_empirical() const;

private:
  std::variant<Gaussian, Empirical> kind_;
};

/// Symmetric clip applied before treating a quantile as a function on [0,1].
class QuantileClip {
public:
  static constexpr double kDefault = 1e-3;

  QuantileClip() = default;
  explicit QuantileClip(double delta);

  double delta() const noexcept { return delta_; }
  double lower() const noexcept { return delta_; }
  double upper() const noexcept { return 1.0 - delta_; }

private:
  double delta_ = kDefault;
};

} // namespace flsh
