#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace flsh {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

constexpr bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

/// Unnormalized DCT-II, X_k = sum_j x_j cos(pi k (j + 1/2) / N), in O(N^2).
template <typename Derived>
Vector<typename Derived::Scalar> dct2_direct(const Eigen::MatrixBase<Derived> &x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  Vector<Scalar> out(n);
  const Scalar step = std::numbers::pi_v<Scalar> / static_cast<Scalar>(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Scalar acc = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      acc += x[j] * std::cos(step * static_cast<Scalar>(k) *
                             (static_cast<Scalar>(j) + Scalar(0.5)));
    out[k] = acc;
  }
  return out;
}

/// Same transform through one complex FFT of length N (Makhoul's even/odd
/// reordering), O(N log N).
template <typename Derived>
Vector<typename Derived::Scalar> dct2_fft(const Eigen::MatrixBase<Derived> &x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  std::vector<Scalar> v(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; 2 * j < n; ++j)
    v[static_cast<std::size_t>(j)] = x[2 * j];
  for (Eigen::Index j = 0; 2 * j + 1 < n; ++j)
    v[static_cast<std::size_t>(n - 1 - j)] = x[2 * j + 1];

  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> spectrum;
  fft.fwd(spectrum, v);

  Vector<Scalar> out(n);
  const Scalar step = std::numbers::pi_v<Scalar> / (Scalar(2) * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::complex<Scalar> twiddle = std::polar(Scalar(1), -step * k);
    out[k] = (twiddle * spectrum[static_cast<std::size_t>(k)]).real();
  }
  return out;
}

/// FFT path for powers of two, direct fallback otherwise.
template <typename Derived>
Vector<typename Derived::Scalar> dct2(const Eigen::MatrixBase<Derived> &x) {
  if (is_power_of_two(static_cast<std::size_t>(x.size())) && x.size() > 2)
    return dct2_fft(x);
  return dct2_direct(x);
}

} // namespace flsh
