#pragma once

// Carr-Madan numerical layer: radix-2 FFT, Simpson-weighted damped Fourier
// sums on a log-strike grid, and the direct O(N) sum for a single strike.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "levy_lrm/errors.hpp"

namespace levy_lrm::fft {

using cplx = std::complex<double>;

inline constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// F(l) = sum_j exp(-i 2 pi j l / N) x_j; no normalization. Iterative
/// Cooley-Tukey with exact (non-recurrent) twiddles.
inline std::vector<cplx> radix2_fft(std::span<const cplx> x) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n)) throw SizeError("FFT length must be a power of two");
  std::vector<cplx> a(x.begin(), x.end());
  if (n == 1) return a;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  std::vector<cplx> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = {std::cos(angle), std::sin(angle)};
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx u = a[start + k];
        const cplx v = a[start + k + half] * twiddle[k * stride];
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
  return a;
}

enum class QuadratureRule { simpson, trapezoid };

/// w_j = (eta/3)(3 + (-1)^{j+1} - delta_{j0}).
inline std::vector<double> simpson_weights(std::size_t n, double eta) {
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double sign = (j % 2 == 0) ? -1.0 : 1.0;
    w[j] = eta / 3.0 * (3.0 + sign - (j == 0 ? 1.0 : 0.0));
  }
  return w;
}

/// eta everywhere except eta/2 at the origin.
inline std::vector<double> trapezoid_weights(std::size_t n, double eta) {
  std::vector<double> w(n, eta);
  if (n > 0) w[0] = 0.5 * eta;
  return w;
}

inline std::vector<double> quadrature_weights(QuadratureRule rule, std::size_t n, double eta) {
  return rule == QuadratureRule::simpson ? simpson_weights(n, eta) : trapezoid_weights(n, eta);
}

/// Carr-Madan grid: N frequencies v_j = eta j on the contour v - i alpha.
struct FftConfig {
  std::size_t n = std::size_t{1} << 14;
  double eta = 0.025;
  double alpha = 1.75;
  double eps = 1e-2;  ///< allowable absolute tail error
  QuadratureRule rule = QuadratureRule::simpson;

  double grid_length() const { return static_cast<double>(n) * eta; }
  double max_log_strike() const { return std::numbers::pi / eta; }
  double log_strike_spacing() const { return 2.0 * std::numbers::pi / grid_length(); }

  void validate() const {
    if (!is_power_of_two(n) || n < 2) throw SizeError("fft.n must be a power of two >= 2");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("fft.eta must be positive");
    if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("fft.alpha must lie in (1, 2]");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("fft.eps must be positive");
  }
};

struct DampedTransformRequest {
  std::vector<cplx> psi_samples;  ///< psi(eta j - i alpha), j = 0..N-1
  double alpha = 1.75;
  double eta = 0.025;
  std::vector<double> k_targets;
  QuadratureRule rule = QuadratureRule::simpson;

  void validate() const {
    if (!is_power_of_two(psi_samples.size())) {
      throw SizeError("psi sample count must be a power of two");
    }
    if (!(eta > 0.0)) throw DomainError("eta must be positive");
    for (const auto& s : psi_samples) {
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
        throw DomainError("psi samples must be finite");
      }
    }
    const double k_max = std::numbers::pi / eta;
    for (double k : k_targets) {
      if (!(std::abs(k) < k_max)) throw DomainError("log-strike outside (-pi/eta, pi/eta)");
    }
  }
};

/// Linear interpolation on a uniform grid, clamped to the end cells.
inline double interpolate_uniform(std::span<const double> values, double x0, double dx, double x) {
  const double pos = (x - x0) / dx;
  const auto last = static_cast<double>(values.size() - 1);
  if (pos <= 0.0) return values.front();
  if (pos >= last) return values.back();
  const auto l = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(l);
  if (frac == 0.0) return values[l];
  return values[l] + frac * (values[l + 1] - values[l]);
}

/// Damped transform T(k_l) on k_l = -pi/eta + l 2 pi/(N eta).
struct CarrMadanGrid {
  double k_min = 0.0;
  double dk = 0.0;
  std::vector<cplx> values;
  std::vector<cplx> target_values;  ///< linear interpolation at the request's k_targets

  double log_strike(std::size_t l) const { return k_min + dk * static_cast<double>(l); }

  cplx interpolate(double k) const {
    const double pos = (k - k_min) / dk;
    const auto last = static_cast<double>(values.size() - 1);
    if (pos <= 0.0) return values.front();
    if (pos >= last) return values.back();
    const auto l = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(l);
    if (frac == 0.0) return values[l];
    return values[l] + frac * (values[l + 1] - values[l]);
  }
};

/// T(k) = (e^{-alpha k}/pi) sum_j e^{-i eta j k} psi_j w_j for every grid k_l,
/// via one FFT of x_j = e^{i pi j} psi_j w_j.
inline CarrMadanGrid carr_madan_grid(const DampedTransformRequest& request) {
  request.validate();
  const std::size_t n = request.psi_samples.size();
  const auto w = quadrature_weights(request.rule, n, request.eta);
  std::vector<cplx> x(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    x[j] = sign * w[j] * request.psi_samples[j];
  }
  const auto spectrum = radix2_fft(x);

  CarrMadanGrid grid;
  grid.dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * request.eta);
  grid.k_min = -std::numbers::pi / request.eta;
  grid.values.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    const double k = grid.log_strike(l);
    grid.values[l] = std::exp(-request.alpha * k) / std::numbers::pi * spectrum[l];
  }
  grid.target_values.reserve(request.k_targets.size());
  for (double k : request.k_targets) grid.target_values.push_back(grid.interpolate(k));
  return grid;
}

namespace detail {

// (e^{-alpha k}/pi) sum_j e^{-i eta j k} weighted_j
inline cplx damped_sum(std::span<const cplx> weighted, double alpha, double eta, double k) {
  cplx acc{0.0, 0.0};
  for (std::size_t j = 0; j < weighted.size(); ++j) {
    const double phase = -eta * static_cast<double>(j) * k;
    acc += cplx{std::cos(phase), std::sin(phase)} * weighted[j];
  }
  return std::exp(-alpha * k) / std::numbers::pi * acc;
}

}  // namespace detail

/// Same finite sum as the grid, evaluated at exactly `k`.
inline cplx direct_simpson_sum(std::span<const cplx> psi_samples, double alpha, double eta,
                               double k, QuadratureRule rule = QuadratureRule::simpson) {
  if (!(std::abs(k) < std::numbers::pi / eta)) {
    throw DomainError("log-strike outside (-pi/eta, pi/eta)");
  }
  const auto w = quadrature_weights(rule, psi_samples.size(), eta);
  std::vector<cplx> weighted(psi_samples.size());
  for (std::size_t j = 0; j < psi_samples.size(); ++j) weighted[j] = psi_samples[j] * w[j];
  return detail::damped_sum(weighted, alpha, eta, k);
}

/// True iff the integration interval [0, N eta] reaches the truncation point.
inline bool tail_condition_check(const FftConfig& config, double trunc_a) {
  return config.grid_length() >= trunc_a;
}

}  // namespace levy_lrm::fft
