#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "levy_lrm/errors.hpp"
#include "levy_lrm/levy_core.hpp"

namespace levy_lrm {

/// Real part above which exp() of a characteristic exponent is refused.
inline constexpr double kExponentLimit = 700.0;

struct GaussianJump {
  double intensity = 0.0;
  double mean = 0.0;
  double variance = 0.0;

  double density(double x) const {
    const double z = x - mean;
    return intensity * std::exp(-0.5 * z * z / variance) /
           std::sqrt(2.0 * std::numbers::pi * variance);
  }
};

/// Finite Levy measure given as a sum of Gaussian-shaped intensities.
struct GaussianJumpMixture {
  std::array<GaussianJump, 2> components;

  double total_intensity() const {
    return components[0].intensity + components[1].intensity;
  }
  double density(double x) const {
    return components[0].density(x) + components[1].density(x);
  }
};

/// Jump measure under the minimal martingale measure:
/// (1+h) nu[gamma, m, delta^2] + nu[-h gamma e^{m + delta^2/2}, m + delta^2, delta^2].
inline GaussianJumpMixture merton_mmm_measure(const MertonParams& p, double h) {
  const double d2 = p.delta * p.delta;
  return {{GaussianJump{(1.0 + h) * p.gamma, p.m, d2},
           GaussianJump{-h * p.gamma * std::exp(p.m + 0.5 * d2), p.m + d2, d2}}};
}

/// phi_tau(zeta) = E~[exp(i zeta L_tau)] under the minimal martingale measure.
/// Accepts any zeta whose imaginary part lies in [-2, 0].
inline std::complex<double> merton_char_fn(std::complex<double> zeta, double tau,
                                           const MertonParams& p, const MmmQuantities& q) {
  using namespace std::complex_literals;
  const auto mix = merton_mmm_measure(p, q.h);
  const std::complex<double> iz = 1i * zeta;
  const std::complex<double> z2 = zeta * zeta;
  std::complex<double> exponent = iz * q.mu_star - 0.5 * p.sigma * p.sigma * z2;
  for (const auto& c : mix.components) {
    exponent += c.intensity * (std::exp(iz * c.mean - 0.5 * c.variance * z2) - 1.0 - iz * c.mean);
  }
  exponent *= tau;
  if (exponent.real() > kExponentLimit) {
    throw OverflowError("Merton characteristic exponent overflows");
  }
  return std::exp(exponent);
}

/// Constant C1 of the Gaussian envelope |phi_tau(v - i alpha)| <= C1 e^{-sigma^2 v^2 tau / 2}.
/// Equals phi_tau(-i alpha) = E~[e^{alpha L_tau}].
inline double merton_c1(const MertonParams& p, const MmmQuantities& q, double tau,
                        double alpha) {
  const auto mix = merton_mmm_measure(p, q.h);
  double exponent = alpha * q.mu_star + 0.5 * p.sigma * p.sigma * alpha * alpha;
  for (const auto& c : mix.components) {
    exponent += c.intensity *
                (std::expm1(c.mean * alpha + 0.5 * alpha * alpha * c.variance) - alpha * c.mean);
  }
  return std::exp(tau * exponent);
}

namespace detail {

inline void require_trunc_args(double eps, double tau) {
  if (!(eps > 0.0)) throw DomainError("allowable error must be positive");
  if (!(tau >= kTauMin)) throw DomainError("time to maturity below the minimum of 1e-6");
}

}  // namespace detail

/// Frequency beyond which the I1 integrand's tail is at most eps:
/// a = (K/pi (K/S)^{-alpha} C1)^{1/4} / (sigma sqrt(tau) eps^{1/4}).
inline double merton_trunc_i1(double eps, double tau, double strike, double spot,
                              double alpha, double c1, const MertonParams& p) {
  detail::require_trunc_args(eps, tau);
  const double lead = strike / std::numbers::pi * std::pow(strike / spot, -alpha) * c1;
  return std::pow(lead, 0.25) / (p.sigma * std::sqrt(tau) * std::pow(eps, 0.25));
}

/// Same for the I2 integrand; fifth-root law.
inline double merton_trunc_i2(double eps, double tau, double strike, double spot,
                              double alpha, double c1, const MertonParams& p) {
  detail::require_trunc_args(eps, tau);
  const double m = p.m;
  const double d2 = p.delta * p.delta;
  const double s4 = std::pow(p.sigma, 4);
  const double bracket =
      std::exp((alpha + 1.0) * m + (0.5 * alpha * alpha + alpha + 0.5) * d2) +
      std::exp(m * alpha + 0.5 * d2 * alpha * alpha) + std::abs(std::expm1(m + 0.5 * d2));
  const double rhs = 4.0 * c1 * p.gamma * strike /
                     (5.0 * std::numbers::pi * s4 * tau * tau * eps) *
                     std::pow(strike / spot, -alpha) * bracket;
  return std::pow(rhs, 0.2);
}

using MertonI2Decomposition = std::array<I2Term, 3>;

/// I2 = gamma e^{2m + 3 delta^2/2} f~(K e^{-m-delta^2}) - gamma e^m f~(K e^{-m})
///      + gamma (1 - e^{m + delta^2/2}) f(K).
inline MertonI2Decomposition merton_i2_terms(const MertonParams& p, double strike) {
  const double m = p.m;
  const double d2 = p.delta * p.delta;
  return {{
      {p.gamma * std::exp(2.0 * m + 1.5 * d2), strike * std::exp(-m - d2),
       SampledKernel::gaussian_damped},
      {-p.gamma * std::exp(m), strike * std::exp(-m), SampledKernel::gaussian_damped},
      {-p.gamma * std::expm1(m + 0.5 * d2), strike, SampledKernel::plain},
  }};
}

}  // namespace levy_lrm
