#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "levy_lrm/errors.hpp"
#include "levy_lrm/levy_core.hpp"
#include "levy_lrm/merton.hpp"  // kExponentLimit

namespace levy_lrm {

/// Raw CGM density C (1{x<0} e^{Gx} + 1{x>0} e^{-Mx}) / |x|. Not necessarily
/// the Levy measure of a variance gamma process with the same parametrization.
struct CgmComponent {
  double C = 0.0;
  double G = 0.0;
  double M = 0.0;

  double density(double x) const {
    if (x < 0.0) return C * std::exp(G * x) / -x;
    if (x > 0.0) return C * std::exp(-M * x) / x;
    return HUGE_VAL;
  }
};

struct CgmComponentPair {
  std::array<CgmComponent, 2> components;

  double density(double x) const {
    return components[0].density(x) + components[1].density(x);
  }
};

/// nu^MMM = nu_{(1+h)C, G, M} + nu_{-hC, G+1, M-1}.
inline CgmComponentPair vg_mmm_measure(const VgParams& p, double h) {
  return {{CgmComponent{(1.0 + h) * p.C(), p.G(), p.M()},
           CgmComponent{-h * p.C(), p.G() + 1.0, p.M() - 1.0}}};
}

namespace detail {

inline std::complex<double> principal_log(std::complex<double> base, const char* what) {
  if (!(base.real() > 0.0)) {
    throw BranchCutError(std::string("complex log base left the right half-plane: ") + what);
  }
  return std::log(base);
}

// Drift multiplying i zeta in the VG characteristic exponent.
inline double vg_linear_drift(const VgParams& p, const MmmQuantities& q) {
  const double C = p.C(), G = p.G(), M = p.M(), h = q.h;
  return q.mu_star + (1.0 + h) * C * (M - G) / (G * M) -
         h * C * (M - G - 2.0) / ((G + 1.0) * (M - 1.0));
}

}  // namespace detail

/// int e^{i zeta x} (e^x - 1) nu_{C,G,M}(dx)
///   = C log((M - i zeta)/(M - 1 - i zeta) * (G + i zeta)/(G + 1 + i zeta)).
/// Evaluated as a sum of principal logs; on the contour Im zeta = -alpha with
/// alpha in (1, 2] and M > 4 every base has positive real part and the summed
/// argument stays inside (-pi, pi), so this is the principal value.
inline std::complex<double> vg_kernel(std::complex<double> zeta, double C, double G, double M) {
  using namespace std::complex_literals;
  const std::complex<double> iz = 1i * zeta;
  return C * (detail::principal_log(M - iz, "M - i zeta") -
              detail::principal_log(M - 1.0 - iz, "M - 1 - i zeta") +
              detail::principal_log(G + iz, "G + i zeta") -
              detail::principal_log(G + 1.0 + iz, "G + 1 + i zeta"));
}

/// Characteristic function of L_tau under the minimal martingale measure:
/// [(1 + i zeta/G)(1 - i zeta/M)]^{-(1+h) tau C}
/// [(1 + i zeta/(G+1))(1 - i zeta/(M-1))]^{h tau C} exp(tau i zeta drift).
inline std::complex<double> vg_char_fn(std::complex<double> zeta, double tau,
                                       const VgParams& p, const MmmQuantities& q) {
  using namespace std::complex_literals;
  const double C = p.C(), G = p.G(), M = p.M(), h = q.h;
  const std::complex<double> iz = 1i * zeta;
  const auto log_main = detail::principal_log(1.0 + iz / G, "1 + i zeta/G") +
                        detail::principal_log(1.0 - iz / M, "1 - i zeta/M");
  const auto log_tilted = detail::principal_log(1.0 + iz / (G + 1.0), "1 + i zeta/(G+1)") +
                          detail::principal_log(1.0 - iz / (M - 1.0), "1 - i zeta/(M-1)");
  const std::complex<double> exponent =
      tau * (-(1.0 + h) * C * log_main + h * C * log_tilted + iz * detail::vg_linear_drift(p, q));
  if (exponent.real() > kExponentLimit) {
    throw OverflowError("variance gamma characteristic exponent overflows");
  }
  return std::exp(exponent);
}

/// I2 = (1/pi) int K^{-i zeta+1} vg_kernel(zeta) psi_2(zeta) dv - constant * f(K),
/// with constant = vg_kernel(0) = C log(MG / ((M-1)(G+1))) = int (e^x - 1) nu.
struct VgI2Weights {
  double constant = 0.0;

  std::array<I2Term, 2> terms(double strike) const {
    return {{{1.0, strike, SampledKernel::vg_kernel}, {-constant, strike, SampledKernel::plain}}};
  }
};

inline VgI2Weights vg_i2_weights(const VgParams& p) {
  return {detail::cgm_exp_moment(p.C(), p.G(), p.M(), 1.0)};
}

/// Constant of the polynomial envelope |phi_tau(v - i alpha)| <= C2 |v|^{-2 C tau}.
inline double vg_c2(const VgParams& p, const MmmQuantities& q, double tau, double alpha) {
  const double C = p.C(), G = p.G(), M = p.M(), h = q.h;
  const double log_c2 = (1.0 + h) * tau * C * std::log(G * M) -
                        h * tau * C * std::log((G + 1.0) * (M - 1.0)) +
                        tau * alpha * detail::vg_linear_drift(p, q);
  return std::exp(log_c2);
}

/// Frequency a with a^{2 C tau + 1} >= C C2 K^{1-alpha} S^alpha / (pi eps (2 C tau + 1))
///   * [1/(G+alpha) + 1/(M-alpha-1) + |log(MG/((M-1)(G+1)))|].
inline double vg_trunc(double eps, double tau, double strike, double spot, double alpha,
                       double c2, const VgParams& p) {
  if (!(eps > 0.0)) throw DomainError("allowable error must be positive");
  if (!(tau >= kTauMin)) throw DomainError("time to maturity below the minimum of 1e-6");
  const double C = p.C(), G = p.G(), M = p.M();
  const double power = 2.0 * C * tau + 1.0;
  const double bracket = 1.0 / (G + alpha) + 1.0 / (M - alpha - 1.0) +
                         std::abs(detail::cgm_exp_moment(1.0, G, M, 1.0));
  const double rhs = C * c2 * std::pow(strike, 1.0 - alpha) * std::pow(spot, alpha) /
                     (std::numbers::pi * eps * power) * bracket;
  return std::pow(rhs, 1.0 / power);
}

}  // namespace levy_lrm
