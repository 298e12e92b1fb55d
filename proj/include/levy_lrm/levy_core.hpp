#pragma once

// Model-independent quantities of the minimal martingale measure (MMM) for
// exponential Levy models S = S0 exp(L), plus the parameter bundles for the
// two supported models.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "levy_lrm/errors.hpp"

namespace levy_lrm {

/// Smallest time to maturity accepted by any query; every truncation bound
/// diverges as T - t -> 0.
inline constexpr double kTauMin = 1e-6;

/// Merton jump-diffusion: diffusion sigma, compound Poisson jumps with
/// intensity gamma and N(m, delta^2) sizes. `mu` is the drift of L.
struct MertonParams {
  double mu = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
  double m = 0.0;
  double delta = 0.0;
};

struct CgmTriple {
  double C = 0.0;
  double G = 0.0;
  double M = 0.0;
};

/// (C, G, M) of the variance gamma Levy measure from the time-changed
/// Brownian motion parameters (kappa, m, delta).
inline CgmTriple vg_cgm_from_kmd(double kappa, double m, double delta) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("variance gamma: kappa must be positive");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("variance gamma: delta must be positive");
  }
  if (!std::isfinite(m)) throw DomainError("variance gamma: m must be finite");
  const double d2 = delta * delta;
  const double radical = std::sqrt(m * m + 2.0 * d2 / kappa) / d2;
  return {1.0 / kappa, radical + m / d2, radical - m / d2};
}

/// Variance gamma log-price L_t = m G_t + delta B_{G_t} with a gamma
/// subordinator of unit mean rate and variance rate kappa. There is no
/// diffusion component and no independent drift knob.
class VgParams {
 public:
  static VgParams from_kmd(double kappa, double m, double delta) {
    return VgParams(kappa, m, delta, vg_cgm_from_kmd(kappa, m, delta));
  }

  /// Inverse map: kappa = 1/C, delta^2 = 2C/(GM), m = (G - M) delta^2 / 2.
  static VgParams from_cgm(double C, double G, double M) {
    if (!(C > 0.0) || !(G > 0.0) || !(M > 0.0) || !std::isfinite(C) ||
        !std::isfinite(G) || !std::isfinite(M)) {
      throw DomainError("variance gamma: C, G, M must be positive and finite");
    }
    const double d2 = 2.0 * C / (G * M);
    return VgParams(1.0 / C, 0.5 * (G - M) * d2, std::sqrt(d2), {C, G, M});
  }

  double kappa() const { return kappa_; }
  double m() const { return m_; }
  double delta() const { return delta_; }
  double C() const { return cgm_.C; }
  double G() const { return cgm_.G; }
  double M() const { return cgm_.M; }
  const CgmTriple& cgm() const { return cgm_; }

 private:
  VgParams(double kappa, double m, double delta, CgmTriple cgm)
      : kappa_(kappa), m_(m), delta_(delta), cgm_(cgm) {}

  double kappa_;
  double m_;
  double delta_;
  CgmTriple cgm_;
};

inline double sigma_of(const MertonParams& p) { return p.sigma; }
inline double sigma_of(const VgParams&) { return 0.0; }

/// MMM quantities. xi = h sigma and theta_x = h (e^x - 1) are carried
/// implicitly through h.
struct MmmQuantities {
  double mu_s = 0.0;             ///< drift of dS/S_-
  double quad_exp_moment = 0.0;  ///< int (e^x - 1)^2 nu(dx)
  double h = 0.0;                ///< mu_s / (sigma^2 + quad_exp_moment)
  double mu_star = 0.0;          ///< drift of L under the MMM

  double xi(double sigma) const { return h * sigma; }
  double theta(double x) const { return h * std::expm1(x); }
};

/// Evaluation time t, maturity T, spot S_{t-} and strike K.
struct MarketQuery {
  double t = 0.0;
  double T = 1.0;
  double spot = 1.0;
  double strike = 1.0;

  double tau() const { return T - t; }

  void validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("maturity T must be positive");
    if (!(t >= 0.0) || !(t < T)) throw DomainError("evaluation time must lie in [0, T)");
    if (!(tau() >= kTauMin)) {
      throw DomainError("time to maturity below the minimum of 1e-6");
    }
    if (!(spot > 0.0) || !std::isfinite(spot)) throw DomainError("spot must be positive");
    if (!(strike > 0.0) || !std::isfinite(strike)) throw DomainError("strike must be positive");
  }
};

namespace detail {

inline void require_basic(const MertonParams& p) {
  const bool finite = std::isfinite(p.mu) && std::isfinite(p.sigma) &&
                      std::isfinite(p.gamma) && std::isfinite(p.m) &&
                      std::isfinite(p.delta);
  if (!finite) throw InvalidParameter("Merton: parameters must be finite");
  if (!(p.sigma > 0.0)) throw InvalidParameter("Merton: sigma must be positive");
  if (!(p.delta > 0.0)) throw InvalidParameter("Merton: delta must be positive");
  if (!(p.gamma >= 0.0)) throw InvalidParameter("Merton: gamma must be nonnegative");
}

// int (e^{a x} - 1) nu_{C,G,M}(dx) = C log(GM / ((G+a)(M-a))), for -G < a < M.
inline double cgm_exp_moment(double C, double G, double M, double a) {
  return -C * (std::log1p(a / G) + std::log1p(-a / M));
}

// int x nu_{C,G,M}(dx)
inline double cgm_first_moment(double C, double G, double M) {
  return -C * (M - G) / (G * M);
}

}  // namespace detail

/// mu^S = mu + sigma^2/2 + int (e^x - 1 - x) nu(dx).
inline double martingale_drift(const MertonParams& p) {
  detail::require_basic(p);
  return p.mu + 0.5 * p.sigma * p.sigma +
         p.gamma * (std::expm1(p.m + 0.5 * p.delta * p.delta) - p.m);
}

/// For VG the drift of L equals int x nu, so mu^S = int (e^x - 1) nu.
inline double martingale_drift(const VgParams& p) {
  return detail::cgm_exp_moment(p.C(), p.G(), p.M(), 1.0);
}

/// int (e^x - 1)^2 nu(dx).
inline double quadratic_exp_moment(const MertonParams& p) {
  detail::require_basic(p);
  const double d2 = p.delta * p.delta;
  return p.gamma * (std::exp(2.0 * p.m + 2.0 * d2) - 2.0 * std::exp(p.m + 0.5 * d2) + 1.0);
}

inline double quadratic_exp_moment(const VgParams& p) {
  if (!(p.M() > 2.0)) {
    throw InvalidParameter("variance gamma: int (e^x-1)^2 nu is infinite for M <= 2");
  }
  // (e^x-1)^2 = (e^{2x}-1) - 2(e^x-1)
  return detail::cgm_exp_moment(p.C(), p.G(), p.M(), 2.0) -
         2.0 * detail::cgm_exp_moment(p.C(), p.G(), p.M(), 1.0);
}

struct ValidationEntry {
  std::string condition;
  bool passed = false;
  double slack = 0.0;  ///< signed margin; negative (or zero for strict) means violated
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;

  bool ok() const {
    for (const auto& e : entries) {
      if (!e.passed) return false;
    }
    return true;
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& e : entries) {
      if (!e.passed) out.push_back(e.condition);
    }
    return out;
  }
};

/// Checks integrability and 0 >= mu^S > -(sigma^2 + int (e^x-1)^2 nu).
/// Never throws.
inline ValidationReport validate_assumptions(const MertonParams& p) {
  ValidationReport r;
  const auto add = [&](std::string name, bool ok, double slack) {
    r.entries.push_back({std::move(name), ok, slack});
  };
  const bool finite = std::isfinite(p.mu) && std::isfinite(p.sigma) &&
                      std::isfinite(p.gamma) && std::isfinite(p.m) &&
                      std::isfinite(p.delta);
  add("parameters finite", finite, finite ? 0.0 : -1.0);
  add("sigma > 0", p.sigma > 0.0, p.sigma);
  add("delta > 0", p.delta > 0.0, p.delta);
  add("gamma >= 0", p.gamma >= 0.0, p.gamma);
  if (!r.ok()) return r;

  // Gaussian jump sizes have all exponential moments.
  add("moment finiteness", true, std::numeric_limits<double>::infinity());
  const double mu_s = martingale_drift(p);
  const double denom = p.sigma * p.sigma + quadratic_exp_moment(p);
  add("0 >= mu_S", mu_s <= 0.0, -mu_s);
  add("mu_S > -(sigma^2 + int (e^x-1)^2 nu)", mu_s + denom > 0.0, mu_s + denom);
  return r;
}

/// VG form of the same conditions: M > 4 and -3 < G - M <= -1.
inline ValidationReport validate_assumptions(const VgParams& p) {
  ValidationReport r;
  const double gm = p.G() - p.M();
  r.entries.push_back({"M > 4", p.M() > 4.0, p.M() - 4.0});
  r.entries.push_back({"G - M <= -1", gm <= -1.0, -1.0 - gm});
  r.entries.push_back({"G - M > -3", gm > -3.0, gm + 3.0});
  return r;
}

namespace detail {

template <class Model>
void require_valid(const Model& p) {
  const auto report = validate_assumptions(p);
  if (!report.ok()) {
    std::ostringstream os;
    os << "model violates:";
    for (const auto& f : report.failures()) os << " [" << f << "]";
    throw AssumptionViolation(os.str());
  }
}

}  // namespace detail

/// h, mu^S, int (e^x-1)^2 nu and the MMM drift mu* for a Merton model.
/// Under the MMM the jump measure is (1+h) nu + (-h) e^x nu, a two-component
/// Gaussian mixture, so mu* = -sigma^2/2 + sum_i lambda_i (a_i + 1 - e^{a_i + delta^2/2}).
inline MmmQuantities mmm_quantities(const MertonParams& p) {
  detail::require_valid(p);
  MmmQuantities q;
  q.mu_s = martingale_drift(p);
  q.quad_exp_moment = quadratic_exp_moment(p);
  q.h = q.mu_s / (p.sigma * p.sigma + q.quad_exp_moment);

  const double d2 = p.delta * p.delta;
  const double lambda1 = (1.0 + q.h) * p.gamma;
  const double mean1 = p.m;
  const double lambda2 = -q.h * p.gamma * std::exp(p.m + 0.5 * d2);
  const double mean2 = p.m + d2;
  q.mu_star = -0.5 * p.sigma * p.sigma +
              lambda1 * (mean1 - std::expm1(mean1 + 0.5 * d2)) +
              lambda2 * (mean2 - std::expm1(mean2 + 0.5 * d2));
  return q;
}

/// VG version; the MMM measure is nu_{(1+h)C,G,M} + nu_{-hC,G+1,M-1} and
/// mu* = int (x - e^x + 1) nu^MMM(dx), assembled per component.
inline MmmQuantities mmm_quantities(const VgParams& p) {
  detail::require_valid(p);
  MmmQuantities q;
  q.mu_s = martingale_drift(p);
  q.quad_exp_moment = quadratic_exp_moment(p);
  q.h = q.mu_s / q.quad_exp_moment;

  const double C = p.C(), G = p.G(), M = p.M();
  const double c1 = (1.0 + q.h) * C;
  const double c2 = -q.h * C;
  q.mu_star = detail::cgm_first_moment(c1, G, M) - detail::cgm_exp_moment(c1, G, M, 1.0) +
              detail::cgm_first_moment(c2, G + 1.0, M - 1.0) -
              detail::cgm_exp_moment(c2, G + 1.0, M - 1.0, 1.0);
  return q;
}

/// Which sampled array a Fourier term is evaluated on: psi_2 itself, psi_2
/// damped by exp(-delta^2 zeta^2 / 2) (Merton), or psi_2 times the VG
/// exponential-moment kernel.
enum class SampledKernel { plain, gaussian_damped, vg_kernel };

/// One term coefficient * F_kernel(strike) of an I2 decomposition, where
/// F(K) = (1/pi) int_0^inf K^{-i zeta + 1} psi(zeta) dv.
struct I2Term {
  double coefficient = 0.0;
  double strike = 0.0;
  SampledKernel kernel = SampledKernel::plain;
};

}  // namespace levy_lrm
