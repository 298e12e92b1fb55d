#pragma once

// LRM hedge ratio (sigma^2 I1 + I2) / (S (sigma^2 + int (e^x-1)^2 nu)) for a
// European call, with I1 and I2 evaluated through damped Fourier transforms
// of the characteristic function under the minimal martingale measure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "levy_lrm/errors.hpp"
#include "levy_lrm/fft.hpp"
#include "levy_lrm/levy_core.hpp"
#include "levy_lrm/merton.hpp"
#include "levy_lrm/variance_gamma.hpp"

namespace levy_lrm {

using fft::FftConfig;
using cplx = std::complex<double>;

enum class EvalMode { fft_grid, direct_sum };

inline const char* to_string(EvalMode mode) {
  return mode == EvalMode::fft_grid ? "fft-grid" : "direct-sum";
}

struct EvalOptions {
  EvalMode mode = EvalMode::direct_sum;
  bool enforce_tail = true;  ///< throw TailConditionError when N eta < truncation bound
};

inline const char* model_name(const MertonParams&) { return "merton"; }
inline const char* model_name(const VgParams&) { return "vg"; }

struct LrmResult {
  double lrm = 0.0;
  std::optional<double> i1;  ///< absent for variance gamma
  double i2 = 0.0;
  double trunc_a = 0.0;
  bool tail_ok = true;
  EvalMode mode = EvalMode::direct_sum;
  FftConfig config;
  bool out_of_unit_range = false;  ///< lrm outside [0, 1]; never clamped
};

/// K / S_{t-} together with time to maturity.
struct MoneynessQuery {
  double moneyness = 1.0;
  double tau = 0.5;

  void validate() const {
    if (!(moneyness > 0.0) || !std::isfinite(moneyness)) {
      throw DomainError("moneyness must be positive");
    }
    if (!(tau >= kTauMin)) throw DomainError("time to maturity below the minimum of 1e-6");
  }
};

/// Samples psi(eta j - i alpha), j < N, evaluated at a strike K as
/// K Re T(log K) with T(k) = (e^{-alpha k}/pi) sum_j e^{-i eta j k} psi_j w_j.
class DampedTransform {
 public:
  DampedTransform() = default;

  DampedTransform(std::vector<cplx> psi, const FftConfig& cfg, EvalMode mode)
      : alpha_(cfg.alpha), eta_(cfg.eta), mode_(mode) {
    if (mode == EvalMode::direct_sum) {
      const auto w = fft::quadrature_weights(cfg.rule, psi.size(), cfg.eta);
      for (std::size_t j = 0; j < psi.size(); ++j) {
        if (!std::isfinite(psi[j].real()) || !std::isfinite(psi[j].imag())) {
          throw DomainError("psi samples must be finite");
        }
        psi[j] *= w[j];
      }
      weighted_ = std::move(psi);
      return;
    }
    fft::DampedTransformRequest req{std::move(psi), cfg.alpha, cfg.eta, {}, cfg.rule};
    const auto grid = fft::carr_madan_grid(req);
    k_min_ = grid.k_min;
    dk_ = grid.dk;
    prices_.resize(grid.values.size());
    for (std::size_t l = 0; l < prices_.size(); ++l) {
      prices_[l] = std::exp(grid.log_strike(l)) * grid.values[l].real();
    }
  }

  double at_strike(double strike) const {
    const double k = std::log(strike);
    if (!(std::abs(k) < std::numbers::pi / eta_)) {
      throw DomainError("log-strike outside (-pi/eta, pi/eta)");
    }
    if (mode_ == EvalMode::direct_sum) {
      return strike * fft::detail::damped_sum(weighted_, alpha_, eta_, k).real();
    }
    return fft::interpolate_uniform(prices_, k_min_, dk_, k);
  }

 private:
  double alpha_ = 0.0;
  double eta_ = 0.0;
  EvalMode mode_ = EvalMode::direct_sum;
  std::vector<cplx> weighted_;
  double k_min_ = 0.0;
  double dk_ = 0.0;
  std::vector<double> prices_;
};

/// Sufficient truncation frequency for allowable error cfg.eps: the larger of
/// the I1 and I2 thresholds for Merton, the single I2 threshold for VG.
inline double truncation_bound(const MertonParams& p, const MmmQuantities& q, double tau,
                               double spot, double strike, const FftConfig& cfg) {
  const double c1 = merton_c1(p, q, tau, cfg.alpha);
  return std::max(merton_trunc_i1(cfg.eps, tau, strike, spot, cfg.alpha, c1, p),
                  merton_trunc_i2(cfg.eps, tau, strike, spot, cfg.alpha, c1, p));
}

inline double truncation_bound(const VgParams& p, const MmmQuantities& q, double tau,
                               double spot, double strike, const FftConfig& cfg) {
  const double c2 = vg_c2(p, q, tau, cfg.alpha);
  return vg_trunc(cfg.eps, tau, strike, spot, cfg.alpha, c2, p);
}

/// Every transform needed for one (model, tau, spot) slice. Strikes reuse the
/// same characteristic-function samples.
template <class Model>
class LrmSlice {
  static constexpr bool is_merton = std::is_same_v<Model, MertonParams>;
  static_assert(is_merton || std::is_same_v<Model, VgParams>, "unsupported model");

 public:
  LrmSlice(const Model& model, double tau, double spot, const FftConfig& cfg,
           EvalOptions options = {})
      : model_(model), tau_(tau), spot_(spot), cfg_(cfg), options_(options),
        mmm_(mmm_quantities(model)) {
    cfg_.validate();
    if (!(tau >= kTauMin) || !std::isfinite(tau)) {
      throw DomainError("time to maturity below the minimum of 1e-6");
    }
    if (!(spot > 0.0) || !std::isfinite(spot)) throw DomainError("spot must be positive");

    const std::size_t n = cfg_.n;
    const double log_spot = std::log(spot);
    std::vector<cplx> psi2(n), psi1, psi_kernel(n);
    if constexpr (is_merton) psi1.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const cplx zeta{cfg_.eta * static_cast<double>(j), -cfg_.alpha};
      const cplx iz{cfg_.alpha, cfg_.eta * static_cast<double>(j)};
      const cplx phi = char_fn(zeta);
      const cplx base = phi * std::exp(iz * log_spot);
      psi2[j] = base / ((iz - 1.0) * iz);
      if constexpr (is_merton) {
        psi1[j] = base / (iz - 1.0);
        psi_kernel[j] = psi2[j] * std::exp(-0.5 * model_.delta * model_.delta * zeta * zeta);
      } else {
        psi_kernel[j] = psi2[j] * vg_kernel(zeta, model_.C(), model_.G(), model_.M());
      }
    }
    plain_ = DampedTransform(std::move(psi2), cfg_, options_.mode);
    kernel_ = DampedTransform(std::move(psi_kernel), cfg_, options_.mode);
    if constexpr (is_merton) first_ = DampedTransform(std::move(psi1), cfg_, options_.mode);
  }

  const MmmQuantities& mmm() const { return mmm_; }
  const FftConfig& config() const { return cfg_; }
  double tau() const { return tau_; }
  double spot() const { return spot_; }

  cplx char_fn(cplx zeta) const {
    if constexpr (is_merton) {
      return merton_char_fn(zeta, tau_, model_, mmm_);
    } else {
      return vg_char_fn(zeta, tau_, model_, mmm_);
    }
  }

  /// Sufficient truncation frequency for allowable error cfg.eps at this strike.
  double trunc_bound(double strike) const {
    return truncation_bound(model_, mmm_, tau_, spot_, strike, cfg_);
  }

  /// Undiscounted call value E~[(S_T - K)^+ | S_{t-} = spot].
  double call_value(double strike) const { return plain_.at_strike(strike); }

  double i1(double strike) const {
    if constexpr (is_merton) {
      return first_.at_strike(strike);
    } else {
      throw ModelMismatch("I1 is not defined for variance gamma (no diffusion part)");
    }
  }

  double i2(double strike) const {
    double sum = 0.0;
    if constexpr (is_merton) {
      for (const auto& term : merton_i2_terms(model_, strike)) {
        if (term.coefficient == 0.0) continue;
        const auto& t = term.kernel == SampledKernel::plain ? plain_ : kernel_;
        sum += term.coefficient * t.at_strike(term.strike);
      }
    } else {
      for (const auto& term : vg_i2_weights(model_).terms(strike)) {
        const auto& t = term.kernel == SampledKernel::plain ? plain_ : kernel_;
        sum += term.coefficient * t.at_strike(term.strike);
      }
    }
    return sum;
  }

  LrmResult evaluate(double strike) const {
    if (!(strike > 0.0) || !std::isfinite(strike)) throw DomainError("strike must be positive");
    LrmResult r;
    r.mode = options_.mode;
    r.config = cfg_;
    r.trunc_a = trunc_bound(strike);
    r.tail_ok = fft::tail_condition_check(cfg_, r.trunc_a);
    if (!r.tail_ok && options_.enforce_tail) {
      throw TailConditionError("N*eta = " + std::to_string(cfg_.grid_length()) +
                               " is below the truncation bound " + std::to_string(r.trunc_a));
    }
    const double sigma = sigma_of(model_);
    const double s2 = sigma * sigma;
    double numerator = i2(strike);
    r.i2 = numerator;
    if constexpr (is_merton) {
      r.i1 = i1(strike);
      numerator += s2 * *r.i1;
    }
    r.lrm = numerator / (spot_ * (s2 + mmm_.quad_exp_moment));
    r.out_of_unit_range = !(r.lrm >= 0.0 && r.lrm <= 1.0);
    return r;
  }

 private:
  Model model_;
  double tau_;
  double spot_;
  FftConfig cfg_;
  EvalOptions options_;
  MmmQuantities mmm_;
  DampedTransform plain_;
  DampedTransform kernel_;  ///< Gaussian-damped (Merton) or VG-kernel weighted
  DampedTransform first_;   ///< psi_1, Merton only
};

template <class Model>
double i1(const MarketQuery& q, const Model& model, const FftConfig& cfg,
          EvalOptions options = {}) {
  if constexpr (!std::is_same_v<Model, MertonParams>) {
    throw ModelMismatch("I1 is not defined for variance gamma (no diffusion part)");
  } else {
    q.validate();
    LrmSlice<Model> slice(model, q.tau(), q.spot, cfg, options);
    if (options.enforce_tail && !fft::tail_condition_check(cfg, slice.trunc_bound(q.strike))) {
      throw TailConditionError("N*eta is below the truncation bound");
    }
    return slice.i1(q.strike);
  }
}

template <class Model>
double i2(const MarketQuery& q, const Model& model, const FftConfig& cfg,
          EvalOptions options = {}) {
  q.validate();
  LrmSlice<Model> slice(model, q.tau(), q.spot, cfg, options);
  if (options.enforce_tail && !fft::tail_condition_check(cfg, slice.trunc_bound(q.strike))) {
    throw TailConditionError("N*eta is below the truncation bound");
  }
  return slice.i2(q.strike);
}

template <class Model>
LrmResult lrm(const MarketQuery& q, const Model& model, const FftConfig& cfg,
              EvalOptions options = {}) {
  q.validate();
  return LrmSlice<Model>(model, q.tau(), q.spot, cfg, options).evaluate(q.strike);
}

/// LRM(S, K) = LRM(1, K/S).
template <class Model>
double lrm_by_moneyness(const MoneynessQuery& q, const Model& model, const FftConfig& cfg,
                        EvalOptions options = {}) {
  q.validate();
  return LrmSlice<Model>(model, q.tau, 1.0, cfg, options).evaluate(q.moneyness).lrm;
}

/// LRM(m e^{-y}) - LRM(m): change of the hedge after a log-price jump y.
template <class Model>
double jump_impact(double y, double moneyness, double tau, const Model& model,
                   const FftConfig& cfg, EvalOptions options = {}) {
  if (!std::isfinite(y) || y == 0.0) throw DomainError("jump size must be finite and nonzero");
  MoneynessQuery before{moneyness, tau};
  MoneynessQuery after{moneyness * std::exp(-y), tau};
  before.validate();
  after.validate();
  LrmSlice<Model> slice(model, tau, 1.0, cfg, options);
  return slice.evaluate(after.moneyness).lrm - slice.evaluate(before.moneyness).lrm;
}

template <class Model>
std::vector<LrmResult> strike_sweep(const Model& model, double tau, double spot,
                                    std::span<const double> strikes, const FftConfig& cfg,
                                    EvalOptions options = {.mode = EvalMode::fft_grid}) {
  LrmSlice<Model> slice(model, tau, spot, cfg, options);
  std::vector<LrmResult> out;
  out.reserve(strikes.size());
  for (double K : strikes) out.push_back(slice.evaluate(K));
  return out;
}

}  // namespace levy_lrm
