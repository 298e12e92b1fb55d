#pragma once

// Reference computations for tests: adaptive quadrature (GSL QAGS/QAWF) of the
// Fourier integrals and of the Levy-measure integrals, a literal O(N^2) DFT
// and a numerically integrated Levy-Khintchine characteristic function.
// Not used on the production path.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <complex>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "levy_lrm/errors.hpp"
#include "levy_lrm/levy_core.hpp"
#include "levy_lrm/merton.hpp"
#include "levy_lrm/variance_gamma.hpp"

namespace levy_lrm::oracle {

using cplx = std::complex<double>;

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  std::size_t max_subdivisions = 2000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("tolerances must be positive");
    if (max_subdivisions == 0) throw DomainError("max_subdivisions must be positive");
  }
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
};

namespace detail {

inline void install_gsl_handler() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};
using Workspace = std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter>;

struct QawoDeleter {
  void operator()(gsl_integration_qawo_table* t) const { gsl_integration_qawo_table_free(t); }
};

inline Workspace make_workspace(std::size_t n) {
  Workspace w(gsl_integration_workspace_alloc(n));
  if (!w) throw std::bad_alloc();
  return w;
}

// Carries a C++ callable through GSL and parks any exception it throws.
struct Trampoline {
  const std::function<double(double)>* fn;
  std::exception_ptr error;

  static double call(double x, void* self) {
    auto* t = static_cast<Trampoline*>(self);
    if (t->error) return 0.0;
    try {
      return (*t->fn)(x);
    } catch (...) {
      t->error = std::current_exception();
      return 0.0;
    }
  }
};

inline void finish(int status, const Trampoline& t, const char* what) {
  if (t.error) std::rethrow_exception(t.error);
  if (status != GSL_SUCCESS && status != GSL_EROUND) {
    throw ConvergenceError(std::string(what) + ": " + gsl_strerror(status));
  }
}

// e^w - 1 - w without cancellation for small |w|.
inline cplx expm1_minus_linear(cplx w) {
  if (std::abs(w) < 1e-3) {
    return w * w * (0.5 + w * (1.0 / 6.0 + w * (1.0 / 24.0 + w / 120.0)));
  }
  return std::exp(w) - 1.0 - w;
}

}  // namespace detail

/// int_a^b f(x) dx by QAGS.
inline QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                            const QuadratureSpec& spec = {}) {
  spec.validate();
  detail::install_gsl_handler();
  auto ws = detail::make_workspace(spec.max_subdivisions);
  detail::Trampoline t{&f, nullptr};
  gsl_function F{&detail::Trampoline::call, &t};
  QuadResult r;
  const int status = gsl_integration_qags(&F, a, b, spec.abs_tol, spec.rel_tol,
                                          spec.max_subdivisions, ws.get(), &r.value,
                                          &r.abs_error);
  detail::finish(status, t, "QAGS");
  return r;
}

/// int_a^inf f(x) dx via x = a + s u/(1-u) on (0, 1).
inline QuadResult integrate_half_line(const std::function<double(double)>& f, double a,
                                      const QuadratureSpec& spec = {}, double scale = 1.0) {
  const std::function<double(double)> g = [&](double u) {
    const double one_minus = 1.0 - u;
    if (one_minus <= 0.0) return 0.0;
    const double jac = scale / (one_minus * one_minus);
    const double v = f(a + scale * u / one_minus) * jac;
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(g, 0.0, 1.0, spec);
}

/// int_R f(x) dx via x = c + s log(u/(1-u)) on (0, 1).
inline QuadResult integrate_real_line(const std::function<double(double)>& f, double center,
                                      const QuadratureSpec& spec = {}, double scale = 1.0) {
  const std::function<double(double)> g = [&](double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double x = center + scale * std::log(u / (1.0 - u));
    const double v = f(x) * scale / (u * (1.0 - u));
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(g, 0.0, 1.0, spec);
}

/// int_a^inf f(v) cos(omega v) dv (or sin) by QAWF; omega must be nonzero.
inline QuadResult integrate_oscillatory_tail(const std::function<double(double)>& f, double a,
                                             double omega, bool sine,
                                             const QuadratureSpec& spec = {}) {
  spec.validate();
  if (omega == 0.0) throw DomainError("QAWF needs a nonzero frequency");
  detail::install_gsl_handler();
  auto ws = detail::make_workspace(spec.max_subdivisions);
  auto cycles = detail::make_workspace(spec.max_subdivisions);
  std::unique_ptr<gsl_integration_qawo_table, detail::QawoDeleter> table(
      gsl_integration_qawo_table_alloc(omega, 1.0, sine ? GSL_INTEG_SINE : GSL_INTEG_COSINE,
                                       50));
  if (!table) throw std::bad_alloc();
  detail::Trampoline t{&f, nullptr};
  gsl_function F{&detail::Trampoline::call, &t};
  QuadResult r;
  const int status = gsl_integration_qawf(&F, a, spec.abs_tol, spec.max_subdivisions, ws.get(),
                                          cycles.get(), table.get(), &r.value, &r.abs_error);
  detail::finish(status, t, "QAWF");
  return r;
}

/// int_{R \ 0} g(x) density(x) dx, split at the origin, each half mapped to (0, 1).
inline double integrate_levy(const std::function<double(double)>& density,
                             const std::function<double(double)>& g,
                             const QuadratureSpec& spec = {}) {
  const auto weighted = [&](double x) {
    const double d = density(x);
    return d > 0.0 ? g(x) * d : 0.0;
  };
  const std::function<double(double)> pos = [&](double x) {
    return x > 0.0 ? weighted(x) : 0.0;
  };
  const std::function<double(double)> neg = [&](double x) {
    return x > 0.0 ? weighted(-x) : 0.0;
  };
  return integrate_half_line(pos, 0.0, spec).value + integrate_half_line(neg, 0.0, spec).value;
}

template <class Density>
cplx integrate_levy_complex(const Density& density, const std::function<cplx(double)>& g,
                            const QuadratureSpec& spec = {}) {
  const std::function<double(double)> d = [&](double x) { return density.density(x); };
  const double re = integrate_levy(d, [&](double x) { return g(x).real(); }, spec);
  const double im = integrate_levy(d, [&](double x) { return g(x).imag(); }, spec);
  return {re, im};
}

/// Literal F(l) = sum_j exp(-2 pi i j l / N) x_j.
inline std::vector<cplx> naive_dft(std::span<const cplx> x) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t l = 0; l < n; ++l) {
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = -2.0 * std::numbers::pi *
                           static_cast<double>((j * l) % n) / static_cast<double>(n);
      acc += x[j] * cplx{std::cos(angle), std::sin(angle)};
    }
    out[l] = acc;
  }
  return out;
}

/// exp{tau [i zeta mu* - sigma^2 zeta^2 / 2 + int (e^{i zeta x} - 1 - i zeta x) nu~(dx)]}
/// with the jump integral done by quadrature against `measure` (anything with
/// density(x)).
template <class Measure>
cplx lk_char_fn(cplx zeta, double tau, const Measure& measure, double mu_star, double sigma,
                const QuadratureSpec& spec = {}) {
  using namespace std::complex_literals;
  const cplx jump = integrate_levy_complex(
      measure, [&](double x) { return detail::expm1_minus_linear(1i * zeta * x); }, spec);
  return std::exp(tau * (1i * zeta * mu_star - 0.5 * sigma * sigma * zeta * zeta + jump));
}

/// The measure nu~ of a model under the minimal martingale measure.
inline GaussianJumpMixture mmm_measure(const MertonParams& p, const MmmQuantities& q) {
  return merton_mmm_measure(p, q.h);
}
inline CgmComponentPair mmm_measure(const VgParams& p, const MmmQuantities& q) {
  return vg_mmm_measure(p, q.h);
}

/// The original Levy measure nu.
inline GaussianJump levy_measure(const MertonParams& p) {
  return {p.gamma, p.m, p.delta * p.delta};
}
inline CgmComponent levy_measure(const VgParams& p) { return {p.C(), p.G(), p.M()}; }

template <class Model>
cplx lk_char_fn(cplx zeta, double tau, const Model& model, const QuadratureSpec& spec = {}) {
  const auto q = mmm_quantities(model);
  return lk_char_fn(zeta, tau, mmm_measure(model, q), q.mu_star, sigma_of(model), spec);
}

/// Fourier integrals (K e^{-alpha x}/pi) int_0^inf Re[e^{-i v x} g(v)] dv at
/// log-moneyness x = log(K/S), with g built from the closed-form
/// characteristic function under the minimal martingale measure.
template <class Model>
class FourierQuadrature {
  static constexpr bool is_merton = std::is_same_v<Model, MertonParams>;

 public:
  FourierQuadrature(const Model& model, double tau, double spot, double alpha = 1.75,
                    QuadratureSpec spec = {.rel_tol = 1e-11, .abs_tol = 1e-14})
      : model_(model), tau_(tau), spot_(spot), alpha_(alpha), spec_(spec),
        mmm_(mmm_quantities(model)) {
    if (!(tau >= kTauMin)) throw DomainError("time to maturity below the minimum of 1e-6");
    if (!(spot > 0.0)) throw DomainError("spot must be positive");
    if constexpr (is_merton) {
      // Gaussian envelope C1 e^{-sigma^2 v^2 tau/2}: stop where it is below 1e-30 of C1.
      const double s2t = model.sigma * model.sigma * tau;
      cutoff_ = std::sqrt(2.0 * 69.0 / s2t);
    } else {
      cutoff_ = 200.0;
    }
  }

  cplx char_fn(cplx zeta) const {
    if constexpr (is_merton) {
      return merton_char_fn(zeta, tau_, model_, mmm_);
    } else {
      return vg_char_fn(zeta, tau_, model_, mmm_);
    }
  }

  /// E~[(S_T - K)^+]. In the money the contour moves to Re(i zeta) < 0, where
  /// the same integral is the put, and parity restores the call.
  double call_value(double strike) const {
    const auto g = [&](cplx zeta, cplx iz) { return char_fn(zeta) / ((iz - 1.0) * iz); };
    if (strike >= spot_) return transform(strike, alpha_, g);
    return transform(strike, -kItmContour, g) + spot_ - strike;
  }

  /// E~[S_T 1{S_T > K}]; in the money the contour crosses the pole at i zeta = 1,
  /// whose residue is S.
  double i1(double strike) const {
    const auto g = [&](cplx zeta, cplx iz) { return char_fn(zeta) / (iz - 1.0); };
    if (strike >= spot_) return transform(strike, alpha_, g);
    return transform(strike, -kItmContour, g) + spot_;
  }

  /// The raw contour integral at an arbitrary damping, for cross-checks.
  double call_transform(double strike, double damping) const {
    return transform(strike, damping,
                     [&](cplx zeta, cplx iz) { return char_fn(zeta) / ((iz - 1.0) * iz); });
  }
  double i1_transform(double strike, double damping) const {
    return transform(strike, damping,
                     [&](cplx zeta, cplx iz) { return char_fn(zeta) / (iz - 1.0); });
  }

  const MmmQuantities& mmm() const { return mmm_; }
  double cutoff() const { return cutoff_; }

 private:
  static constexpr double kItmContour = 0.5;

  template <class G>
  double transform(double strike, double damping, G g) const {
    const double x = std::log(strike / spot_);
    const double scale = strike * std::exp(-damping * x) / std::numbers::pi;
    // abs_tol is meant in units of the result, not of the raw integral.
    QuadratureSpec spec = spec_;
    spec.abs_tol = spec_.abs_tol * spot_ / scale;
    const auto re_part = [&](double v, bool sine_part) {
      const cplx zeta{v, -damping};
      const cplx iz{damping, v};
      const cplx val = g(zeta, iz);
      return sine_part ? val.imag() : val.real();
    };
    // Re[e^{-ivx} g] = cos(vx) Re g + sin(vx) Im g
    const std::function<double(double)> body = [&](double v) {
      const double c = std::cos(v * x), s = std::sin(v * x);
      return c * re_part(v, false) + s * re_part(v, true);
    };
    double total = integrate(body, 0.0, cutoff_, spec).value;
    if constexpr (!is_merton) {
      if (x != 0.0) {
        const double omega = std::abs(x);
        const double sign = x > 0.0 ? 1.0 : -1.0;
        const std::function<double(double)> re = [&](double v) { return re_part(v, false); };
        const std::function<double(double)> im = [&](double v) {
          return sign * re_part(v, true);
        };
        total += integrate_oscillatory_tail(re, cutoff_, omega, false, spec).value;
        total += integrate_oscillatory_tail(im, cutoff_, omega, true, spec).value;
      } else {
        const std::function<double(double)> re = [&](double v) { return re_part(v, false); };
        total += integrate_half_line(re, cutoff_, spec, cutoff_).value;
      }
    }
    return scale * total;
  }

  Model model_;
  double tau_;
  double spot_;
  double alpha_;
  QuadratureSpec spec_;
  MmmQuantities mmm_;
  double cutoff_ = 0.0;
};

/// I1 by adaptive quadrature of its Fourier integral (Merton only).
inline double quad_i1(const MarketQuery& q, const MertonParams& p, double alpha = 1.75) {
  q.validate();
  return FourierQuadrature<MertonParams>(p, q.tau(), q.spot, alpha).i1(q.strike);
}

/// Call value E~[(S_T - K)^+] by adaptive quadrature of its Fourier integral.
template <class Model>
double quad_call_price(const MarketQuery& q, const Model& model, double alpha = 1.75) {
  q.validate();
  return FourierQuadrature<Model>(model, q.tau(), q.spot, alpha).call_value(q.strike);
}

/// I2 straight from its definition,
/// int (e^x f(K e^{-x}) - f(K)) (e^x - 1) nu(dx),
/// with an outer quadrature against the original Levy measure and each inner
/// call value f by Fourier quadrature.
template <class Model>
double quad_i2_definition(const MarketQuery& q, const Model& model, double alpha = 1.75,
                          QuadratureSpec outer = {.rel_tol = 1e-8, .abs_tol = 1e-12}) {
  q.validate();
  if constexpr (std::is_same_v<Model, MertonParams>) {
    if (model.gamma == 0.0) return 0.0;
  }
  const FourierQuadrature<Model> fq(model, q.tau(), q.spot, alpha);
  const double f_k = fq.call_value(q.strike);
  const auto nu = levy_measure(model);
  const std::function<double(double)> density = [&](double x) { return nu.density(x); };
  const std::function<double(double)> g = [&](double x) {
    return (std::exp(x) * fq.call_value(q.strike * std::exp(-x)) - f_k) * std::expm1(x);
  };
  return integrate_levy(density, g, outer);
}

/// LRM assembled from the oracle pieces.
template <class Model>
double quad_lrm(const MarketQuery& q, const Model& model, double alpha = 1.75) {
  const auto mmm = mmm_quantities(model);
  const double s2 = sigma_of(model) * sigma_of(model);
  double numerator = quad_i2_definition(q, model, alpha);
  if constexpr (std::is_same_v<Model, MertonParams>) numerator += s2 * quad_i1(q, model, alpha);
  return numerator / (q.spot * (s2 + mmm.quad_exp_moment));
}

}  // namespace levy_lrm::oracle
