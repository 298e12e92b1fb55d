#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "levy_lrm/oracle.hpp"
#include "levy_lrm/variance_gamma.hpp"
#include "test_support.hpp"

using namespace levy_lrm;
using cplx = std::complex<double>;

namespace {

cplx kernel_by_quadrature(const VgParams& p, cplx zeta) {
  using namespace std::complex_literals;
  return oracle::integrate_levy_complex(oracle::levy_measure(p), [&](double x) {
    return std::exp(1i * zeta * x) * std::expm1(x);
  });
}

}  // namespace

TEST(VgMmmMeasure, DensityIsTiltedOriginal) {
  const auto p = test_support::vg_nikkei();
  const auto q = mmm_quantities(p);
  const auto pair = vg_mmm_measure(p, q.h);
  const auto nu = oracle::levy_measure(p);
  for (double x : {-1.0, -0.2, -0.01, 0.01, 0.3, 0.9}) {
    const double expected = (1.0 - q.h * std::expm1(x)) * nu.density(x);
    EXPECT_NEAR(pair.density(x), expected, 1e-12 * expected);
  }
}

TEST(VgCharFn, NormalizationAndMartingale) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    const auto p = test_support::random_vg(rng);
    const auto q = mmm_quantities(p);
    for (double tau : {0.05, 0.5, 2.0}) {
      EXPECT_NEAR(std::abs(vg_char_fn(0.0, tau, p, q) - 1.0), 0.0, 1e-14);
      EXPECT_NEAR(std::abs(vg_char_fn(cplx{0.0, -1.0}, tau, p, q) - 1.0), 0.0, 1e-12);
    }
  }
}

TEST(VgCharFn, FrozenContourValue) {
  const auto p = test_support::vg_reference();
  const auto v = vg_char_fn(cplx{2.0, -1.75}, 0.5, p, mmm_quantities(p));
  EXPECT_NEAR(v.real(), 0.84191594568534567, 1e-14);
  EXPECT_NEAR(v.imag(), 0.20844074222823997, 1e-14);
}

TEST(VgCharFn, MatchesLevyKhintchineQuadrature) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> v(0.0, 30.0), damp(1.01, 2.0), tau(0.05, 1.5);
  for (int i = 0; i < 20; ++i) {
    const auto p = test_support::random_vg(rng);
    const auto q = mmm_quantities(p);
    const cplx zeta{v(rng), -damp(rng)};
    const double t = tau(rng);
    const cplx closed = vg_char_fn(zeta, t, p, q);
    const cplx quad = oracle::lk_char_fn(zeta, t, p);
    EXPECT_LT(std::abs(closed - quad), 1e-8 * std::max(1.0, std::abs(closed))) << i;
  }
}

TEST(VgKernel, AtZeroIsTheI2Constant) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 20; ++i) {
    const auto p = test_support::random_vg(rng);
    const cplx k0 = vg_kernel(0.0, p.C(), p.G(), p.M());
    EXPECT_NEAR(k0.real(), vg_i2_weights(p).constant, 1e-12 * std::abs(k0.real()));
    EXPECT_NEAR(k0.imag(), 0.0, 1e-15);
    EXPECT_NEAR(vg_i2_weights(p).constant, martingale_drift(p), 1e-15);
  }
}

TEST(VgKernel, FrozenNikkeiValue) {
  const auto p = test_support::vg_nikkei();
  const cplx k = vg_kernel(cplx{3.0, -1.75}, p.C(), p.G(), p.M());
  EXPECT_NEAR(k.real(), 0.013381620096987547, 1e-15);
  EXPECT_NEAR(k.imag(), 0.025018361022280559, 1e-15);
}

TEST(VgKernel, MatchesQuadrature) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> v(0.0, 40.0), damp(1.01, 2.0);
  for (int i = 0; i < 20; ++i) {
    const auto p = test_support::random_vg(rng);
    const cplx zeta{v(rng), -damp(rng)};
    const cplx closed = vg_kernel(zeta, p.C(), p.G(), p.M());
    EXPECT_LT(std::abs(closed - kernel_by_quadrature(p, zeta)), 1e-8 * std::max(1.0, std::abs(closed)))
        << i;
  }
}

TEST(VgKernel, BoundedAlongContour) {
  // |kernel| <= int |e^{alpha x}| |e^x - 1| nu
  const auto p = test_support::vg_nikkei();
  const double alpha = 1.75;
  const auto nu = oracle::levy_measure(p);
  const double bound = oracle::integrate_levy([&](double x) { return nu.density(x); },
                                              [&](double x) {
                                                return std::exp(alpha * x) * std::abs(std::expm1(x));
                                              });
  for (int j = 0; j <= 4000; ++j) {
    const double v = 0.25 * j;
    EXPECT_LE(std::abs(vg_kernel(cplx{v, -alpha}, p.C(), p.G(), p.M())), bound * (1.0 + 1e-9));
  }
}

TEST(VgKernel, ContinuousAlongContour) {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 10; ++i) {
    const auto p = test_support::random_vg(rng);
    cplx prev = vg_kernel(cplx{0.0, -1.75}, p.C(), p.G(), p.M());
    for (int j = 1; j <= 20000; ++j) {
      const cplx cur = vg_kernel(cplx{0.05 * j, -1.75}, p.C(), p.G(), p.M());
      // a branch jump would be 2 pi C
      EXPECT_LT(std::abs(cur - prev), 0.1 * p.C()) << "v = " << 0.05 * j;
      prev = cur;
    }
  }
}

TEST(VgKernel, BranchCutIsReported) {
  const auto p = test_support::vg_nikkei();
  EXPECT_THROW(vg_kernel(cplx{0.0, -(p.M() + 1.0)}, p.C(), p.G(), p.M()), BranchCutError);
}

TEST(VgC2, PolynomialEnvelope) {
  std::mt19937_64 rng(36);
  for (int i = 0; i < 10; ++i) {
    const auto p = test_support::random_vg(rng);
    const auto q = mmm_quantities(p);
    for (double alpha : {1.25, 1.75, 2.0}) {
      for (double tau : {0.1, 0.5, 1.0}) {
        const double c2 = vg_c2(p, q, tau, alpha);
        for (int j = 1; j <= 1000; ++j) {
          const double v = 0.1 * j * j;
          const double envelope = c2 * std::pow(v, -2.0 * p.C() * tau);
          EXPECT_LE(std::abs(vg_char_fn(cplx{v, -alpha}, tau, p, q)), envelope * (1.0 + 1e-12));
        }
      }
    }
  }
}

TEST(VgTrunc, PowerLawInAllowableError) {
  const auto p = test_support::vg_reference();
  const auto q = mmm_quantities(p);
  for (double tau : {0.1, 0.5, 1.0}) {
    const double c2 = vg_c2(p, q, tau, 1.75);
    const double power = 2.0 * p.C() * tau + 1.0;
    const double a = vg_trunc(1e-2, tau, 1.0, 1.0, 1.75, c2, p);
    const double a_half = vg_trunc(1e-2 * std::pow(2.0, power), tau, 1.0, 1.0, 1.75, c2, p);
    EXPECT_NEAR(a_half, 0.5 * a, 1e-12 * a);
  }
}

TEST(VgTrunc, ScalesWithSpotAtFixedMoneyness) {
  // a^{2C tau+1} is proportional to K^{1-alpha} S^alpha, so K = m S gives a factor S.
  const auto p = test_support::vg_nikkei();
  const auto q = mmm_quantities(p);
  const double c2 = vg_c2(p, q, 0.5, 1.75);
  const double power = 2.0 * p.C() * 0.5 + 1.0;
  const double a1 = vg_trunc(1e-2, 0.5, 1.1, 1.0, 1.75, c2, p);
  const double as = vg_trunc(1e-2, 0.5, 1.1 * test_support::kNikkeiSpot, test_support::kNikkeiSpot,
                             1.75, c2, p);
  EXPECT_NEAR(std::pow(as / a1, power), test_support::kNikkeiSpot, 1e-9 * test_support::kNikkeiSpot);
}

TEST(VgTrunc, RejectsBadArguments) {
  const auto p = test_support::vg_reference();
  EXPECT_THROW(vg_trunc(-1.0, 0.5, 1.0, 1.0, 1.75, 1.0, p), DomainError);
  EXPECT_THROW(vg_trunc(1e-2, 0.0, 1.0, 1.0, 1.75, 1.0, p), DomainError);
}

TEST(VgI2Weights, ConstantIsNegativeForValidModels) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 50; ++i) {
    const auto p = test_support::random_vg(rng);
    const auto w = vg_i2_weights(p);
    EXPECT_LT(w.constant, 0.0);
    const auto terms = w.terms(2.0);
    EXPECT_EQ(terms[0].kernel, SampledKernel::vg_kernel);
    EXPECT_EQ(terms[1].kernel, SampledKernel::plain);
    EXPECT_GT(terms[1].coefficient, 0.0);
  }
}
