#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "radpml/erroracle.hpp"

using namespace radpml;
using cd = std::complex<double>;

namespace {

ErrorSeriesParams base() {
  ErrorSeriesParams p;
  p.radius_pml = 0.2;
  p.width = 1.0;
  p.sigma_c = 1.0;
  p.gamma = 1.0;
  p.g = bump_signal();
  p.x = 0.1;
  return p;
}

// Without the shift the layer only attenuates each round trip by exp(-2 sigma_c L).
double images(const ErrorSeriesParams& p, double t) {
  const double c = 2.0 * (p.radius_pml + p.width);
  double s = 0.0;
  for (int l = 1; c * l < t + p.x + 1.0; ++l)
    s += std::exp(-2.0 * p.sigma_c * p.width * l) * (p.g(t - p.x - c * l) - p.g(t + p.x - c * l));
  return s;
}

}  // namespace

TEST(LaplaceFactor, Limits) {
  ErrorSeriesParams p = base();
  p.gamma = 0.0;
  for (double sig : {5.0, 10.0, 20.0, 40.0}) {
    p.sigma_c = sig;
    const double s = 1.3;
    const double q = std::exp(-2.0 * s * (p.radius_pml + p.width) - 2.0 * sig * p.width);
    const cd e = laplace_error_factor(p, s);
    EXPECT_NEAR(e.real() / q, 1.0, 2.0 * q + 1e-13);
    EXPECT_EQ(e.imag(), 0.0);
  }
  p = base();
  for (double L : {10.0, 30.0, 60.0}) {
    p.width = L;
    EXPECT_LT(std::abs(laplace_error_factor(p, cd(0.5, 1.0))), std::exp(-L));
  }
  EXPECT_THROW(laplace_error_factor(base(), cd(0.0, 1.0)), InvalidInput);
  EXPECT_THROW(laplace_error_factor(base(), cd(-1.0, 1.0)), InvalidInput);
}

TEST(LaplaceFactor, GeometricRatioBelowOne) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lre(std::log(1e-6), std::log(50.0)), im(-100.0, 100.0), u01(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    ErrorSeriesParams p = base();
    p.sigma_c = 50.0 * u01(rng);
    p.gamma = 10.0 * u01(rng);
    p.width = 3.0 * u01(rng);
    const cd s(std::exp(lre(rng)), im(rng));
    const cd e = laplace_error_factor(p, s);
    // E = q / (1 - q) with q the ratio of the reflection series
    const cd q = e / (1.0 + e);
    EXPECT_LT(std::abs(q), 1.0) << s;
    if (s.real() > 1.0) EXPECT_LT(std::abs(e), 1.0) << s;
  }
}

TEST(ErrorSeries, ZeroSignalAndCausality) {
  ErrorSeriesParams p = base();
  p.g = Signal::zero();
  for (double t : {0.0, 1.0, 3.0, 10.0}) EXPECT_EQ(error_series(p, t), 0.0);
  p = base();
  const double front = 2.0 * (p.radius_pml + p.width) - p.x;
  for (double t = 0.0; t < front; t += 0.05) EXPECT_EQ(error_series(p, t), 0.0) << t;
  EXPECT_NE(error_series(p, front + 0.5), 0.0);
}

TEST(ErrorSeries, UnshiftedReducesToImages) {
  ErrorSeriesParams p = base();
  for (double sig : {0.0, 0.3, 2.0}) {
    p.sigma_c = sig;
    p.gamma = 0.0;
    for (double t = 0.0; t <= 12.0; t += 0.37) EXPECT_NEAR(error_series(p, t), images(p, t), 1e-15) << sig << " " << t;
    p.gamma = 1.0;
    if (sig == 0.0)
      for (double t = 0.0; t <= 12.0; t += 0.37) EXPECT_NEAR(error_series(p, t), images(p, t), 1e-15);
  }
}

TEST(ErrorSeries, ExtraTermsChangeNothing) {
  const ErrorSeriesParams p = base();
  for (double t : {2.0, 2.5, 4.0, 6.3, 10.0}) {
    const double a = error_series(p, t);
    EXPECT_EQ(error_series(p, t, 1e-10, 1), a);
    EXPECT_EQ(error_series(p, t, 1e-10, 3), a);
  }
  EXPECT_EQ(error_series_terms(p, 2.0), 0);
  EXPECT_EQ(error_series_terms(p, 2.3), 1);
  EXPECT_EQ(error_series_terms(p, 10.0), 4);
}

TEST(ErrorSeries, Errors) {
  ErrorSeriesParams p = base();
  EXPECT_THROW(error_series(p, -1.0), InvalidInput);
  p.x = 0.3;
  EXPECT_THROW(error_series(p, 1.0), InvalidInput);
  p = base();
  p.g = Signal{};
  EXPECT_THROW(error_series(p, 1.0), InvalidInput);
  p = base();
  p.sigma_c = -1.0;
  EXPECT_THROW(error_series(p, 1.0), InvalidInput);
}

TEST(ConvolutionQuadrature, PureDelay) {
  const double x = 0.3;
  const Signal g([](double t) { return std::pow(t, 5) * std::exp(-t * t); });
  auto worst = [&](double dt) {
    const CQScheme sc{CQKind::BDF2, dt, static_cast<int>(std::lround(4.0 / dt))};
    const auto w = cq_weights([x](cd s) { return std::exp(-s * x); }, sc);
    std::vector<double> gs(sc.n_steps + 1);
    for (int n = 0; n <= sc.n_steps; ++n) gs[n] = g(n * dt);
    const auto out = cq_apply(w, gs);
    double e = 0.0;
    for (int n = 0; n <= sc.n_steps; ++n) e = std::max(e, std::abs(out[n] - g(n * dt - x)));
    return e;
  };
  const double a = worst(2e-3), b = worst(1e-3);
  EXPECT_LT(b, 1e-4);
  EXPECT_GT(a / b, 3.0);
  EXPECT_THROW(cq_weights([](cd) { return cd(1.0); }, CQScheme{CQKind::BDF2, 0.0, 10}), InvalidInput);
}

TEST(ConvolutionQuadrature, IdentityTransferReproducesSamples) {
  for (CQKind kind : {CQKind::BDF2, CQKind::Trapezoidal}) {
    const CQScheme sc{kind, 0.01, 300};
    const auto w = cq_weights([](cd) { return cd(1.0); }, sc);
    EXPECT_NEAR(w[0], 1.0, 1e-10);
    for (int n = 1; n <= sc.n_steps; ++n) EXPECT_NEAR(w[n], 0.0, 1e-10);
  }
}

TEST(ConvolutionQuadrature, AgreesWithSeries) {
  const ErrorSeriesParams p = base();
  for (CQKind kind : {CQKind::BDF2, CQKind::Trapezoidal}) {
    const double dt = 1e-4;
    const CQScheme sc{kind, dt, 100000};
    const auto e = cq_invert(p, sc);
    ASSERT_EQ(e.size(), 100001u);
    double worst = 0.0;
    for (int n = 0; n <= sc.n_steps; n += 100) worst = std::max(worst, std::abs(e[n] - error_series(p, n * dt)));
    EXPECT_LE(worst, 1e-6);
  }
}

TEST(ConvolutionQuadrature, SecondOrderAwayFromTheFront) {
  const ErrorSeriesParams p = base();
  auto diff = [&](double dt, double t) {
    const auto e = cq_invert(p, CQScheme{CQKind::BDF2, dt, static_cast<int>(std::lround(5.0 / dt))});
    return e[std::lround(t / dt)] - error_series(p, t);
  };
  for (double t : {3.0, 4.0}) {
    const double ratio = diff(1e-3, t) / diff(5e-4, t);
    EXPECT_NEAR(ratio, 4.0, 0.4) << t;
  }
}

TEST(Sweep, StagnatesAsSigmaGrows) {
  const ErrorSeriesParams p = base();
  const auto sw = sigma_sweep(p, {0.1, 1.0, 10.0, 100.0, 1000.0}, 10.0, 0.1);
  ASSERT_EQ(sw.size(), 5u);
  EXPECT_EQ(sw[3].sigma_c, 100.0);
  EXPECT_LT(sw[1].abs_error, sw[0].abs_error);
  EXPECT_LT(sw[4].abs_error, 2.0 * sw[3].abs_error);
  EXPECT_GT(sw[4].abs_error, 0.5 * sw[3].abs_error);
  EXPECT_GT(sw[3].abs_error, 10.0 * sw[1].abs_error);
}

TEST(Sweep, ThreadsDoNotChangeResults) {
  const ErrorSeriesParams p = base();
  const std::vector<double> sig{0.5, 2.0, 8.0, 30.0, 200.0};
  const auto a = sigma_sweep(p, sig, 10.0, 0.1, 1), b = sigma_sweep(p, sig, 10.0, 0.1, 3);
  for (std::size_t i = 0; i < sig.size(); ++i) EXPECT_EQ(a[i].abs_error, b[i].abs_error);
  ErrorSeriesParams bad = p;
  bad.gamma = 0.0;
  EXPECT_THROW(sigma_sweep(bad, sig, 10.0, 0.1), InvalidInput);
}

TEST(Sweep, MonotoneInLayerWidth) {
  ErrorSeriesParams p = base();
  p.sigma_c = 20.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double L = 0.5; L <= 8.0; L += 0.25) {
    p.width = L;
    const double e = std::abs(error_series(p, 10.0));
    EXPECT_LE(e, prev) << L;
    prev = e;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(Attenuation, Examples) {
  EXPECT_EQ(attenuation_factor(20.0, 5.0, 3.0, 3.0, 0.0), 1.0);
  const double nu = 2.0, k = 3.0, depth = 1.0;
  for (double sig : {1e3, 1e4, 1e5}) {
    const double v = attenuation_factor(sig, nu * sig, k, k, depth);
    EXPECT_NEAR(std::log(v) / (-k * k * depth / (nu * nu * sig)), 1.0, 1e-5);
  }
  EXPECT_GT(attenuation_factor(1e6, 2e6, k, k, depth), 1.0 - 1e-5);
  for (double sig : {0.1, 1.0, 10.0}) {
    const double v = attenuation_factor(sig, 0.0, 2.0, 3.0, 0.5);
    EXPECT_LT(v, 1.0);
    EXPECT_NEAR(v, std::exp(-3.0 * sig * 0.5 / 2.0), 1e-15);
  }
  EXPECT_THROW(attenuation_factor(1.0, 1.0, 1.0, 1.0, -0.1), InvalidInput);
}
