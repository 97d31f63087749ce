#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "radpml/quadrature.hpp"

using namespace radpml;

namespace {

double apply(const Rule& r, auto f) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * f(r.x[i]);
  return s;
}

double monomial_moment(int k) { return k % 2 ? 0.0 : 2.0 / (k + 1.0); }

}  // namespace

TEST(GaussLegendre, ExactForDegree2nMinus1) {
  for (int n = 1; n <= 24; ++n) {
    const Rule r = gauss_legendre(n);
    ASSERT_EQ(r.size(), static_cast<std::size_t>(n));
    EXPECT_TRUE(std::is_sorted(r.x.begin(), r.x.end()));
    for (int k = 0; k < 2 * n; ++k)
      EXPECT_NEAR(apply(r, [k](double x) { return std::pow(x, k); }), monomial_moment(k), 1e-14) << n << " " << k;
  }
  EXPECT_THROW(gauss_legendre(0), InvalidInput);
}

TEST(GaussLobatto, EndpointsAndExactness) {
  for (int n = 2; n <= 16; ++n) {
    const Rule r = gauss_lobatto(n);
    EXPECT_EQ(r.x.front(), -1.0);
    EXPECT_EQ(r.x.back(), 1.0);
    for (int k = 0; k <= 2 * n - 3; ++k)
      EXPECT_NEAR(apply(r, [k](double x) { return std::pow(x, k); }), monomial_moment(k), 1e-14) << n << " " << k;
  }
  EXPECT_THROW(gauss_lobatto(1), InvalidInput);
}

TEST(GaussLaguerre, MomentsAreFactorials) {
  for (int n : {1, 4, 10, 30, 60}) {
    const Rule r = gauss_laguerre(n);
    double fact = 1.0;
    for (int k = 0; k < std::min(2 * n, 40); ++k) {
      if (k > 0) fact *= k;
      EXPECT_NEAR(apply(r, [k](double x) { return std::pow(x, k); }) / fact, 1.0, 1e-11) << n << " " << k;
    }
  }
}

TEST(GaussLaguerre, SmoothIntegrand) {
  const Rule r = gauss_laguerre(60);
  EXPECT_NEAR(apply(r, [](double x) { return std::cos(x); }), 0.5, 1e-12);
  EXPECT_NEAR(apply(r, [](double x) { return std::exp(-x); }), 0.5, 1e-12);
}
