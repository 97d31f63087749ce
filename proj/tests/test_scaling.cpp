#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "radpml/scaling.hpp"

using namespace radpml;

namespace {

cd random_s(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(1e-3, 20.0), im(-50.0, 50.0);
  return {re(rng), im(rng)};
}

Vec2 random_point(std::mt19937_64& rng, double rmin, double rmax) {
  std::uniform_real_distribution<double> r(rmin, rmax), th(0.0, 2.0 * M_PI);
  const double rr = r(rng), t = th(rng);
  return {rr * std::cos(t), rr * std::sin(t)};
}

}  // namespace

TEST(SigmaTilde, Examples) {
  const DampingProfile p(1.0, 20.0);
  EXPECT_EQ(p.sigma_tilde(1.0), 0.0);
  EXPECT_DOUBLE_EQ(p.sigma_tilde(2.0), 10.0);
  double prev = 0.0;
  for (double r = 1.5; r < 1e6; r *= 3.0) {
    const double v = p.sigma_tilde(r);
    EXPECT_GT(v, prev);
    EXPECT_LT(v, 20.0);
    prev = v;
  }
  EXPECT_NEAR(p.sigma_tilde(1e12), 20.0, 1e-9);
  EXPECT_THROW(p.sigma_tilde(0.0), InvalidInput);
  EXPECT_THROW(DampingProfile(0.0, 1.0), InvalidInput);
  EXPECT_THROW(DampingProfile(1.0, -1.0), InvalidInput);
}

TEST(SigmaTilde, MatchesIntegralOfSigma) {
  const DampingProfile p(0.7, 3.0);
  for (double r : {0.3, 0.7, 0.9, 2.5, 11.0}) {
    const int n = 200000;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) integral += p.sigma(0.7 + (r - 0.7) * (i + 0.5) / n) * (r - 0.7) / n;
    EXPECT_NEAR(p.sigma_tilde(r), r > 0.7 ? integral / r : 0.0, 1e-9);
  }
}

TEST(ShiftedScaling, Nu) {
  EXPECT_NEAR(*ShiftedScaling(DampingProfile(1.0, 20.0), 10.0).nu(), 2.0, 1e-14);
  EXPECT_FALSE(ShiftedScaling(DampingProfile(1.0, 20.0), 0.0).nu().has_value());
  EXPECT_THROW(ShiftedScaling(DampingProfile(1.0, 1.0), -1.0), InvalidInput);
}

TEST(ComplexFreq, RejectsLeftHalfPlane) {
  EXPECT_THROW(ComplexFreq(cd(0.0, 1.0)), InvalidInput);
  EXPECT_THROW(ComplexFreq(-1.0), InvalidInput);
  EXPECT_NO_THROW(ComplexFreq(cd(1e-12, -3.0)));
}

TEST(DPair, Examples) {
  const ShiftedScaling sc(DampingProfile(1.0, 5.0), 0.0);
  auto [d, dt] = d_pair(sc, cd(2.0, 3.0), 0.5);
  EXPECT_EQ(d, cd(1.0));
  EXPECT_EQ(dt, cd(1.0));
  auto [d2, dt2] = d_pair(sc, 5.0, 3.0);
  EXPECT_DOUBLE_EQ(d2.real(), 2.0);
  EXPECT_EQ(d2.imag(), 0.0);
  (void)dt2;
}

TEST(ScaledCoordinate, Examples) {
  const ShiftedScaling sc(DampingProfile(1.0, 20.0), 10.0);
  const Vec2c inner = scaled_coordinate(sc, cd(1.0, 2.0), Vec2(0.3, 0.4));
  EXPECT_EQ(inner(0), cd(0.3));
  EXPECT_EQ(inner(1), cd(0.4));
  const Vec2c v = scaled_coordinate(sc, 1.0, Vec2(2.0, 0.0));
  EXPECT_NEAR(v(0).real(), 2.0 + 20.0 / 11.0, 1e-14);
  EXPECT_NEAR(std::abs(v(0).imag()) + std::abs(v(1)), 0.0, 1e-15);
  const ShiftedScaling unshifted(DampingProfile(1.0, 3.0), 0.0);
  const Vec2c w = scaled_coordinate(unshifted, 0.5, Vec2(1.2, 1.6));
  EXPECT_EQ(w(0).imag(), 0.0);
  EXPECT_GT(w.norm(), 2.0);
}

TEST(Jacobian, Examples) {
  const ShiftedScaling sc(DampingProfile(1.0, 4.0), 1.5);
  const Mat2c ji = jacobian(sc, cd(1.0, 1.0), Vec2(0.2, 0.1));
  EXPECT_EQ((ji - Mat2c::Identity()).norm(), 0.0);
  const cd s(0.7, -2.0);
  const Mat2c je = jacobian(sc, s, Vec2(3.0, 0.0));
  auto [d, dt] = d_pair(sc, s, 3.0);
  EXPECT_LT(std::abs(je(0, 0) - d) + std::abs(je(1, 1) - dt) + std::abs(je(0, 1)) + std::abs(je(1, 0)), 1e-15);
}

TEST(ASigma, Examples) {
  const Anisotropy an = Anisotropy::from_a((Mat2() << 2.0, 0.3, 0.3, 1.0).finished());
  const ShiftedScaling sc(DampingProfile(1.0, 4.0), 1.5);
  EXPECT_EQ((a_sigma(an, sc, cd(1.0, 2.0), Vec2(0.1, 0.2)) - an.a.cast<cd>()).norm(), 0.0);
  const double a = 2.5;
  const Anisotropy iso = Anisotropy::isotropic(a);
  const Vec2 x(1.5, 2.0);
  const cd s(0.4, 3.0);
  auto [d, dt] = d_pair(sc, s, x.norm());
  auto [par, perp] = radial_projectors(x);
  const Mat2c expect = a * (dt / d) * par.cast<cd>() + a * (d / dt) * perp.cast<cd>();
  EXPECT_LT((a_sigma(iso, sc, s, x) - expect).norm(), 1e-13);
}

TEST(Sdd, Examples) {
  const ShiftedScaling sc(DampingProfile(1.0, 6.0), 0.0);
  const cd s(0.8, 1.7);
  const double r = 2.5;
  const auto c = sdd_coefficients(sc, s, r);
  auto [d, dt] = d_pair(sc, s, r);
  const double sig = 6.0, sigt = sc.profile.sigma_tilde(r);
  EXPECT_LT(std::abs(s * d * dt - (s + sig + sigt + sig * sigt / s)), 1e-12);
  EXPECT_LT(std::abs(c.s_d_dt - s * d * dt), 1e-12);
  const auto inner = sdd_coefficients(ShiftedScaling(DampingProfile(1.0, 6.0), 2.0), s, 0.5);
  EXPECT_EQ(inner.s_d_dt, s);
  EXPECT_EQ(inner.s_d_over_dt, s);
  EXPECT_EQ(inner.s_dt_over_d, s);
}

TEST(MappedRadius, Examples) {
  const MappedLayer m(1.0, 1.0);
  EXPECT_DOUBLE_EQ(mapped_radius(m, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(mapped_radius(m, 1.5), 2.0);
  EXPECT_GT(mapped_radius(m, 2.0 - 1e-12), 1e11);
  EXPECT_THROW(mapped_radius(m, 2.0), InvalidInput);
  EXPECT_THROW(mapped_radius(m, 0.9), InvalidInput);
  EXPECT_THROW(MappedLayer(1.0, 0.0), InvalidInput);
  const double h = 1e-6;
  EXPECT_NEAR(m.derivative(1.3), (m.map(1.3 + h) - m.map(1.3 - h)) / (2 * h), 1e-6);
}

class ScalingProperties : public ::testing::TestWithParam<unsigned> {};

TEST_P(ScalingProperties, DeterminantOfJacobian) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const ShiftedScaling sc(DampingProfile(1.0, u(rng)), u(rng));
    const cd s = random_s(rng);
    const Vec2 x = random_point(rng, 1.0, 5.0);
    auto [d, dt] = d_pair(sc, s, x.norm());
    EXPECT_LE(std::abs(jacobian(sc, s, x).determinant() - d * dt), 1e-13 * std::abs(d * dt));
  }
}

TEST_P(ScalingProperties, ASigmaSymmetric) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> u(0.0, 30.0), e(0.1, 5.0), off(-0.4, 0.4);
  for (int i = 0; i < 1000; ++i) {
    const double a11 = e(rng), a22 = e(rng);
    const Mat2 a = (Mat2() << a11, off(rng) * std::sqrt(a11 * a22), 0.0, a22).finished();
    Mat2 as = a;
    as(1, 0) = as(0, 1);
    const Anisotropy an = Anisotropy::from_a(as);
    const ShiftedScaling sc(DampingProfile(1.0, u(rng)), u(rng));
    const Mat2c m = a_sigma(an, sc, random_s(rng), random_point(rng, 0.1, 5.0));
    EXPECT_LE((m - m.transpose()).norm(), 1e-13 * m.norm());
  }
}

TEST_P(ScalingProperties, UnscaledMaterialUnchanged) {
  std::mt19937_64 rng(GetParam());
  const Anisotropy an = Anisotropy::from_a((Mat2() << 2.0, 0.3, 0.3, 1.0).finished());
  const ShiftedScaling sc(DampingProfile(1.0, 0.0), 3.0);
  for (int i = 0; i < 200; ++i)
    EXPECT_EQ((a_sigma(an, sc, random_s(rng), random_point(rng, 0.1, 5.0)) - an.a.cast<cd>()).norm(), 0.0);
}

TEST_P(ScalingProperties, DTildeBetweenOneAndD) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> u(0.0, 30.0), r(1.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const ShiftedScaling sc(DampingProfile(1.0, u(rng)), u(rng));
    auto [d, dt] = d_pair(sc, random_s(rng), r(rng));
    EXPECT_LE(std::abs(dt - 1.0), std::abs(d - 1.0) + 1e-15);
  }
}

TEST_P(ScalingProperties, ShiftedImageInDisk) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> u(0.1, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const double g = u(rng), sc_ = u(rng);
    const ShiftedScaling sc(DampingProfile(1.0, sc_), g);
    const double nu = sc_ / g;
    const cd d = d_pair(sc, random_s(rng), 2.0).first;
    EXPECT_LT(std::abs(d - (1.0 + nu / 2.0)), nu / 2.0 * (1.0 + 1e-14));
  }
}

TEST_P(ScalingProperties, HalfAngleBound) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> g(1e-3, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const double gm = g(rng);
    EXPECT_LE(std::abs((1.0 / (random_s(rng) / gm + 1.0)).imag()), 0.5 + 1e-15);
  }
}

TEST_P(ScalingProperties, CosineArgumentBound) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> u(0.1, 30.0), r(1.0, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const double gm = u(rng), sc_ = u(rng);
    const ShiftedScaling sc(DampingProfile(1.0, sc_), gm);
    auto [d, dt] = d_pair(sc, random_s(rng), r(rng));
    const double bound = 1.0 / std::sqrt(1.0 + std::pow(sc_ / (2.0 * gm), 2));
    EXPECT_GE(std::cos(std::arg(d / dt)), bound - 1e-14);
  }
}

TEST_P(ScalingProperties, ShiftedSddExpansions) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> u(0.0, 30.0), r(0.2, 6.0);
  for (int i = 0; i < 100; ++i) {
    const ShiftedScaling sc(DampingProfile(1.0, u(rng)), u(rng));
    const cd s = random_s(rng);
    const double rr = r(rng);
    auto [d, dt] = d_pair(sc, s, rr);
    const auto c = sdd_coefficients(sc, s, rr);
    EXPECT_LE(std::abs(c.s_d_dt - s * d * dt), 1e-11 * std::abs(s * d * dt));
    EXPECT_LE(std::abs(c.s_d_over_dt - s * d / dt), 1e-11 * std::abs(s * d / dt));
    EXPECT_LE(std::abs(c.s_dt_over_d - s * dt / d), 1e-11 * std::abs(s * dt / d));
  }
}

TEST_P(ScalingProperties, MappedRadiusMonotone) {
  std::mt19937_64 rng(GetParam());
  const MappedLayer m(0.8, 1.3);
  std::uniform_real_distribution<double> r(0.8, 2.1);
  for (int i = 0; i < 1000; ++i) {
    double r1 = r(rng), r2 = r(rng);
    if (r1 == r2) continue;
    if (r1 > r2) std::swap(r1, r2);
    EXPECT_GT(m.map(r2), m.map(r1));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ScalingProperties, ::testing::Values(1u, 2u, 3u));
