#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hsflat/analysis/deformations.hpp"

using namespace hsflat;

namespace {

// Box covering the half ball and the hodograph search range.
Field2D box(const std::function<double(double, double)>& fn, double h = 0.02) {
  return Field2D::sample(-1.6, -1.0, h, static_cast<int>(3.2 / h) + 1, static_cast<int>(3.0 / h) + 1, fn);
}

double five_point_residual(const Field2D& f, double r_max) {
  double m = 0.0;
  const double h = f.spacing();
  for (int j = 1; j + 1 < f.ny(); ++j)
    for (int i = 1; i + 1 < f.nx(); ++i) {
      if (std::hypot(f.x(i), f.y(j)) > r_max) continue;
      const double lap = f.at(i + 1, j) + f.at(i - 1, j) + f.at(i, j + 1) + f.at(i, j - 1) - 4.0 * f.at(i, j);
      m = std::max(m, std::abs(lap) / (h * h));
    }
  return m;
}

} // namespace

// ---------------------------------------------------------------- barrier

TEST(Barrier, SphereMembershipAndRange) {
  for (int k = 1; k < 50; ++k) {
    const BarrierGeometry g(k * 0.001);
    const auto res = g.membership_residuals();
    EXPECT_LE(std::abs(res[0]), 1e-12 * g.R);
    EXPECT_LE(std::abs(res[1]), 1e-12 * g.R);
    EXPECT_NEAR(g.R - g.p, g.r, 1e-12);
  }
  EXPECT_THROW(BarrierGeometry(0.0), InvalidArgument);
  EXPECT_THROW(BarrierGeometry(0.05), InvalidArgument);
  EXPECT_NO_THROW(BarrierGeometry(0.08, 2, 0.1));
  EXPECT_THROW(BarrierGeometry(0.02, 4), InvalidArgument);
}

TEST(Barrier, NormalizationAndBoundaryValues) {
  for (int n : {2, 3}) {
    const BarrierGeometry g(0.02, n);
    // U vanishes on the sphere and equals 1/16 - r at distance R - 1/16 from the center.
    for (double th : {0.0, 0.3, 1.0}) {
      const double xp = g.R * std::sin(th), xn = g.p - g.R * std::cos(th);
      EXPECT_NEAR(g.U(xp, xn), 0.0, 1e-12);
    }
    EXPECT_NEAR(g.U(0.0, g.p - (g.R - 1.0 / 16.0)), 1.0 / 16.0 - g.r, 1e-12);
  }
}

TEST(Barrier, NormalDerivativeMatchesFiniteDifferences) {
  for (int n : {2, 3}) {
    const BarrierGeometry g(0.02, n);
    const double d = 1e-5;
    for (double th : {0.0, 0.05, 0.1}) {
      const double xp = g.R * std::sin(th), xn = g.p - g.R * std::cos(th);
      const double fd = (g.U(xp, xn + d) - g.U(xp, xn - d)) / (2.0 * d);
      EXPECT_NEAR(g.dnU_on_sphere(xn), fd, 1e-7) << "n " << n << " theta " << th;
    }
  }
}

TEST(Barrier, FlatLimitWithStableConstant) {
  std::vector<double> C;
  double prev = 0.0;
  for (double r : {0.04, 0.02, 0.01, 0.005, 0.0025}) {
    const auto rep = barrier_lower_bound(BarrierGeometry(r));
    EXPECT_LT(rep.minimum, 1.0);
    EXPECT_GT(rep.minimum, prev);
    EXPECT_LE(rep.argmin_xn, 0.0);
    prev = rep.minimum;
    C.push_back(rep.fitted_C);
  }
  EXPECT_GT(prev, 0.95);
  for (std::size_t k = 1; k < C.size(); ++k) EXPECT_NEAR(C[k] / C[0], 1.0, 0.15);
}

// ---------------------------------------------------------------- Kelvin transform

TEST(Kelvin, InverseAndDefiningIdentity) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double rho = 40.0;
  for (int k = 0; k < 10000; ++k) {
    Point2 x{U(rng), U(rng)};
    const double s = 0.25 * rho * std::abs(U(rng)) / std::max(1e-12, std::hypot(x[0], x[1]));
    x = {x[0] * s, x[1] * s};
    const auto y = kelvin_phi(x, rho);
    const auto back = kelvin_phi_inv(y, rho);
    ASSERT_NEAR(back[0], x[0], 1e-10 * rho);
    ASSERT_NEAR(back[1], x[1], 1e-10 * rho);
    const auto z = kelvin_phi(kelvin_phi_inv(x, rho), rho);
    ASSERT_NEAR(z[0], x[0], 1e-10 * rho);
    ASSERT_NEAR(z[1], x[1], 1e-10 * rho);
    ASSERT_NEAR(kelvin_identity(x, rho), 1.0, 1e-12);
  }
}

TEST(Kelvin, NearIdentityExpansion) {
  // Phi(x) = x + (2 x_n x - |x|^2 e_n)/rho + O(|x|^3 / rho^2).
  const double rho = 20.0;
  double worst = 0.0, worst3 = 0.0;
  for (const auto& x : half_ball_points(0.05)) {
    Point2 xs[2] = {x, {x[0], -x[1]}};
    for (const auto& q : xs) {
      const auto y = kelvin_phi(q, rho);
      const double r2 = q[0] * q[0] + q[1] * q[1];
      if (r2 == 0.0) continue;
      worst = std::max(worst, std::hypot(y[0] - q[0], y[1] - q[1]) * rho / r2);
      const double e0 = y[0] - q[0] - 2.0 * q[1] * q[0] / rho;
      const double e1 = y[1] - q[1] - (2.0 * q[1] * q[1] - r2) / rho;
      worst3 = std::max(worst3, std::hypot(e0, e1) * rho * rho / (r2 * std::sqrt(r2)));
    }
  }
  EXPECT_LT(worst, 2.5);
  EXPECT_LT(worst3, 10.0);
}

TEST(Kelvin, PreservesHarmonicity) {
  auto V = [](double x, double y) { return y + 0.3 * (x * x - y * y) + 0.1 * std::exp(x) * std::cos(y); };
  const auto f = box(V);
  const double rho = 20.0;
  const auto t = kelvin(f, rho, f);
  const double base = five_point_residual(f, 1.0), moved = five_point_residual(t, 1.0);
  EXPECT_GT(base, 0.0);
  EXPECT_LE(moved, 10.0 * base);
  // Pull-back of sampled values at lattice nodes is V(Phi^{-1}(y)).
  for (int j = 40; j < 100; j += 13)
    for (int i = 50; i < 110; i += 11) {
      const auto x = kelvin_phi_inv({t.x(i), t.y(j)}, rho);
      EXPECT_NEAR(t.at(i, j), V(x[0], x[1]), 1e-6);
    }
}

// ---------------------------------------------------------------- shear

TEST(Shear, ExponentialAgainstSeriesAndRotation) {
  const double eps = 0.01;
  auto M = shear_generator({1.0, 0.0});
  Mat<2> A{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) A[i][j] = -eps * M[i][j];
  const auto E = expm<2>(A);
  const auto A2 = matmul<2>(A, A);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(E[i][j], (i == j) + A[i][j] + 0.5 * A2[i][j], 2e-7);
  // p = e_1 generates a rotation by -eps.
  EXPECT_NEAR(E[0][0], std::cos(eps), 1e-15);
  EXPECT_NEAR(E[0][1], std::sin(eps), 1e-15);
  EXPECT_NEAR(E[1][0], -std::sin(eps), 1e-15);
  EXPECT_NEAR(E[1][1], std::cos(eps), 1e-15);
}

TEST(Shear, Conformality) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Point2 p{U(rng), U(rng)};
    const double eps = 0.1 * std::abs(U(rng));
    auto M = shear_generator(p);
    for (auto& row : M)
      for (double& v : row) v *= -eps;
    const auto E = expm<2>(M);
    const Mat<2> Et{{{E[0][0], E[1][0]}, {E[0][1], E[1][1]}}};
    const auto P = matmul<2>(E, Et);
    const double target = std::exp(-2.0 * eps * p[1]);
    EXPECT_NEAR(P[0][0], target, 1e-12);
    EXPECT_NEAR(P[1][1], target, 1e-12);
    EXPECT_NEAR(P[0][1], 0.0, 1e-12);
  }
}

TEST(Shear, ZeroIsIdentityAndLargeRejected) {
  const auto f = box([](double x, double y) { return std::sin(x) * y; }, 0.05);
  const auto s = shear(f, {0.0, 0.0}, 0.1, f);
  for (int j = 1; j + 2 < f.ny(); ++j)
    for (int i = 1; i + 2 < f.nx(); ++i) EXPECT_NEAR(s.at(i, j), f.at(i, j), 1e-12);
  EXPECT_THROW((void)shear(f, {1.0, 1.0}, 0.2, f), InvalidArgument);
}

// ---------------------------------------------------------------- deformation comparisons

TEST(Deformation, KelvinCorrectionSign) {
  // Planar V = x_n: v = 0, and the transformed hodograph is B(|x'|^2 - x_n^2) to first order.
  const auto V = box([](double, double y) { return y; });
  const double eps = 1e-3, B = 1.0;
  const auto rep = verify_A6(V, eps, B);
  EXPECT_EQ(rep.masked, 0);
  EXPECT_LE(rep.discrepancy, 0.05);
  EXPECT_NEAR(rep.N, 1.0, 1e-9);
  // The opposite sign misses by 2B |x'|^2 at x_n = 0.
  const double rho = 1.0 / (eps * B);
  auto Vt = [&](double a, double b) {
    const auto x = kelvin_phi_inv({a, b}, rho);
    return V(x[0], x[1]);
  };
  double flipped = 0.0;
  for (const auto& x : half_ball_points(0.05)) {
    const double vt = static_hodograph(Vt, x[0], x[1], eps);
    const double v = static_hodograph([&](double a, double b) { return V(a, b); }, x[0], x[1], eps);
    flipped = std::max(flipped, std::abs(vt - (v - B * (x[0] * x[0] - x[1] * x[1]))));
    if (x[1] == 0.0) {
      EXPECT_NEAR(vt, B * x[0] * x[0], 0.05);
    }
  }
  EXPECT_GT(flipped, 1.9);
}

TEST(Deformation, KelvinSweepDecreases) {
  const auto V = box([](double x, double y) { return y + 0.002 * std::sin(3.0 * x) * std::exp(-3.0 * y); });
  double prev = 1e300;
  for (double eps : {0.008, 0.004, 0.002, 0.001}) {
    const auto rep = verify_A6(V, eps, 1.0);
    EXPECT_EQ(rep.masked, 0);
    EXPECT_LT(rep.discrepancy, prev) << "eps " << eps;
    prev = rep.discrepancy;
  }
  EXPECT_THROW((void)verify_A6(V, 0.2, 1.0), InvalidArgument);
}

TEST(Deformation, ShearComparison) {
  const auto V = box([](double, double y) { return y; });
  const auto zero = verify_A7(V, {0.0, 0.0}, 0.01);
  EXPECT_EQ(zero.discrepancy, 0.0);
  EXPECT_EQ(zero.masked, 0);
  double prev = 1e300;
  for (double eps : {0.02, 0.01, 0.005}) {
    const auto rep = verify_A7(V, {0.6, -0.4}, eps);
    EXPECT_EQ(rep.masked, 0);
    EXPECT_LT(rep.discrepancy, prev);
    EXPECT_LT(rep.discrepancy, 2.0 * eps);
    prev = rep.discrepancy;
  }
}
