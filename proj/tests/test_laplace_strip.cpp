#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hsflat/model/laplace_strip.hpp"

using namespace hsflat;

namespace {

std::vector<double> flat(int n, double v) { return std::vector<double>(n, v); }

std::vector<double> sampled(const PeriodicGrid1D& g, const std::function<double(double)>& f) {
  std::vector<double> out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = f(g.x(i));
  return out;
}

// Max nodal error against u(x) = cos(kx) cosh(k(x_n + H)) / cosh(kD) on a flat strip of height D.
double cosh_error(int nx, int ny, int k, double H, double g0) {
  const StripGrid g(PeriodicGrid1D(nx), ny);
  PressureSolver solver(g);
  const double D = g0 + H;
  const auto top = sampled(g.horizontal(), [k](double x) { return std::cos(k * x); });
  const auto u = solver.solve(flat(nx, g0), H, flat(nx, 0.0), top);
  double err = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double xn = -H + g.y(j) * D;
      const double exact = std::cos(k * g.horizontal().x(i)) * std::cosh(k * (xn + H)) / std::cosh(k * D);
      err = std::max(err, std::abs(u.at(i, j) - exact));
    }
  return err;
}

} // namespace

TEST(Mapping, FlatFrontGivesConstantCoefficients) {
  const StripGrid g(PeriodicGrid1D(16), 9);
  InterfaceState s{g, flat(16, 0.5), 0.0, 1.5, Schedule(1.0), 0.0, 0.5};
  const auto c = build_mapping(s);
  for (const auto& k : c.k) {
    EXPECT_DOUBLE_EQ(k[0], 2.0);
    EXPECT_EQ(k[1], 0.0);
    EXPECT_DOUBLE_EQ(k[2], 0.5);
  }
}

TEST(Mapping, ChainRuleAtRandomNodes) {
  // |grad f|^2 dx dx_n = grad F^T K grad F dx dy for F(x,y) = f(x, -H + y D(x)).
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int n = 0; n < 16; ++n) {
    const double fx = U(rng), fn = U(rng), y = 0.5 + 0.25 * U(rng), D = 2.5 + U(rng), dD = U(rng);
    const double Fx = fx + fn * y * dD, Fy = fn * D;
    const auto K = mapped_coefficients(D, dD, y);
    const double lhs = D * (fx * fx + fn * fn);
    const double rhs = K[0] * Fx * Fx + 2.0 * K[1] * Fx * Fy + K[2] * Fy * Fy;
    EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST(Mapping, UnitDeterminantAndPositiveEigenvalues) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const double D = 0.1 + 3.0 * U(rng), dD = 4.0 * (U(rng) - 0.5), y = U(rng);
    const auto K = mapped_coefficients(D, dD, y);
    const double tr = K[0] + K[2], det = K[0] * K[2] - K[1] * K[1];
    EXPECT_NEAR(det, 1.0, 1e-12 * tr * tr);
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    const double lmin = 0.5 * tr - disc, lmax = 0.5 * tr + disc;
    EXPECT_GT(lmin, 0.0);
    EXPECT_NEAR(lmin * lmax, 1.0, 1e-9 * tr * tr);
  }
}

TEST(PressureSolver, PlanarSolutionIsExact) {
  for (double a : {0.5, 1.0, 3.0}) {
    const StripGrid g(PeriodicGrid1D(32), 12);
    InterfaceState s{g, flat(32, 0.3), 0.0, 2.0, Schedule(a), 0.0, 0.3};
    const auto u = solve_pressure(s);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) EXPECT_NEAR(u.at(i, j), a * 2.3 * (1.0 - g.y(j)), 1e-9 * a);
    for (double d : boundary_gradient(u)) EXPECT_NEAR(d, a, 1e-8 * a);
  }
}

TEST(PressureSolver, CoshClosedForm) {
  for (int k : {1, 3}) EXPECT_LT(cosh_error(64, 64, k, 1.0, 0.0), 2e-3 * k * k);
}

TEST(PressureSolver, SecondOrderUnderRefinement) {
  const double e1 = cosh_error(16, 9, 2, 1.0, 0.2);
  const double e2 = cosh_error(32, 17, 2, 1.0, 0.2);
  const double e3 = cosh_error(64, 33, 2, 1.0, 0.2);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.25);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.25);
}

TEST(PressureSolver, SingleModeFirstOrderGradient) {
  // gamma = g0 + d cos(kx): |Du| on the front = a - a d k tanh(kD) cos(kx) + O(d^2).
  const int nx = 128, ny = 64, k = 2;
  const double a = 1.5, H = 1.0, g0 = 0.0, d = 1e-3;
  const StripGrid g(PeriodicGrid1D(nx), ny);
  const auto gamma = sampled(g.horizontal(), [&](double x) { return g0 + d * std::cos(k * x); });
  InterfaceState s{g, gamma, 0.0, H, Schedule(a), 0.0, g0};
  const auto grad = boundary_gradient(solve_pressure(s));
  const double slope = a * k * std::tanh(k * (g0 + H));
  for (int i = 0; i < nx; ++i) {
    const double predicted = -slope * std::cos(k * g.horizontal().x(i));
    EXPECT_NEAR((grad[i] - a) / d, predicted, 0.02 * slope);
  }
}

TEST(PressureSolver, MaximumPrincipleAndMonotoneColumns) {
  const int nx = 64, ny = 32;
  const StripGrid g(PeriodicGrid1D(nx), ny);
  const auto gamma = sampled(g.horizontal(), [](double x) { return 0.1 * std::cos(x) + 0.05 * std::sin(3 * x); });
  InterfaceState s{g, gamma, 0.0, 1.0, Schedule(1.0), 0.0, 0.0};
  const auto u = solve_pressure(s);
  for (int i = 0; i < nx; ++i) {
    EXPECT_EQ(u.at(i, ny - 1), 0.0);
    for (int j = 1; j < ny; ++j) EXPECT_LT(u.at(i, j), u.at(i, j - 1));
    EXPECT_GT(u.at(i, 0), 0.0);
  }
  // Dirichlet data only: values stay within the range of the top data.
  PressureSolver solver(g);
  const auto top = sampled(g.horizontal(), [](double x) { return std::sin(x) + 0.3 * std::cos(2 * x); });
  const auto v = solver.solve(gamma, 1.0, flat(nx, 0.0), top);
  const auto [lo, hi] = std::minmax_element(top.begin(), top.end());
  for (double x : v.u) {
    EXPECT_GE(x, *lo - 1e-9);
    EXPECT_LE(x, *hi + 1e-9);
  }
}

TEST(PressureSolver, DeterministicAndWarmStartConsistent) {
  const int nx = 32, ny = 16;
  const StripGrid g(PeriodicGrid1D(nx), ny);
  const auto gamma = sampled(g.horizontal(), [](double x) { return 0.2 * std::cos(x); });
  InterfaceState s{g, gamma, 0.0, 1.0, Schedule(1.0), 0.0, 0.0};
  const auto u1 = solve_pressure(s), u2 = solve_pressure(s);
  EXPECT_EQ(u1.u, u2.u);
  PressureSolver solver(g);
  const auto u3 = solve_pressure(s, solver, u1.u);
  EXPECT_LE(u3.stats.iterations, 1);
  for (std::size_t k = 0; k < u1.u.size(); ++k) EXPECT_NEAR(u3.u[k], u1.u[k], 1e-9);
}

TEST(PressureSolver, RejectsPinchedLayer) {
  const StripGrid g(PeriodicGrid1D(16), 8);
  InterfaceState s{g, flat(16, 0.0), 0.0, 2.0, Schedule(1.0), 0.0, 0.0};
  s.gamma[5] = -1.9;
  EXPECT_THROW((void)solve_pressure(s), NumericError);
  s.gamma.assign(16, 0.0);
  s.gamma[3] = std::nan("");
  EXPECT_THROW((void)solve_pressure(s), NumericError);
}
