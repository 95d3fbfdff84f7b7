#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hsflat/model/hele_shaw.hpp"

using namespace hsflat;

TEST(Schedule, PiecewiseIntegral) {
  const Schedule a({0.0, 0.3, 0.7}, {1.0, 2.0, 0.5});
  EXPECT_EQ(a(-1.0), 1.0);
  EXPECT_EQ(a(0.3), 2.0);
  EXPECT_EQ(a(0.69), 2.0);
  EXPECT_EQ(a(5.0), 0.5);
  EXPECT_NEAR(a.integral(0.0, 1.0), 0.3 + 0.8 + 0.15, 1e-15);
  EXPECT_NEAR(a.integral(0.2, 0.4), 0.1 + 0.2, 1e-15);
  EXPECT_NEAR(a.integral(1.0, 0.0), -1.25, 1e-15);
  EXPECT_EQ(a.min(), 0.5);
  EXPECT_EQ(a.max(), 2.0);
}

TEST(Schedule, RejectsBadRates) {
  EXPECT_THROW(Schedule(0.0), InvalidArgument);
  EXPECT_THROW(Schedule({0.0, 0.0}, {1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(Schedule({0.0}, {1.0, 2.0}), InvalidArgument);
}

TEST(Simulator, PlanarFrontMovesWithTheFlux) {
  RunSpec spec;
  spec.nx = 32;
  spec.ny = 12;
  spec.H = 1.0;
  spec.gamma0 = 0.25;
  spec.a = Schedule(1.0);
  spec.T = 0.5;
  spec.dt = 1.0 / 64.0;
  spec.snapshot_every = 8;
  const auto traj = run(spec);
  ASSERT_EQ(traj.snapshots.size(), 5u);
  for (const auto& s : traj.snapshots) {
    EXPECT_NEAR(s.A, s.t, 1e-15);
    for (double g : s.gamma) EXPECT_NEAR(g, 0.25 + s.t, 1e-8);
    for (double d : s.grad) EXPECT_NEAR(d, 1.0, 1e-8);
  }
}

TEST(Simulator, PiecewiseScheduleUsesExactIntegral) {
  RunSpec spec;
  spec.nx = 32;
  spec.ny = 12;
  spec.H = 1.0;
  spec.a = Schedule({0.0, 0.3, 0.7}, {1.0, 2.0, 0.5});
  spec.T = 1.0;
  spec.dt = 1.0 / 64.0;
  const auto traj = run(spec);
  const auto& last = traj.snapshots.back();
  EXPECT_NEAR(last.A, 1.25, 1e-12);
  for (double g : last.gamma) EXPECT_NEAR(g, 1.25, 1e-8);
  const auto fl = flatness_check(traj, 1e-6);
  EXPECT_TRUE(fl.flat);
  EXPECT_LT(fl.worst, 1e-7);
}

TEST(Simulator, ZeroStepsKeepsInitialState) {
  RunSpec spec;
  spec.nx = 16;
  spec.ny = 8;
  spec.T = 0.0;
  spec.modes = {{1, 0.1, 0.0}};
  const auto traj = run(spec);
  ASSERT_EQ(traj.snapshots.size(), 1u);
  EXPECT_EQ(traj.snapshots[0].gamma, initial_state(spec).gamma);
  EXPECT_EQ(traj.snapshots[0].t, 0.0);
}

TEST(Simulator, RejectsNonIntegerStepCount) {
  RunSpec spec;
  spec.nx = 16;
  spec.ny = 8;
  spec.T = 0.1;
  spec.dt = 0.03;
  EXPECT_THROW((void)run(spec), InvalidArgument);
}

TEST(Simulator, StabilityBound) {
  RunSpec spec;
  spec.nx = 64;
  spec.ny = 8;
  spec.a = Schedule(2.0);
  Simulator sim(initial_state(spec));
  const double bound = 0.5 * (2.0 * std::numbers::pi / 64.0) / (std::numbers::pi * 2.0);
  EXPECT_DOUBLE_EQ(sim.dt_max(), bound);
  EXPECT_THROW(sim.step(1.01 * bound), InvalidArgument);
  EXPECT_THROW(sim.step(0.0), InvalidArgument);
  EXPECT_NO_THROW(sim.step(bound));
}

TEST(Dispersion, OracleValues) {
  EXPECT_NEAR(std::tanh(2.0), 0.9640, 5e-5);
  EXPECT_NEAR(dispersion_oracle(2, 1.0, 1.0), -2.0 * 0.9640275800758169, 1e-12);
  EXPECT_NEAR(dispersion_oracle(1, 3.0, 20.0), -3.0, 1e-12);
  EXPECT_THROW((void)dispersion_oracle(0, 1.0, 1.0), InvalidArgument);
}

TEST(Dispersion, SmallModeDecaysAtTheStripRate) {
  RunSpec spec;
  spec.nx = 64;
  spec.ny = 48;
  spec.H = 1.0;
  spec.a = Schedule(1.0);
  spec.modes = {{2, 1e-3, 0.0}};
  spec.T = 0.25;
  spec.dt = 1.0 / 256.0;
  spec.snapshot_every = 8;
  const auto fit = fit_dispersion(run(spec), 2);
  EXPECT_LT(fit.relative_error, 0.03);
  EXPECT_NEAR(fit.predicted, dispersion_oracle(2, 1.0, fit.depth), 1e-12);
}

TEST(Flatness, Cases) {
  Trajectory traj;
  traj.gamma0 = 1.0;
  traj.snapshots = {{0.0, 0.0, {1.0, 1.1, 0.95}, {}}, {0.5, 0.5, {1.5, 1.45, 1.7}, {}}};
  auto r = flatness_check(traj, 0.25);
  EXPECT_TRUE(r.flat);
  EXPECT_NEAR(r.worst, 0.2, 1e-15);
  EXPECT_EQ(r.worst_t, 0.5);
  EXPECT_FALSE(flatness_check(traj, 0.1).flat);
  traj.snapshots = {{0.0, 0.0, {1.0, 1.0}, {}}};
  EXPECT_TRUE(flatness_check(traj, 0.0).flat);
}

TEST(Simulator, FrontAdvancesMonotonically) {
  RunSpec spec;
  spec.nx = 64;
  spec.ny = 16;
  spec.H = 1.0;
  spec.a = Schedule({0.0, 0.1}, {1.0, 0.5});
  spec.modes = {{1, 0.2, 0.0}, {3, 0.05, 1.0}};
  spec.T = 0.25;
  spec.dt = 1.0 / 256.0;
  const auto traj = run(spec);
  for (std::size_t n = 1; n < traj.snapshots.size(); ++n)
    for (int i = 0; i < spec.nx; ++i)
      EXPECT_GT(traj.snapshots[n].gamma[i], traj.snapshots[n - 1].gamma[i]);
}

TEST(Simulator, FirstOrderInTime) {
  auto final_gamma = [](double dt) {
    RunSpec spec;
    spec.nx = 32;
    spec.ny = 16;
    spec.H = 1.0;
    spec.a = Schedule(1.0);
    spec.modes = {{1, 0.3, 0.0}};
    spec.T = 0.25;
    spec.dt = dt;
    spec.snapshot_every = 1000;
    return run(spec).snapshots.back().gamma;
  };
  const auto g1 = final_gamma(1.0 / 32), g2 = final_gamma(1.0 / 64), g3 = final_gamma(1.0 / 128);
  double d12 = 0.0, d23 = 0.0;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    d12 = std::max(d12, std::abs(g1[i] - g2[i]));
    d23 = std::max(d23, std::abs(g2[i] - g3[i]));
  }
  EXPECT_NEAR(std::log2(d12 / d23), 1.0, 0.15);
}
