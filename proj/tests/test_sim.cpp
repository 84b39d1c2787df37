#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace impulse;

namespace {

struct Designed {
  DesignResult d = synthesize(DesignRequest{});
};

const Designed& designed() {
  static const Designed v;
  return v;
}

ModulationConfig constant_regimen(double lambda, double period) {
  ModulationConfig m;
  m.k3 = lambda;
  m.k1 = period;
  return m;
}

TEST(Step, FixedPointClosesCycle) {
  const auto& d = designed().d;
  const StepResult s = step(d.plant, d.modulation, d.cycle.states.pre_jump);
  EXPECT_NEAR(s.lambda, 300.0, 1e-9);
  EXPECT_NEAR(s.period, 20.0, 1e-9);
  EXPECT_LE((s.next - d.cycle.states.pre_jump).norm(), 1e-9);
  EXPECT_EQ(s.dose_clamp, Clamp::None);
  EXPECT_EQ(s.period_clamp, Clamp::None);
}

TEST(Step, ConstantRegimenFromRest) {
  const LinearPlant p = build_plant({});
  const StepResult s = step(p, constant_regimen(300.0, 20.0), Vec3::Zero());
  EXPECT_TRUE(s.next.isApprox(mat_exp(p, 20.0) * (300.0 * LinearPlant::B())));
}

TEST(Step, StaysWithinBounds) {
  const auto& d = designed().d;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < 200; ++i) {
    Vec3 x(u(rng), u(rng) / 5.0, u(rng) / 20.0);
    for (int n = 0; n < 10; ++n) {
      const StepResult s = step(d.plant, d.modulation, x);
      ASSERT_GE(s.lambda, d.modulation.f_lo);
      ASSERT_LE(s.lambda, d.modulation.f_hi);
      ASSERT_GE(s.period, d.modulation.phi_lo);
      ASSERT_LE(s.period, d.modulation.phi_hi);
      x = s.next;
    }
  }
}

TEST(Simulate, OneCycleIsExact) {
  const auto& d = designed().d;
  const SimTrace tr = simulate(d.plant, d.modulation, d.cycle.states.pre_jump, Horizon{100, std::nullopt});
  ASSERT_EQ(tr.events.size(), 100u);
  for (const Event& e : tr.events) {
    EXPECT_NEAR(e.lambda, 300.0, 1e-8);
    EXPECT_NEAR(e.period, 20.0, 1e-8);
  }
  auto c = detect_convergence(tr, 1e-9);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->n_settle, 0u);
  // Dense y range reproduces the analytic output range.
  double ymin = 100.0, ymax = 0.0;
  for (const Sample& s : tr.dense) {
    ymin = std::min(ymin, s.y);
    ymax = std::max(ymax, s.y);
  }
  EXPECT_NEAR(ymax, d.cycle.range.y_max, 1e-4);
  EXPECT_NEAR(ymin, d.cycle.range.y_min, 1e-4);
}

TEST(Simulate, EventBookkeeping) {
  const auto& d = designed().d;
  const SimTrace tr = simulate(d.plant, d.modulation, Vec3::Zero(), Horizon{40, std::nullopt});
  for (std::size_t i = 0; i + 1 < tr.events.size(); ++i) {
    EXPECT_EQ(tr.events[i + 1].t, tr.events[i].t + tr.events[i].period);
    EXPECT_EQ(tr.events[i].post, tr.events[i].pre + tr.events[i].lambda * LinearPlant::B());
    EXPECT_EQ(tr.events[i].post[2], tr.events[i].pre[2]);
  }
  for (const Sample& s : tr.dense) ASSERT_GE(s.x.minCoeff(), 0.0);
}

TEST(Simulate, DenseRefinementDoesNotMoveEvents) {
  const auto& d = designed().d;
  SimOptions coarse;
  coarse.dense_dt = 0.5;
  SimOptions fine;
  fine.dense_dt = 0.01;
  const Vec3 x0(450.0, 0.0, 0.0);
  const SimTrace a = simulate(d.plant, d.modulation, x0, Horizon{25, std::nullopt}, coarse);
  const SimTrace b = simulate(d.plant, d.modulation, x0, Horizon{25, std::nullopt}, fine);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_EQ(a.events[i].t, b.events[i].t);
    EXPECT_EQ(a.events[i].pre, b.events[i].pre);
  }
  EXPECT_GT(b.dense.size(), a.dense.size());
}

TEST(Simulate, OutputContinuityAcrossEvents) {
  const auto& d = designed().d;
  SimOptions o;
  o.dense_dt = 0.01;
  const SimTrace tr = simulate(d.plant, d.modulation, Vec3::Zero(), Horizon{20, std::nullopt}, o);
  // |d ybar/dt| <= ||row 3 of A|| * ||x||_inf bounds the jump between neighbours.
  double xmax = 0.0;
  for (const Sample& s : tr.dense) xmax = std::max(xmax, s.x.cwiseAbs().maxCoeff());
  const double lip = d.plant.A().row(2).cwiseAbs().sum() * xmax;
  for (std::size_t i = 0; i + 1 < tr.dense.size(); ++i) {
    ASSERT_LE(std::abs(tr.dense[i + 1].ybar - tr.dense[i].ybar), lip * o.dense_dt * (1 + 1e-9));
  }
}

TEST(Simulate, OpenLoopGeometricConvergence) {
  const LinearPlant p = build_plant({});
  const SimTrace tr = simulate(p, constant_regimen(300.0, 20.0), Vec3::Zero(), Horizon{60, std::nullopt});
  const Vec3 X = fixed_point(p, {300.0, 20.0}).pre_jump;
  const double rate = std::exp(-0.0374 * 20.0);
  for (std::size_t n = 10; n + 1 < tr.events.size(); ++n) {
    const double e0 = (tr.events[n].pre - X).norm();
    const double e1 = (tr.events[n + 1].pre - X).norm();
    if (e0 < 1e-9) break;
    EXPECT_NEAR(e1 / e0, rate, 1e-3);
  }
}

TEST(Simulate, AttractsFromPerturbedState) {
  const auto& d = designed().d;
  const SimTrace tr = simulate(d.plant, d.modulation, 1.05 * d.cycle.states.pre_jump, Horizon{60, std::nullopt});
  for (std::size_t n = 50; n < tr.events.size(); ++n) {
    EXPECT_NEAR(tr.events[n].lambda, 300.0, 1e-6);
    EXPECT_NEAR(tr.events[n].period, 20.0, 1e-6);
  }
}

TEST(Simulate, BolusStartSettles) {
  const auto& d = designed().d;
  SimOptions o;
  o.first_dose = 450.0;
  const SimTrace tr = simulate(d.plant, d.modulation, Vec3::Zero(), Horizon{80, std::nullopt}, o);
  EXPECT_EQ(tr.events.front().lambda, 450.0);
  const auto c = detect_convergence(tr, 1e-8);
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(c->lambda, 300.0, 1e-6);
  EXPECT_NEAR(c->period, 20.0, 1e-6);
  EXPECT_GT(c->n_settle, 1u);
}

TEST(Simulate, EndTimeHorizon) {
  const auto& d = designed().d;
  const SimTrace tr = simulate(d.plant, d.modulation, d.cycle.states.pre_jump, Horizon{std::nullopt, 100.0});
  EXPECT_EQ(tr.events.size(), 5u);
  EXPECT_DOUBLE_EQ(tr.end_time, 100.0);
  EXPECT_LE(tr.dense.back().t, 100.0);
}

TEST(Simulate, Errors) {
  const auto& d = designed().d;
  EXPECT_THROW(simulate(d.plant, d.modulation, Vec3(-1, 0, 0), Horizon{5, std::nullopt}), Error);
  EXPECT_THROW(simulate(d.plant, d.modulation, Vec3::Zero(), Horizon{0, std::nullopt}), Error);
  EXPECT_THROW(simulate(d.plant, d.modulation, Vec3::Zero(), Horizon{}), Error);
  SimOptions o;
  o.dense_dt = 0.0;
  EXPECT_THROW(simulate(d.plant, d.modulation, Vec3::Zero(), Horizon{5, std::nullopt}, o), Error);
}

TEST(DetectConvergence, NeedsTenEventsAndRejectsTwoCycles) {
  SimTrace tr;
  for (std::size_t n = 0; n < 9; ++n) tr.events.push_back(Event{n, 20.0 * n, 300.0, 20.0, Vec3(1, 1, 1), Vec3(301, 1, 1)});
  EXPECT_FALSE(detect_convergence(tr, 1e-6).has_value());
  tr.events.clear();
  for (std::size_t n = 0; n < 30; ++n) {
    const double lam = n % 2 ? 280.0 : 320.0;
    tr.events.push_back(Event{n, 20.0 * n, lam, 20.0, Vec3(lam, 1, 1), Vec3(lam + 1, 1, 1)});
  }
  EXPECT_FALSE(detect_convergence(tr, 1e-6).has_value());
}

}  // namespace
