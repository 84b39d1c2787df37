#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace impulse;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(BuildPlant, NominalRatesAndDefaultSplit) {
  const LinearPlant p = build_plant({});
  EXPECT_DOUBLE_EQ(p.a()[0], 0.0374);
  EXPECT_NEAR(p.a()[1], 0.1496, 1e-15);
  EXPECT_NEAR(p.a()[2], 0.374, 1e-15);
  EXPECT_DOUBLE_EQ(p.g1(), 0.0374);
  EXPECT_NEAR(p.g2(), 0.0559504, 1e-12);
  EXPECT_NEAR(p.g1() * p.g2(), p.a()[0] * p.a()[1] * p.a()[2], 1e-12 * 2.0925e-3);
  EXPECT_NEAR(p.g1() * p.g2(), 2.09254496e-3, 1e-12);
}

TEST(BuildPlant, ExplicitSplitKeepsProduct) {
  PlantParams pp;
  pp.g1 = 0.5;
  const LinearPlant p = build_plant(pp);
  EXPECT_DOUBLE_EQ(p.g1(), 0.5);
  EXPECT_LE(std::abs(p.g1() * p.g2() - pp.gain_product()), 1e-12 * pp.gain_product());
}

TEST(BuildPlant, StructureMetzlerHurwitzAndCBZero) {
  const LinearPlant p = build_plant({});
  const Mat3& A = p.A();
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT(A(i, i), 0.0);
    for (int j = 0; j < 3; ++j) {
      if (i != j) {
        EXPECT_GE(A(i, j), 0.0);
      }
      if (j > i) {
        EXPECT_EQ(A(i, j), 0.0);
      }
    }
  }
  EXPECT_EQ(LinearPlant::C() * LinearPlant::B(), 0.0);
}

TEST(BuildPlant, Errors) {
  PlantParams bad;
  bad.alpha = 0.2;
  try {
    build_plant(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
  }
  bad.alpha = 0.0;
  EXPECT_THROW(build_plant(bad), Error);
  PlantParams degenerate;
  degenerate.v = {1.0, 4.0, 4.0};
  try {
    build_plant(degenerate);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateSpectrum);
  }
}

TEST(MatExp, IdentityAtZero) {
  const LinearPlant p = build_plant({});
  EXPECT_TRUE(mat_exp(p, 0.0).isApprox(Mat3::Identity(), 0.0));
  EXPECT_THROW(mat_exp(p, -1.0), Error);
}

TEST(MatExp, DiagonalEntryMatchesScalarExponential) {
  const LinearPlant p = build_plant({});
  EXPECT_NEAR(mat_exp(p, 20.0)(0, 0), std::exp(-0.748), 1e-15);
  EXPECT_NEAR(mat_exp(p, 20.0)(0, 0), 0.4733122312, 1e-10);
}

TEST(MatExp, AgreesWithPadeOracle) {
  const LinearPlant p = build_plant({});
  for (double t : {0.1, 1.0, 7.5, 20.0, 37.3834, 100.0}) {
    const Mat3 closed = mat_exp(p, t);
    const Mat3 pade = oracle::expm(p.A(), t);
    EXPECT_LE((closed - pade).cwiseAbs().maxCoeff(), 1e-13) << "t=" << t;
  }
}

TEST(MatExp, NearlyCoincidentRatesUseSeriesFallback) {
  PlantParams pp;
  pp.v = {1.0, 1.0 + 1e-10, 10.0};
  const LinearPlant p = build_plant(pp);
  const Mat3 e = mat_exp(p, 20.0);
  const Mat3 pade = oracle::expm(p.A(), 20.0);
  EXPECT_LE((e - pade).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(e.allFinite());
}

TEST(MatExp, DecaysToZero) {
  const LinearPlant p = build_plant({});
  EXPECT_LT(mat_exp(p, 2000.0).colwise().sum().maxCoeff(), 1e-25);
}

TEST(MatExp, SemigroupAndNonnegativity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t_dist(0.0, 100.0);
  std::uniform_real_distribution<double> alpha_dist(0.01, 0.1);
  for (int i = 0; i < 200; ++i) {
    PlantParams pp;
    pp.alpha = alpha_dist(rng);
    const LinearPlant p = build_plant(pp);
    const double t1 = t_dist(rng), t2 = t_dist(rng);
    const Mat3 lhs = mat_exp(p, t1 + t2);
    const Mat3 rhs = mat_exp(p, t1) * mat_exp(p, t2);
    const double scale = std::max(lhs.cwiseAbs().maxCoeff(), 1e-300);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff() / scale, 1e-10);
    EXPECT_GE(mat_exp(p, t1).minCoeff(), 0.0);
  }
}

TEST(Hill, KnownValues) {
  const HillNonlinearity h;
  EXPECT_DOUBLE_EQ(hill(h, h.c50()), 50.0);
  EXPECT_DOUBLE_EQ(hill(h, 0.0), 100.0);
  EXPECT_NEAR(hill(h, 13.6249), 2.125605, 1e-5);
  EXPECT_THROW(hill(h, -1.0), Error);
}

TEST(Hill, StrictlyDecreasing) {
  const HillNonlinearity h;
  double prev = hill(h, 0.0);
  for (double y = 0.01; y < 60.0; y += 0.01) {
    const double cur = hill(h, y);
    ASSERT_LT(cur, prev);
    prev = cur;
  }
}

TEST(HillInv, AgainstBisectionOracle) {
  const HillNonlinearity h;
  EXPECT_NEAR(hill_inv(h, 50.0), h.c50(), 1e-14);
  for (double y : {10.0, 2.0}) {
    const double o = oracle::bisect([&](double yb) { return hill(h, yb) - y; }, 0.0, 1000.0);
    EXPECT_LE(rel(hill_inv(h, y), o), 1e-12);
  }
  EXPECT_NEAR(hill_inv(h, 10.0), 7.388943, 1e-6);
  EXPECT_NEAR(hill_inv(h, 2.0), 13.946268, 1e-6);
  try {
    hill_inv(h, 100.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
  }
  EXPECT_THROW(hill_inv(h, 0.0), Error);
}

TEST(HillInv, RoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> y_dist(0.01, 99.99);
  std::uniform_real_distribution<double> g_dist(0.3, 10.0);
  for (int i = 0; i < 500; ++i) {
    const HillNonlinearity h(kNominalC50, g_dist(rng));
    const double y = y_dist(rng);
    EXPECT_LE(rel(hill(h, hill_inv(h, y)), y), 1e-10);
  }
}

TEST(HillDeriv, NominalOperatingPoint) {
  const HillNonlinearity h;
  EXPECT_NEAR(hill_deriv(h, 13.6249), -0.4073, 1e-4);
}

TEST(HillDeriv, FiniteDifferenceGrid) {
  const HillNonlinearity h;
  for (double y = 0.1; y <= 50.0; y += 0.1) {
    const double step = 1e-5 * y;
    const double fd = (hill(h, y + step) - hill(h, y - step)) / (2.0 * step);
    const double d = hill_deriv(h, y);
    ASSERT_LT(d, 0.0);
    ASSERT_LE(std::abs(d - fd), 1e-6 * std::abs(d) + 1e-12) << "ybar=" << y;
  }
}

TEST(HillDeriv, OriginBehaviour) {
  EXPECT_EQ(hill_deriv(HillNonlinearity(3.0, 2.0), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(hill_deriv(HillNonlinearity(4.0, 1.0), 0.0), -25.0);
  try {
    hill_deriv(HillNonlinearity(3.0, 0.5), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Singularity);
  }
}

TEST(Hill, ParameterValidation) {
  EXPECT_THROW(HillNonlinearity(0.0, 2.0), Error);
  EXPECT_THROW(HillNonlinearity(3.0, 10.5), Error);
  EXPECT_THROW(HillNonlinearity(3.0, 0.0), Error);
}

}  // namespace
