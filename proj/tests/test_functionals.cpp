#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shrinkers/fixtures.hpp"
#include "shrinkers/functionals.hpp"

using namespace shrinkers;

namespace {

const double kE = std::exp(1.0);
const double kSphereF = 4.0 / kE;
const double kCircleF = std::sqrt(2 * fixtures::kPi) * std::exp(-0.5);
const double kCliffordF = 2 * fixtures::kPi / kE;

// Brute-force oracle for F: midpoint sums in the parameters, no shared code
// with the quadrature layer.
double sphereGaussianAreaOracle(double R) {
  const int n = 4000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = fixtures::kPi * (i + 0.5) / n;
    s += std::sin(th) * (fixtures::kPi / n);
  }
  return 2 * fixtures::kPi * R * R * s * std::exp(-R * R / 4) / (4 * fixtures::kPi);
}

}  // namespace

TEST(GaussianArea, ClosedForms) {
  EXPECT_NEAR(gaussianArea(fixtures::sphere(2.0)), kSphereF, 1e-12);
  EXPECT_NEAR(gaussianArea(fixtures::sphere(2.0)), sphereGaussianAreaOracle(2.0), 1e-6);
  EXPECT_NEAR(gaussianArea(fixtures::circle(std::sqrt(2.0))), kCircleF, 1e-12);
  EXPECT_NEAR(gaussianArea(fixtures::cliffordTorus()), kCliffordF, 1e-12);
  EXPECT_NEAR(gaussianArea(fixtures::plane()), 1.0, 1e-10);
}

TEST(GaussianArea, UnderResolvedQuadratureIsReported) {
  auto s = fixtures::sphere(2.0);
  s.quadrature = {2, 3};
  EXPECT_THROW(gaussianArea(s), QuadratureUnderResolved);
}

TEST(GaussianArea, MeshConvergesToClosedForm) {
  const auto s = fixtures::sphere(2.0);
  const double e32 = std::abs(gaussianArea(buildMesh(s, 32)) - kSphereF);
  const double e64 = std::abs(gaussianArea(buildMesh(s, 64)) - kSphereF);
  EXPECT_LT(e64 / kSphereF, 1e-3);
  EXPECT_GE(std::log2(e32 / e64), 1.8);
  const auto c = fixtures::circle(std::sqrt(2.0));
  EXPECT_NEAR(gaussianArea(buildCurveMesh(c, 512)) / kCircleF, 1.0, 1e-4);
}

TEST(Entropy, ExactShrinkersAttainMaximumAtIdentity) {
  for (const auto& [imm, value] : std::vector<std::pair<AnalyticImmersion, double>>{
           {fixtures::sphere(2.0), kSphereF},
           {fixtures::circle(std::sqrt(2.0)), kCircleF},
           {fixtures::cliffordTorus(), kCliffordF}}) {
    const auto r = entropy(imm);
    EXPECT_NEAR(r.lambda / value, 1.0, 1e-10) << imm.name;
    EXPECT_TRUE(r.argmax_is_identity) << imm.name << " c=" << r.c << " |x0|=" << r.x0.norm();
    EXPECT_GE(r.lambda, r.F);
    EXPECT_NEAR(r.lambda / r.F, 1.0, 1e-4);
    EXPECT_EQ(r.converged_starts, r.starts);
  }
}

TEST(Entropy, DilatedAndTranslatedSpheres) {
  const auto big = entropy(fixtures::sphere(4.0));
  EXPECT_NEAR(big.lambda, kSphereF, 1e-9);
  EXPECT_NEAR(big.c, 0.5, 1e-6);
  const auto moved = entropy(fixtures::sphere(2.0, 3, Eigen::Vector3d(3, 0, 0)));
  EXPECT_NEAR(moved.lambda, kSphereF, 1e-9);
  EXPECT_NEAR(moved.c, 1.0, 1e-6);
  EXPECT_LT((moved.x0 - Eigen::Vector3d(-3, 0, 0)).norm(), 1e-5);
}

TEST(Entropy, MeshResolution64) {
  const auto r = entropy(buildMesh(fixtures::sphere(2.0), 64));
  EXPECT_NEAR(r.lambda / kSphereF, 1.0, 1e-3);
  EXPECT_TRUE(r.argmax_is_identity);
}

TEST(Entropy, InvariantUnderDilationAndTranslation) {
  const auto base = measurePoints(fixtures::cliffordTorus(), 1);
  const double lambda = entropy(base).lambda;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> cs(0.5, 2.0), unit(-1.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    const double c = cs(rng);
    Eigen::VectorXd x0(4);
    for (int a = 0; a < 4; ++a) x0[a] = unit(rng);
    if (x0.norm() > 2) x0 *= 2 / x0.norm();
    WeightedPoints moved = base;
    for (std::size_t i = 0; i < moved.x.size(); ++i) {
      moved.x[i] = c * moved.x[i] + x0;
      moved.w[i] *= c * c;
    }
    EXPECT_NEAR(entropy(moved).lambda / lambda, 1.0, 1e-4) << "c=" << c;
  }
}

TEST(Entropy, DominatesEveryDilateAndTranslate) {
  const auto P = measurePoints(fixtures::sphere(2.0), 1);
  const double lambda = entropy(P).lambda;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> cs(0.5, 2.0), unit(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d x0(unit(rng), unit(rng), unit(rng));
    EXPECT_LE(gaussianArea(P, cs(rng), x0), lambda + 1e-12);
  }
}

TEST(Entropy, StalledOptimizerIsReported) {
  OptimizerConfig cfg;
  cfg.max_iterations = 3;
  EXPECT_THROW(entropy(fixtures::sphere(2.0), cfg), OptimizerStalled);
}

TEST(GaussianWillmore, ClosedForms) {
  EXPECT_NEAR(gaussianWillmore(fixtures::sphere(2.0)), kSphereF, 1e-12);
  EXPECT_NEAR(gaussianWillmore(fixtures::cliffordTorus()), kCliffordF, 1e-12);
  EXPECT_EQ(gaussianWillmore(fixtures::plane()), 0.0);
  const auto s = fixtures::sphere(2.0);
  EXPECT_NEAR(gaussianWillmore(sampleImmersion(s, buildMesh(s, 64))) / kSphereF, 1.0, 1e-3);
}

TEST(WillmoreGap, EqualityOnSpheres) {
  for (const auto& imm : {fixtures::sphere(2.0), fixtures::cliffordTorus(), fixtures::circle(std::sqrt(2.0))}) {
    const auto g = willmoreEntropyGap(imm);
    EXPECT_NEAR(g.gap, 0.0, 1e-10) << imm.name;
    EXPECT_TRUE(g.equality);
    EXPECT_TRUE(g.consistent);
    EXPECT_LT(g.identity_residual, 1e-12);
  }
  EXPECT_THROW(willmoreEntropyGap(fixtures::sphere(3.0)), NotAShrinker);
}

TEST(StableWillmoreBound, OrientedSphereIsSharp) {
  EXPECT_EQ(yangYauConstant(0), 2);
  EXPECT_EQ(yangYauConstant(1), 4);
  EXPECT_NEAR(stableWillmoreBound(0, true), gaussianWillmore(fixtures::sphere(2.0)), 1e-12);
  EXPECT_NEAR(stableWillmoreBound(0, false), 8 / kE, 1e-15);
}

TEST(MaxhProfile, ValuesAndMaximum) {
  EXPECT_NEAR(maxhProfile(2.0), 4 / kE, 1e-15);
  EXPECT_NEAR(maxhProfile(1.0), std::exp(-0.25), 1e-15);
  EXPECT_LT(maxhProfile(1e-8), 1e-15);
  EXPECT_THROW(maxhProfile(0.0), InvalidArgument);
  const auto m = maxhArgmax();
  EXPECT_NEAR(m.argmax, 2.0, 1e-6);
  EXPECT_NEAR(m.value, 4 / kE, 1e-10);
  for (double r = 0.05; r < 10; r += 0.05) EXPECT_LE(maxhProfile(r), 4 / kE + 1e-15);
}

TEST(AreaGrowth, AgainstPolarOracle) {
  // independent oracle: fine midpoint rule in polar coordinates over the
  // disk in the z-plane, testing membership in the ball pointwise
  auto oracle = [](int m, double r) {
    const int n = 20000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double rho = r * (i + 0.5) / n;
      if (rho * rho + std::pow(rho, 2 * m) <= r * r) s += (1 + m * m * std::pow(rho, 2 * m - 2)) * rho * (r / n);
    }
    return 2 * fixtures::kPi * s;
  };
  for (int m : {1, 2, 3})
    for (double r : {1.0, 2.0, 5.0}) EXPECT_NEAR(euclideanAreaGrowth(m, r).area / oracle(m, r), 1.0, 2e-3) << m << " " << r;
  for (double r : {10.0, 20.0}) EXPECT_NEAR(euclideanAreaGrowth(1, r).area / (fixtures::kPi * r * r), 1.0, 5e-2);
  EXPECT_EQ(euclideanAreaGrowth(1, 0.0).area, 0.0);
  EXPECT_GE(euclideanAreaGrowth(3, 2.0).area, 3 * euclideanAreaGrowth(1, 2.0).area / 4);
  const double C = measuredGrowthConstant({1, 2, 3, 4, 5}, {1, 2, 4, 8});
  EXPECT_GT(C, 0.0);
  for (int m : {1, 2, 3, 4, 5}) EXPECT_GE(euclideanAreaGrowth(m, 3.0).area, C * m * 9 - 1e-12);
}
