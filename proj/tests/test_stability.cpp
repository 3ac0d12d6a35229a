#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "shrinkers/curves.hpp"
#include "shrinkers/fixtures.hpp"
#include "shrinkers/stability.hpp"

using namespace shrinkers;

namespace {

const double kE = std::exp(1.0);

const CurveShrinker& alCurve() {
  static const CurveShrinker c = shootClosed(2, 3);
  return c;
}

AmbientFunction constant(double c) {
  return makeAmbientFunction([c](const auto& x) { return decltype(x[0] * 1.0)(c); });
}

AmbientFunction coordinate(int a) {
  return makeAmbientFunction([a](const auto& x) { return x[a] * 1.0; });
}

AnalyticImmersion coarse(AnalyticImmersion imm, int nu, int nv) {
  imm.quadrature = {nu, nv};
  return imm;
}

}  // namespace

TEST(SecondVariationPhiV, TranslationsAreUnstableOnTheSphere) {
  const auto s = fixtures::sphere(2.0);
  // phi = 1: -1/2 (4 pi)^{-1} int (x_3 / 2)^2 e^{-1} over the radius-2 sphere = -2 / (3e)
  EXPECT_NEAR(secondVariationPhiV(s, constant(1.0), Eigen::Vector3d(0, 0, 1)), -2.0 / (3 * kE), 1e-10);
}

TEST(SecondVariationPhiV, BalancedDirectionVanishes) {
  // With phi = x_1 the form is diag(-64 pi/15, 32 pi/15, 32 pi/15) e^{-1}/(4 pi) in V,
  // which vanishes for V_1^2 = 1/3.
  const auto s = fixtures::sphere(2.0);
  const Eigen::Vector3d V(1 / std::sqrt(3.0), std::sqrt(2.0 / 3.0), 0);
  EXPECT_NEAR(secondVariationPhiV(s, coordinate(0), V), 0.0, 1e-3);
  EXPECT_NEAR(secondVariationPhiV(s, coordinate(0), Eigen::Vector3d(1, 0, 0)), -64.0 / 15 / (4 * kE), 1e-10);
}

TEST(SecondVariationPhiV, TangentTranslationOnThePlane) {
  EXPECT_NEAR(secondVariationPhiV(fixtures::plane(), coordinate(0), Eigen::Vector3d(1, 0, 0)), 0.0, 1e-14);
}

TEST(SecondVariationPhiV, RequiresAShrinker) {
  EXPECT_THROW(secondVariationPhiV(fixtures::sphere(3.0), constant(1.0), Eigen::Vector3d(0, 0, 1)), NotAShrinker);
}

TEST(SecondVariationPhiH, DilationAndBalancedCombination) {
  const auto s = fixtures::sphere(2.0);
  EXPECT_NEAR(secondVariationPhiH(s, constant(1.0)), -4 / kE, 1e-10);
  // unit-normalized eigenfunctions with mu = 1/2 and mu = 3/2: gradient energy 2, mass 2
  const double a = 1 / std::sqrt(64 * fixtures::kPi / 3), b = 1 / std::sqrt(256 * fixtures::kPi / 15);
  const auto phi = makeAmbientFunction([a, b](const auto& x) { return a * x[0] + b * x[0] * x[1]; });
  EXPECT_NEAR(secondVariationPhiH(s, phi), 0.0, 1e-10);
}

TEST(SecondVariationPhiV, AgreesWithDirectAssemblyOfL) {
  DerivativeOptions fd;
  fd.mode = DerivativeMode::FiniteDifference;
  const auto phi = makeAmbientFunction([](const auto& x) { return 1.0 + x[0] * x[2]; });
  const auto s = coarse(fixtures::sphere(2.0), 24, 48);
  const Eigen::Vector3d V(0.3, -0.4, std::sqrt(0.75));
  const double form = secondVariationPhiV(s, phi, V);
  EXPECT_NEAR(directSecondVariationPhiV(s, phi, V, fd) / form, 1.0, 1e-4);

  const auto c = coarse(fixtures::circle(std::sqrt(2.0)), 128, 1);
  const auto phic = makeAmbientFunction([](const auto& x) { return x[0] * x[1] + 0.5; });
  const double formc = secondVariationPhiV(c, phic, Eigen::Vector2d(1, 0));
  EXPECT_NEAR(directSecondVariationPhiV(c, phic, Eigen::Vector2d(1, 0), fd) / formc, 1.0, 1e-4);
}

TEST(GaussianPairing, MeanCurvatureIsOrthogonalToTranslations) {
  const auto al = fourierImmersion(alCurve());
  for (const auto& imm : {fixtures::sphere(2.0), fixtures::cliffordTorus(), al})
    for (int i = 0; i < imm.ambient_dim; ++i)
      EXPECT_LT(pairHWithTranslation(imm, Eigen::VectorXd::Unit(imm.ambient_dim, i)).relative(), 1e-6)
          << imm.name << " E" << i;
}

TEST(InstabilityWitness, SphereIsBorderline) {
  const auto s = fixtures::sphere(2.0);
  const auto rep = instabilityWitness(sampleImmersion(s, buildMesh(s, 24)));
  EXPECT_NEAR(rep.mu, 0.5, 1e-2);
  EXPECT_EQ(rep.verdict, "borderline");
  EXPECT_FALSE(rep.witness_found);
}

TEST(InstabilityWitness, AbreschLangerCurveIsUnstable) {
  for (int samples : {1024, 2048}) {
    CurveConfig cfg;
    cfg.samples = samples;
    const CurveShrinker c = sampleCurve(alCurve().k0, alCurve().length, 2, 3, cfg);
    const auto rep = instabilityWitness(sampledCurve(c, "al-curve"));
    EXPECT_LT(rep.mu, 0.5);
    EXPECT_EQ(rep.verdict, "unstable-witness-found");
    ASSERT_TRUE(rep.witness_found);
    EXPECT_LT(rep.orthogonalityMax(), 1e-6);
    EXPECT_LT(rep.delta2Of("witness-direct"), -1e-6 * rep.witness_norm2);
    EXPECT_LT(rep.delta2Of("witness-family"), 0.0);
    EXPECT_NEAR(rep.delta2Of("witness-family") / rep.delta2Of("witness-direct"), 1.0, 1e-2);
    double uH = 0, trans = 0;
    for (const auto& d : rep.diagnostics) {
      if (d.name == "uH-norm2") uH = d.value;
      if (d.name == "translation-projection-norm2") trans = d.value;
    }
    EXPECT_LE(trans, uH);
  }
}

TEST(InstabilityWitness, CliffordTorusIsReported) {
  const auto t = fixtures::cliffordTorus();
  const auto rep = instabilityWitness(sampleImmersion(t, buildMesh(t, 32)));
  EXPECT_FALSE(rep.verdict.empty());
  std::cout << "clifford: mu_|H|^2 = " << rep.mu << ", verdict " << rep.verdict << "\n";
}

TEST(ExtradimsTest, SphereInFourSpaceIsBorderline) {
  const auto s = fixtures::sphere(2.0);
  const auto sampled = embedInHigherDimension(sampleImmersion(s, buildMesh(s, 32)));
  const auto rep = extradimsTest(sampled);
  EXPECT_NEAR(rep.mu, 0.5, 1e-2);
  EXPECT_FALSE(rep.witness_found);
  EXPECT_EQ(rep.verdict, "borderline");
}

TEST(ExtradimsTest, CurveInThreeSpaceHasWitness) {
  const auto rep = extradimsTest(embedInHigherDimension(sampledCurve(alCurve(), "al-curve")));
  EXPECT_LT(rep.mu, 0.5);
  ASSERT_TRUE(rep.witness_found);
  EXPECT_EQ(rep.verdict, "unstable-witness-found");
  EXPECT_LT(rep.orthogonalityMax(), 1e-6);
  EXPECT_LT(rep.delta2Of("phiE-direct"), 0.0);
  EXPECT_NEAR(rep.delta2Of("phiE-direct"), rep.delta2Of("phiE-formula"), 1e-8);
}

TEST(ExtradimsTest, ConstantIsNotAWitnessAndSubspaceIsRequired) {
  const auto sampled = embedInHigherDimension(sampledCurve(alCurve()));
  const SparseMatrix M = assembleDrift(sampled.mesh).M;
  const Eigen::MatrixXd plane = Eigen::MatrixXd::Identity(3, 2);
  const auto r = extradimsResiduals(sampled, Eigen::VectorXd::Ones(sampled.mesh.vertexCount()),
                                    Eigen::Vector3d(0, 0, 1), plane, M);
  EXPECT_GT(r.mean, 0.99);
  const auto s = fixtures::sphere(2.0);
  EXPECT_THROW(extradimsTest(sampleImmersion(s, buildMesh(s, 8))), NotInSubspace);
}

TEST(ConstrainedFamily, RowCountMatchesEnumeration) {
  for (int n = 1; n <= 3; ++n)
    for (int N = n + 1; N <= 6; ++N)
      for (int k = 1; k <= N - n; ++k) {
        std::set<std::pair<int, int>> pairs;
        for (int j = 0; j < n + k; ++j)
          for (int l = 0; l < N; ++l) pairs.insert({std::min(j, l), std::max(j, l)});
        EXPECT_EQ(constraintRowCount(n, N, k), n + k + static_cast<int>(pairs.size())) << n << N << k;
      }
  EXPECT_EQ(constraintRowCount(2, 3, 1), 9);
}

TEST(ConstrainedFamily, SphereCountingBounds) {
  const auto s = fixtures::sphere(2.0);
  const auto sampled = sampleImmersion(s, buildMesh(s, 32));
  const auto r = constrainedFamilyTest(sampled, 1);
  EXPECT_EQ(r.rows_formula, 9);
  EXPECT_EQ(r.rows_enumerated, 9);
  EXPECT_EQ(r.index, 9);
  EXPECT_NEAR(r.mu_index, 3.0, 5e-2);
  EXPECT_TRUE(r.bound_holds);
  EXPECT_GE(r.bound_margin, 10.0);
  EXPECT_EQ(r.theorem_index, 12);
  EXPECT_TRUE(r.theorem_holds);
  EXPECT_GE(r.theorem_margin, 10.0);
  EXPECT_LT(r.constraint_residual, 1e-10);
  EXPECT_NEAR(r.lhs, 1.0, 1e-10);
  EXPECT_NEAR(r.rhs / r.spectral_rhs, 1.0, 1e-8);
  EXPECT_TRUE(r.inequality_holds);

  EXPECT_THROW(constrainedFamilyTest(sampled, 2), InvalidArgument);
  EXPECT_THROW(constrainedFamilyTest(sampled, 1, 0, driftSpectrum(assembleDrift(sampled.mesh), 5)),
               InsufficientEigenbasis);
}

TEST(ScalarStabilitySpectrum, SphereAndCircle) {
  const auto s = fixtures::sphere(2.0);
  const auto r = scalarStabilitySpectrum(sampleImmersion(s, buildMesh(s, 32)), 9);
  EXPECT_NEAR(r.spectrum.values[0], 1.0, 1e-2);
  for (int i = 1; i <= 3; ++i) EXPECT_NEAR(r.spectrum.values[i], 0.5, 1e-2);
  for (int i = 4; i <= 8; ++i) EXPECT_NEAR(r.spectrum.values[i], -0.5, 2e-2);
  EXPECT_EQ(r.h_index, 0);
  EXPECT_GT(r.h_alignment, 0.999);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r.translation_indices[i], 1);
    EXPECT_GT(r.translation_alignment[i], 0.999);
  }

  const auto c = fixtures::circle(std::sqrt(2.0));
  const auto rc = scalarStabilitySpectrum(sampleImmersion(c, buildCurveMesh(c, 1024)), 5);
  const double expected[] = {1.0, 0.5, 0.5, -1.0, -1.0};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(rc.spectrum.values[i], expected[i], 1e-3);

  const auto t = fixtures::cliffordTorus();
  EXPECT_THROW(scalarStabilitySpectrum(sampleImmersion(t, buildMesh(t, 8)), 3), WrongCodimension);
}
