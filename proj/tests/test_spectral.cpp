#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "shrinkers/fixtures.hpp"
#include "shrinkers/spectral.hpp"

using namespace shrinkers;

namespace {

double maxAbs(const Eigen::MatrixXd& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(AssembleDrift, SymmetricWithConstantKernel) {
  const auto s = fixtures::sphere(2.0);
  const auto m = buildMesh(s, 16);
  const auto p = assembleDrift(m);
  const Eigen::MatrixXd K(p.K), M(p.M);
  EXPECT_EQ(maxAbs(K - K.transpose()), 0.0);
  EXPECT_EQ(maxAbs(M - M.transpose()), 0.0);
  EXPECT_LT((p.K * Eigen::VectorXd::Ones(p.dimension())).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff(), 0.0);
  // u.(Kv) = v.(Ku)
  const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(p.dimension(), -1, 1);
  const Eigen::VectorXd v = u.array().sin();
  EXPECT_NEAR(u.dot(p.K * v), v.dot(p.K * u), 1e-13);
}

TEST(AssembleDrift, MeanCurvatureWeightOnSphereMatchesUnit) {
  const auto s = fixtures::sphere(2.0);
  const auto m = buildMesh(s, 12);
  const auto sampled = sampleImmersion(s, m);
  const auto a = assembleDrift(sampled, WeightKind::Unit);
  const auto b = assembleDrift(sampled, WeightKind::MeanCurvatureSquared);
  EXPECT_LT(maxAbs(Eigen::MatrixXd(a.K - b.K)), 1e-8);
  EXPECT_LT(maxAbs(Eigen::MatrixXd(a.M - b.M)), 1e-8);
}

TEST(AssembleDrift, VanishingMeanCurvatureIsRejected) {
  const auto s = fixtures::sphere(2.0);
  auto sampled = sampleImmersion(s, buildMesh(s, 6));
  sampled.H[3].setZero();
  EXPECT_THROW(assembleDrift(sampled, WeightKind::MeanCurvatureSquared), VanishingWeight);
}

TEST(DriftSpectrum, SphereResolution64) {
  const auto start = std::chrono::steady_clock::now();
  const auto s = fixtures::sphere(2.0);
  const auto m = buildMesh(s, 64);
  const auto r = driftSpectrum(assembleDrift(m), 9);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_NEAR(r.values[0], 0.0, 1e-6);
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(r.values[k], 0.5, 1e-2);
  for (int k = 4; k <= 8; ++k) EXPECT_NEAR(r.values[k], 1.5, 1e-2);
  EXPECT_EQ(r.multiplicityOf(1), 3);
  EXPECT_EQ(r.multiplicityOf(4), 5);
  for (double res : r.residuals) EXPECT_LT(res, 1e-8);
  EXPECT_LT(r.orthonormality_error, 1e-8);
  std::cout << "sphere res 64: " << r.method << " " << r.iterations << " iterations, " << secs << " s\n";
}

TEST(DriftSpectrum, CircleAndClifford) {
  const auto circle = buildCurveMesh(fixtures::circle(std::sqrt(2.0)), 400);
  const auto c = driftSpectrum(assembleDrift(circle), 4);
  EXPECT_NEAR(c.values[0], 0.0, 1e-8);
  EXPECT_NEAR(c.values[1], 0.5, 1e-3);
  EXPECT_NEAR(c.values[2], 0.5, 1e-3);
  EXPECT_NEAR(c.values[3], 2.0, 1e-3);
  EXPECT_NEAR(c.values[4], 2.0, 1e-3);

  const auto torus = buildMesh(fixtures::cliffordTorus(), 48);
  const auto t = driftSpectrum(assembleDrift(torus), 6);
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(t.values[k], 0.5, 1e-2);
  EXPECT_EQ(t.multiplicityOf(1), 4);
  EXPECT_GT(t.values[5], 0.9);
}

TEST(DriftSpectrum, CoordinateFunctionsAreHalfEigenfunctions) {
  const auto s = fixtures::sphere(2.0);
  const auto m = buildMesh(s, 32);
  const auto p = assembleDrift(m);
  for (int a = 0; a < 3; ++a) {
    Eigen::VectorXd x(m.vertexCount());
    for (int i = 0; i < m.vertexCount(); ++i) x[i] = m.vertices[i][a];
    const Eigen::VectorXd Mx = p.M * x;
    EXPECT_LT((p.K * x - 0.5 * Mx).norm() / Mx.norm(), 5e-2);
  }
}

TEST(DriftSpectrum, FirstEigenvalueConvergesAtSecondOrder) {
  const auto s = fixtures::sphere(2.0);
  std::vector<double> err;
  for (int res : {8, 16, 32}) {
    const auto r = driftSpectrum(assembleDrift(buildMesh(s, res)), 1);
    err.push_back(std::abs(r.values[1] - 0.5));
  }
  EXPECT_GE(std::log2(err[0] / err[1]), 1.8);
  EXPECT_GE(std::log2(err[1] / err[2]), 1.8);
}

TEST(DriftSpectrum, DenseAndIterativeAgree) {
  const auto m = buildMesh(fixtures::sphere(2.0), 16);
  const auto p = assembleDrift(m);
  SolverOptions dense, sparse;
  sparse.dense_limit = 0;
  const auto a = driftSpectrum(p, 9, dense);
  const auto b = driftSpectrum(p, 9, sparse);
  EXPECT_EQ(a.method, "dense");
  EXPECT_EQ(b.method, "shift-invert");
  EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(driftSpectrum(p, p.dimension()), InvalidArgument);
}

TEST(ConformalSpectrum, DominatesDriftSpectrum) {
  for (const auto& imm : {fixtures::sphere(2.0), fixtures::cliffordTorus()}) {
    const auto m = buildMesh(imm, 24);
    const auto drift = driftSpectrum(assembleDrift(m), 10);
    const auto conf = conformalSpectrum(m, 10);
    EXPECT_NEAR(conf.values[0], 0.0, 1e-8);
    for (int k = 0; k <= 10; ++k) EXPECT_LE(drift.values[k], conf.values[k] + 1e-8) << imm.name << " k=" << k;
  }
}

TEST(MuH2Spectrum, SphereAndCircle) {
  const auto s = fixtures::sphere(2.0);
  const auto r = muH2Spectrum(sampleImmersion(s, buildMesh(s, 32)), 4);
  EXPECT_NEAR(r.values[1], 0.5, 1e-2);
  EXPECT_EQ(r.multiplicityOf(1), 3);
  EXPECT_GE(r.values[4], 1.0 - 1e-2);

  const auto c = fixtures::circle(std::sqrt(2.0));
  const auto rc = muH2Spectrum(sampleImmersion(c, buildCurveMesh(c, 300)), 2);
  EXPECT_NEAR(rc.values[1], 0.5, 1e-3);
}

TEST(KorevaarGap, RatiosOnSphereAndTorus) {
  const double lamS = 4.0 / std::exp(1.0), lamT = 2 * fixtures::kPi / std::exp(1.0);
  const auto sphere = korevaarGap(driftSpectrum(assembleDrift(buildMesh(fixtures::sphere(2.0), 24)), 3), lamS, 0);
  EXPECT_EQ(sphere[0].mu_lambda, 0.0);
  EXPECT_NEAR(sphere[1].ratio, 0.5 * lamS, 1e-2);
  const auto torus = korevaarGap(driftSpectrum(assembleDrift(buildMesh(fixtures::cliffordTorus(), 24)), 3), lamT, 1);
  EXPECT_NEAR(torus[1].mu_lambda, 0.5 * lamT, 2e-2);
  EXPECT_NEAR(torus[1].ratio, 0.25 * lamT, 1e-2);
}
