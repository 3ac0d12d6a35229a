#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>

#include "shrinkers/curves.hpp"
#include "shrinkers/fixtures.hpp"
#include "shrinkers/functionals.hpp"

using namespace shrinkers;

namespace {

const CurveShrinker& al23() {
  static const CurveShrinker c = shootClosed(2, 3);
  return c;
}

const CurveShrinker& al35() {
  static const CurveShrinker c = shootClosed(3, 5);
  return c;
}

double relativeL2Distance(const Eigen::VectorXd& u, const Eigen::VectorXd& target, const SparseMatrix& M) {
  // distance from u to the line through target, relative to |u|
  const double t = u.dot(M * target) / target.dot(M * target);
  const Eigen::VectorXd r = u - t * target;
  return std::sqrt(r.dot(M * r) / u.dot(M * u));
}

}  // namespace

TEST(IntegrateCurve, CircleAndNearCircle) {
  const auto tr = integrateCurve(kCircleCurvature);
  EXPECT_TRUE(tr.circular);
  const auto c = circleShrinker();
  for (double k : c.k) EXPECT_NEAR(k, kCircleCurvature, 1e-8);
  EXPECT_LT(c.closure_error, 1e-8);
  EXPECT_EQ(c.rotation_index, 1);

  const auto near = integrateCurve(kCircleCurvature + 1e-3);
  EXPECT_FALSE(near.circular);
  EXPECT_GT(near.half_length, 0.0);
  // small oscillations have period 2 pi in arclength (linearization about the circle)
  EXPECT_NEAR(2 * near.half_length, 2 * fixtures::kPi, 1e-2);
}

TEST(IntegrateCurve, Errors) {
  EXPECT_THROW(integrateCurve(0.0), InvalidArgument);
  EXPECT_THROW(integrateCurve(-0.3), InvalidArgument);
  EXPECT_THROW(integrateCurve(1e-7), BlowUp);
}

TEST(ShootClosed, FindsTheFirstNonCircularCurve) {
  const auto start = std::chrono::steady_clock::now();
  const auto& c = al23();
  EXPECT_LT(c.closure_error, 1e-8);
  EXPECT_EQ(c.rotation_index, 2);
  EXPECT_GE(c.gauss_degree, 2);
  EXPECT_TRUE(c.convex);
  EXPECT_LT(c.residual, 1e-8);
  EXPECT_GT(c.k0, 0.0);
  EXPECT_LT(c.k0, kCircleCurvature);
  // Gauss degree is the total turning of the tangent over 2 pi, an integer
  const double turn = c.theta.back() - c.theta.front() + (c.theta[1] - c.theta[0]);
  EXPECT_NEAR(turn / (2 * fixtures::kPi), c.gauss_degree, 1e-8);
  std::cout << "(2,3) curve: k0 = " << c.k0 << ", length " << c.length << ", "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
}

TEST(ShootClosed, CircleAndMissingTargets) {
  const auto c = shootClosed(1, 1);
  EXPECT_NEAR(c.length, 2 * fixtures::kPi * std::sqrt(2.0), 1e-12);
  EXPECT_LT(c.closure_error, 1e-8);
  EXPECT_THROW(shootClosed(3, 4), NoRoot);
  EXPECT_THROW(shootClosed(2, 1), InvalidArgument);
}

TEST(ShootClosed, RefinedResidualAndEntropy) {
  const auto imm = fourierImmersion(al23());
  EXPECT_LT(shrinkerResidual(imm).sup, 1e-8);
  const double circle = std::sqrt(2 * fixtures::kPi) * std::exp(-0.5);
  const auto e = entropy(imm);
  EXPECT_GT(e.lambda, circle);
  EXPECT_TRUE(e.argmax_is_identity);
  const auto g = willmoreEntropyGap(imm);
  EXPECT_GT(g.gap, 1e-2);
  EXPECT_FALSE(g.equality);
  EXPECT_TRUE(g.consistent);
  EXPECT_LT(g.identity_residual, 1e-6);
}

TEST(ShootClosed, ProductWithCircleIsAShrinker) {
  const auto imm = curveTimesCircle(al23());
  EXPECT_LT(shrinkerResidual(imm).sup, 1e-8);
  const auto g = willmoreEntropyGap(imm);
  EXPECT_GT(g.gap, 1e-2);
  EXPECT_LT(g.identity_residual, 1e-6);
}

TEST(CurveDriftSpectrum, CircleAndAbreschLanger) {
  const auto circle = circleShrinker();
  const auto rc = curveDriftSpectrum(circle, 4);
  const double expected[] = {0.0, 0.5, 0.5, 2.0, 2.0};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(rc.values[i], expected[i], 1e-3);
  const SparseMatrix M = assembleDrift(curveMesh(circle)).M;
  const Eigen::VectorXd x1 = Eigen::Map<const Eigen::VectorXd>(circle.x.data(), circle.size());
  Eigen::VectorXd inSpan = rc.vectors.col(1) * rc.vectors.col(1).dot(M * x1) + rc.vectors.col(2) * rc.vectors.col(2).dot(M * x1);
  EXPECT_LT(std::sqrt((x1 - inSpan).dot(M * (x1 - inSpan)) / x1.dot(M * x1)), 1e-6);

  const auto r = curveDriftSpectrum(al23(), 3);
  EXPECT_NEAR(r.values[0], 0.0, 1e-8);
  EXPECT_LT(r.values[1], 0.499);
}

TEST(CurveStabilitySpectrum, CircleAndAbreschLanger) {
  const auto rc = curveStabilitySpectrum(circleShrinker(), 5).spectrum;
  const double expected[] = {1.0, 0.5, 0.5, -1.0, -1.0};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(rc.values[i], expected[i], 1e-3);

  const auto& c = al23();
  const auto r = curveStabilitySpectrum(c, 4);
  EXPECT_NEAR(r.spectrum.values[0], 1.0, 1e-3);
  EXPECT_GT(r.spectrum.values[1], 0.501);
  EXPECT_LT(r.spectrum.values[1], 0.999);
  const SparseMatrix M = assembleDrift(curveMesh(c)).M;
  const Eigen::VectorXd k = Eigen::Map<const Eigen::VectorXd>(c.k.data(), c.size());
  EXPECT_LT(relativeL2Distance(r.spectrum.vectors.col(0), k, M), 1e-3);
  EXPECT_EQ(r.h_index, 0);
}

TEST(CurveStabilitySpectrum, AgreesWithScalarOperatorOnCircle) {
  const auto a = curveStabilitySpectrum(circleShrinker(), 5).spectrum;
  const auto circle = fixtures::circle(std::sqrt(2.0));
  const auto b = scalarStabilitySpectrum(sampleImmersion(circle, buildCurveMesh(circle, 1024)), 5).spectrum;
  EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(NodalDomains, AbreschLangerCurve) {
  const auto& c = al23();
  Eigen::VectorXd n1(c.size()), n2(c.size()), x1(c.size()), x2(c.size());
  for (int i = 0; i < c.size(); ++i) {
    n1[i] = c.normal(i)[0];
    n2[i] = c.normal(i)[1];
    x1[i] = c.x[i];
    x2[i] = c.y[i];
  }
  for (const auto* u : {&n1, &n2, &x1, &x2}) EXPECT_GE(nodalDomains(*u), 4);
  EXPECT_EQ(nodalDomains(Eigen::VectorXd::Constant(c.size(), 2.0)), 1);
  Eigen::VectorXd flip(6);
  flip << 1, 1, -1, -1, 1, 1;
  EXPECT_EQ(nodalDomains(flip), 2);
}

TEST(ClassifyStableCurves, OnlyTheCircleSurvives) {
  const auto circle = circleShrinker();
  const auto v = classifyStableCurves({{"circle", circle}, {"al-2-3", al23()}});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_FALSE(v[0].flagged);
  EXPECT_TRUE(v[1].flagged);
  EXPECT_FALSE(classifyStableCurves({{"circle", circle}})[0].flagged);
  for (const auto& r : classifyStableCurves({{"al-2-3", al23()}, {"al-3-5", al35()}})) EXPECT_TRUE(r.flagged) << r.name;
}

TEST(CurveCsv, RoundTrip) {
  const auto& c = al23();
  const std::string path = (std::filesystem::temp_directory_path() / "shrinkers_al.csv").string();
  writeCurveCsv(c, path);
  const auto back = readCurveCsv(path);
  EXPECT_EQ(back.size(), c.size());
  EXPECT_EQ(back.p, 2);
  EXPECT_EQ(back.q, 3);
  EXPECT_EQ(back.length, c.length);
  EXPECT_EQ(back.rotation_index, 2);
  for (int i = 0; i < c.size(); i += 97) {
    EXPECT_EQ(back.x[i], c.x[i]);
    EXPECT_EQ(back.k[i], c.k[i]);
  }
  EXPECT_LT(back.residual, 1e-8);
  std::filesystem::remove(path);
  EXPECT_THROW(readCurveCsv(path), IoError);
}
