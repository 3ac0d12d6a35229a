#pragma once

// Analytic fixture immersions: planes, round spheres and circles, flat tori,
// complex graphs, and spheres carried into R^N by a linear isometry.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "shrinkers/immersion.hpp"

namespace shrinkers::fixtures {

inline constexpr double kPi = std::numbers::pi;

/// Closed surface of sphere type given by a generic map of the unit sphere
/// point (p1, p2, p3) into R^N. Chart 0 is the (polar, azimuth) chart; chart 1
/// is the same chart rotated so that chart 0's poles are regular points.
template <class G>
AnalyticImmersion sphereType(std::string name, int N, G map, double scale) {
  AnalyticImmersion imm;
  imm.name = std::move(name);
  imm.ambient_dim = N;
  imm.intrinsic_dim = 2;
  imm.topology = Topology::Sphere;
  imm.genus = 0;
  imm.quadrature = {64, 128};
  auto chart0 = [map](auto th, auto ph) {
    using std::cos;
    using std::sin;
    return map(sin(th) * cos(ph), sin(th) * sin(ph), cos(th));
  };
  auto chart1 = [map](auto th, auto ph) {
    using std::cos;
    using std::sin;
    return map(cos(th), sin(th) * cos(ph), sin(th) * sin(ph));
  };
  imm.charts.push_back(makeChart(chart0, {0.0, 0.0}, {kPi, 2 * kPi}, {false, true}, scale));
  imm.charts.push_back(makeChart(chart1, {0.0, 0.0}, {kPi, 2 * kPi}, {false, true}, scale));
  imm.poles = {ParamPoint{1, kPi / 2, kPi / 2}, ParamPoint{1, kPi / 2, 3 * kPi / 2}};
  return imm;
}

/// Round sphere of the given radius in R^N: center + radius * Q p, where the
/// columns of Q (N x 3) are orthonormal. Defaults to the coordinate R^3.
inline AnalyticImmersion sphere(double radius, int N = 3,
                                Eigen::VectorXd center = Eigen::VectorXd(),
                                Eigen::MatrixXd Q = Eigen::MatrixXd()) {
  if (center.size() == 0) center = Eigen::VectorXd::Zero(N);
  if (Q.size() == 0) Q = Eigen::MatrixXd::Identity(N, 3);
  auto map = [=](auto p1, auto p2, auto p3) {
    using T = decltype(p1);
    std::vector<T> x(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k)
      x[k] = T(center[k]) + radius * (Q(k, 0) * p1 + Q(k, 1) * p2 + Q(k, 2) * p3);
    return x;
  };
  return sphereType("sphere-r" + std::to_string(radius), N, map, radius);
}

/// Orthonormal N x 3 frame from a seeded Gaussian matrix (QR).
inline Eigen::MatrixXd randomIsometry(int N, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd M(N, cols);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  return qr.householderQ() * Eigen::MatrixXd::Identity(N, cols);
}

/// S^2_2 in R^3 x {0} pushed off its hyperplane by eps * p1 * p2 in x_4.
inline AnalyticImmersion perturbedSphereR4(double eps) {
  auto map = [eps](auto p1, auto p2, auto p3) {
    using T = decltype(p1);
    return std::array<T, 4>{2.0 * p1, 2.0 * p2, 2.0 * p3, eps * p1 * p2};
  };
  return sphereType("perturbed-sphere", 4, map, 2.0);
}

/// Flat torus (a cos u, a sin u, b cos v, b sin v) in R^4; a = b = sqrt 2 is
/// the Clifford torus.
inline AnalyticImmersion flatTorus(double a, double b) {
  AnalyticImmersion imm;
  imm.name = "torus";
  imm.ambient_dim = 4;
  imm.intrinsic_dim = 2;
  imm.topology = Topology::Torus;
  imm.genus = 1;
  imm.quadrature = {64, 64};
  auto map = [a, b](auto u, auto v) {
    using std::cos;
    using std::sin;
    using T = decltype(u);
    return std::array<T, 4>{a * cos(u), a * sin(u), b * cos(v), b * sin(v)};
  };
  imm.charts.push_back(makeChart(map, {0.0, 0.0}, {2 * kPi, 2 * kPi}, {true, true}, std::max(a, b)));
  return imm;
}

inline AnalyticImmersion cliffordTorus() {
  auto t = flatTorus(std::sqrt(2.0), std::sqrt(2.0));
  t.name = "clifford";
  return t;
}

/// Circle of the given radius in the first coordinate plane of R^N.
inline AnalyticImmersion circle(double radius, int N = 2) {
  AnalyticImmersion imm;
  imm.name = "circle-r" + std::to_string(radius);
  imm.ambient_dim = N;
  imm.intrinsic_dim = 1;
  imm.topology = Topology::Circle;
  imm.quadrature = {512, 1};
  auto map = [radius, N](auto u, auto) {
    using std::cos;
    using std::sin;
    using T = decltype(u);
    std::vector<T> x(static_cast<std::size_t>(N), T(0.0));
    x[0] = radius * cos(u);
    x[1] = radius * sin(u);
    return x;
  };
  imm.charts.push_back(makeChart(map, {0.0, 0.0}, {2 * kPi, 0.0}, {true, false}, radius));
  return imm;
}

/// The 2-plane spanned by the first two coordinates of R^N, charted on
/// [-half_width, half_width]^2 (the Gaussian weight is negligible outside).
inline AnalyticImmersion plane(int N = 3, double half_width = 12.0) {
  AnalyticImmersion imm;
  imm.name = "plane";
  imm.ambient_dim = N;
  imm.intrinsic_dim = 2;
  imm.topology = Topology::Open;
  imm.quadrature = {96, 96};
  auto map = [N](auto u, auto v) {
    using T = decltype(u);
    std::vector<T> x(static_cast<std::size_t>(N), T(0.0));
    x[0] = u;
    x[1] = v;
    return x;
  };
  imm.charts.push_back(
      makeChart(map, {-half_width, -half_width}, {half_width, half_width}, {false, false}));
  return imm;
}

/// The complex curve z -> (z, z^m) in C^2 = R^4, charted on a square.
inline AnalyticImmersion complexGraph(int m, double half_width = 2.0) {
  AnalyticImmersion imm;
  imm.name = "graph-z" + std::to_string(m);
  imm.ambient_dim = 4;
  imm.intrinsic_dim = 2;
  imm.topology = Topology::Open;
  auto map = [m](auto u, auto v) {
    using T = decltype(u);
    T re(1.0), im(0.0);
    for (int k = 0; k < m; ++k) {
      const T r2 = re * u - im * v;
      im = re * v + im * u;
      re = r2;
    }
    return std::array<T, 4>{u, v, re, im};
  };
  imm.charts.push_back(
      makeChart(map, {-half_width, -half_width}, {half_width, half_width}, {false, false}));
  return imm;
}

}  // namespace shrinkers::fixtures
