#pragma once

// Gaussian area F, entropy, Gaussian Willmore energy and the scalar
// inequalities tying them together.

#include <Eigen/Dense>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "shrinkers/errors.hpp"
#include "shrinkers/immersion.hpp"
#include "shrinkers/mesh.hpp"
#include "shrinkers/quadrature.hpp"
#include "shrinkers/sampled.hpp"

namespace shrinkers {

/// A discretized measure on a submanifold: points with Euclidean weights and
/// an optional per-point value (|H|^2 for the Willmore integrand).
struct WeightedPoints {
  int intrinsic_dim = 0;
  int ambient_dim = 0;
  std::vector<Eigen::VectorXd> x;
  std::vector<double> w;
  std::vector<double> h2;
};

inline WeightedPoints measurePoints(const AnalyticImmersion& imm, int refine = 1, bool withH = false) {
  WeightedPoints P;
  P.intrinsic_dim = imm.intrinsic_dim;
  P.ambient_dim = imm.ambient_dim;
  for (auto& q : quadratureNodes(imm, refine)) {
    if (withH) P.h2.push_back(fundamentalData(imm, q.param).H.squaredNorm());
    P.x.push_back(std::move(q.x));
    P.w.push_back(q.weight);
  }
  return P;
}

/// Per-simplex rule on a mesh (edge midpoints on triangles, two-point Gauss on
/// segments), applied after splitting every simplex into 2^(Dim * level)
/// pieces. Vertex values `h2` (if given) are interpolated linearly.
template <int Dim>
WeightedPoints measurePoints(const SimplexMesh<Dim>& m, int level = 0, const std::vector<double>* h2 = nullptr) {
  WeightedPoints P;
  P.intrinsic_dim = Dim;
  P.ambient_dim = m.ambient_dim;
  // barycentric points of the sub-rule on the reference simplex and weights (fractions of the volume)
  std::vector<std::array<double, Dim + 1>> bary;
  std::vector<double> frac;
  const int s = 1 << level;
  if constexpr (Dim == 2) {
    auto emit = [&](std::array<double, 2> a, std::array<double, 2> b, std::array<double, 2> c) {
      const std::array<std::array<double, 2>, 3> v{a, b, c};
      for (int k = 0; k < 3; ++k) {
        const auto& p = v[k];
        const auto& q = v[(k + 1) % 3];
        const double l1 = 0.5 * (p[0] + q[0]), l2 = 0.5 * (p[1] + q[1]);
        bary.push_back({1.0 - l1 - l2, l1, l2});
        frac.push_back(1.0 / (3.0 * s * s));
      }
    };
    for (int i = 0; i < s; ++i)
      for (int j = 0; i + j < s; ++j) {
        const double a = 1.0 / s;
        emit({i * a, j * a}, {(i + 1) * a, j * a}, {i * a, (j + 1) * a});
        if (i + j + 1 < s) emit({(i + 1) * a, j * a}, {(i + 1) * a, (j + 1) * a}, {i * a, (j + 1) * a});
      }
  } else {
    const double g = 0.5 / std::sqrt(3.0);
    for (int i = 0; i < s; ++i)
      for (double off : {0.5 - g, 0.5 + g}) {
        const double t = (i + off) / s;
        bary.push_back({1.0 - t, t});
        frac.push_back(0.5 / s);
      }
  }
  for (const auto& c : m.cells) {
    const double vol = simplexVolume(m, c);
    for (std::size_t q = 0; q < bary.size(); ++q) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(m.ambient_dim);
      double h = 0.0;
      for (int k = 0; k <= Dim; ++k) {
        x += bary[q][k] * m.vertices[c[k]];
        if (h2) h += bary[q][k] * (*h2)[static_cast<std::size_t>(c[k])];
      }
      P.x.push_back(std::move(x));
      P.w.push_back(vol * frac[q]);
      if (h2) P.h2.push_back(h);
    }
  }
  return P;
}

/// F(c * Sigma + x0) = (4 pi)^{-n/2} c^n int e^{-|c x + x0|^2 / 4}.
inline double gaussianArea(const WeightedPoints& P, double c = 1.0, const Eigen::VectorXd& x0 = {}) {
  double s = 0.0;
  const bool shift = x0.size() > 0;
  for (std::size_t i = 0; i < P.x.size(); ++i) {
    const double r2 = shift ? (c * P.x[i] + x0).squaredNorm() : c * c * P.x[i].squaredNorm();
    s += P.w[i] * std::exp(-0.25 * r2);
  }
  return gaussianNormalization(P.intrinsic_dim) * std::pow(c, P.intrinsic_dim) * s;
}

inline double gaussianWillmore(const WeightedPoints& P) {
  if (P.h2.size() != P.x.size()) throw InvalidArgument("no mean curvature samples");
  double s = 0.0;
  for (std::size_t i = 0; i < P.x.size(); ++i) s += P.w[i] * P.h2[i] * std::exp(-0.25 * P.x[i].squaredNorm());
  return gaussianNormalization(P.intrinsic_dim) * s;
}

namespace detail {

inline void checkRefinement(double coarse, double fine, double tol, const std::string& what) {
  const double rel = std::abs(coarse - fine) / std::max(std::abs(fine), 1e-300);
  if (rel > tol && std::abs(coarse - fine) > 1e-14)
    throw QuadratureUnderResolved(what + ": refinement levels differ by " + std::to_string(rel) + " relative");
}

}  // namespace detail

inline constexpr double kRefinementTolerance = 1e-4;

inline double gaussianArea(const AnalyticImmersion& imm) {
  const double a = gaussianArea(measurePoints(imm, 1)), b = gaussianArea(measurePoints(imm, 2));
  detail::checkRefinement(a, b, kRefinementTolerance, "gaussianArea(" + imm.name + ")");
  return b;
}

template <int Dim>
double gaussianArea(const SimplexMesh<Dim>& m) {
  const double a = gaussianArea(measurePoints(m, 0)), b = gaussianArea(measurePoints(m, 1));
  detail::checkRefinement(a, b, kRefinementTolerance, "gaussianArea(mesh)");
  return b;
}

inline double gaussianWillmore(const AnalyticImmersion& imm) {
  const double a = gaussianWillmore(measurePoints(imm, 1, true)), b = gaussianWillmore(measurePoints(imm, 2, true));
  detail::checkRefinement(a, b, kRefinementTolerance, "gaussianWillmore(" + imm.name + ")");
  return b;
}

template <int Dim>
double gaussianWillmore(const SampledSurface<Dim>& s) {
  const auto h2 = s.meanCurvatureSquared();
  const double a = gaussianWillmore(measurePoints(s.mesh, 0, &h2)), b = gaussianWillmore(measurePoints(s.mesh, 1, &h2));
  detail::checkRefinement(a, b, kRefinementTolerance, "gaussianWillmore(" + s.name + ")");
  return b;
}

// ---------------------------------------------------------------------------
// Entropy: multistart Nelder–Mead over (log c, x0).

struct OptimizerConfig {
  double ftol = 1e-14;   // relative spread of the simplex values
  double xtol = 1e-8;    // simplex diameter
  int max_iterations = 5000;
  double initial_step = 0.25;
  double identity_tol = 1e-3;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes `f` from `start` with the standard coefficients (1, 2, 1/2, 1/2).
template <class F>
NelderMeadResult nelderMead(F&& f, const Eigen::VectorXd& start, const OptimizerConfig& cfg) {
  const int d = static_cast<int>(start.size());
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(d + 1), start);
  std::vector<double> val(static_cast<std::size_t>(d + 1));
  for (int i = 0; i < d; ++i) pts[static_cast<std::size_t>(i + 1)][i] += cfg.initial_step;
  for (int i = 0; i <= d; ++i) val[static_cast<std::size_t>(i)] = f(pts[static_cast<std::size_t>(i)]);
  NelderMeadResult r;
  std::vector<int> order(static_cast<std::size_t>(d + 1));
  for (r.iterations = 0; r.iterations < cfg.max_iterations; ++r.iterations) {
    for (int i = 0; i <= d; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return val[a] < val[b]; });
    const int best = order.front(), worst = order.back(), second = order[static_cast<std::size_t>(d - 1)];
    double diam = 0.0;
    for (int i = 0; i <= d; ++i) diam = std::max(diam, (pts[i] - pts[best]).norm());
    if (std::abs(val[worst] - val[best]) <= cfg.ftol * (std::abs(val[best]) + 1e-300) && diam <= cfg.xtol) {
      r.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= d;
    const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = f(xr);
    if (fr < val[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                       : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (int i = 0; i <= d; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      val[i] = f(pts[i]);
    }
  }
  const auto it = std::min_element(val.begin(), val.end());
  r.value = *it;
  r.x = pts[static_cast<std::size_t>(it - val.begin())];
  return r;
}

struct EntropyStart {
  double c = 1.0;
  Eigen::VectorXd x0;
  std::string label;
};

struct EntropyResult {
  double lambda = 0.0;
  double F = 0.0;  // at c = 1, x0 = 0
  double c = 1.0;
  Eigen::VectorXd x0;
  int iterations = 0;       // of the winning start
  int converged_starts = 0;
  int starts = 0;
  bool argmax_is_identity = false;
};

/// The eight starts: c in {1, 1/2, 2} at the origin, unit-half shifts along
/// +-E1 and +-E2, and the shift that moves the centroid to the origin.
inline std::vector<EntropyStart> entropyStarts(const WeightedPoints& P) {
  const int N = P.ambient_dim;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(N);
  std::vector<EntropyStart> s{{1.0, zero, "origin"}, {0.5, zero, "c=1/2"}, {2.0, zero, "c=2"}};
  for (int a = 0; a < std::min(N, 2); ++a)
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd v = zero;
      v[a] = 0.5 * sign;
      s.push_back({1.0, v, std::string(sign > 0 ? "+" : "-") + "E" + std::to_string(a + 1)});
    }
  Eigen::VectorXd centroid = zero;
  double total = 0.0;
  for (std::size_t i = 0; i < P.x.size(); ++i) {
    centroid += P.w[i] * P.x[i];
    total += P.w[i];
  }
  s.push_back({1.0, -centroid / total, "centroid"});
  return s;
}

inline EntropyResult entropy(const WeightedPoints& P, const OptimizerConfig& cfg = {}) {
  const int N = P.ambient_dim;
  EntropyResult best;
  best.F = gaussianArea(P);
  best.lambda = -std::numeric_limits<double>::infinity();
  auto objective = [&](const Eigen::VectorXd& y) { return -gaussianArea(P, std::exp(y[0]), y.tail(N)); };
  const auto starts = entropyStarts(P);
  best.starts = static_cast<int>(starts.size());
  for (const auto& s : starts) {
    Eigen::VectorXd y(N + 1);
    y[0] = std::log(s.c);
    y.tail(N) = s.x0;
    auto r = nelderMead(objective, y, cfg);
    // one restart from the result guards against a collapsed simplex
    if (r.converged) {
      const int first = r.iterations;
      r = nelderMead(objective, r.x, cfg);
      r.iterations += first;
    }
    if (!r.converged) continue;
    ++best.converged_starts;
    if (-r.value > best.lambda) {
      best.lambda = -r.value;
      best.c = std::exp(r.x[0]);
      best.x0 = r.x.tail(N);
      best.iterations = r.iterations;
    }
  }
  if (best.converged_starts == 0) throw OptimizerStalled("no entropy start converged");
  best.argmax_is_identity = std::abs(best.c - 1.0) < cfg.identity_tol && best.x0.norm() < cfg.identity_tol;
  return best;
}

inline EntropyResult entropy(const AnalyticImmersion& imm, const OptimizerConfig& cfg = {}) {
  return entropy(measurePoints(imm, 1), cfg);
}

template <int Dim>
EntropyResult entropy(const SimplexMesh<Dim>& m, const OptimizerConfig& cfg = {}) {
  return entropy(measurePoints(m, 0), cfg);
}

// ---------------------------------------------------------------------------
// Willmore versus entropy.

struct WillmoreGap {
  int n = 0;
  double F = 0.0;
  double W = 0.0;
  double gap = 0.0;              // n F - 2 W
  double deviation_integral = 0.0;  // (4 pi)^{-n/2} int (|x|^2 - 2n)^2 e^{-f}
  double identity_residual = 0.0;   // |16 W - 8 n F + deviation| / (8 n F)
  double sphere_deviation = 0.0;    // sup | |x|^2 - 2n |
  bool equality = false;
  bool consistent = false;          // equality flag agrees with gap < 1e-6
};

inline WillmoreGap willmoreEntropyGap(const WeightedPoints& P, double shrinkerDefect = 0.0) {
  if (shrinkerDefect > 1e-4)
    throw NotAShrinker("shrinker residual " + std::to_string(shrinkerDefect) + " exceeds 1e-4");
  WillmoreGap g;
  g.n = P.intrinsic_dim;
  g.F = gaussianArea(P);
  g.W = gaussianWillmore(P);
  double dev = 0.0;
  for (std::size_t i = 0; i < P.x.size(); ++i) {
    const double r2 = P.x[i].squaredNorm();
    dev += P.w[i] * std::pow(r2 - 2 * g.n, 2) * std::exp(-0.25 * r2);
    g.sphere_deviation = std::max(g.sphere_deviation, std::abs(r2 - 2 * g.n));
  }
  g.deviation_integral = gaussianNormalization(g.n) * dev;
  g.gap = g.n * g.F - 2 * g.W;
  g.identity_residual = std::abs(16 * g.W - 8 * g.n * g.F + g.deviation_integral) / (8 * g.n * g.F);
  g.equality = g.sphere_deviation < 1e-6;
  g.consistent = g.equality == (g.gap < 1e-6);
  return g;
}

inline WillmoreGap willmoreEntropyGap(const AnalyticImmersion& imm) {
  const double defect = shrinkerResidual(imm).sup;
  return willmoreEntropyGap(measurePoints(imm, 2, true), defect);
}

/// Conformal-degree constant for a closed surface of the given genus.
inline int yangYauConstant(int genus) { return genus == 0 ? 2 : genus + 3; }

/// Upper bound on W for an F-stable closed surface.
inline double stableWillmoreBound(int genus, bool oriented) {
  return (oriented ? 2.0 : 4.0) * yangYauConstant(genus) / std::numbers::e;
}

// ---------------------------------------------------------------------------
// Scalar profiles.

inline double maxhProfile(double r) {
  if (!(r > 0)) throw InvalidArgument("maxhProfile needs r > 0");
  return r * r * std::exp(-0.25 * r * r);
}

struct ProfileMaximum {
  double argmax = 0.0;
  double value = 0.0;
};

inline ProfileMaximum maxhArgmax() {
  const auto [r, v] = boost::math::tools::brent_find_minima([](double x) { return -maxhProfile(x); }, 0.5, 6.0,
                                                            std::numeric_limits<double>::digits);
  return {r, -v};
}

struct AreaGrowth {
  int m = 1;
  double r = 0.0;
  double rho = 0.0;   // boundary radius in the z-plane: rho^2 + rho^{2m} = r^2
  double area = 0.0;
  double ratio = 0.0;  // area / (m r^2)
};

/// Area of B_r intersected with the graph of z -> z^m in C^2 = R^4.
inline AreaGrowth euclideanAreaGrowth(int m, double r) {
  if (m < 1) throw InvalidArgument("m must be at least 1");
  if (r < 0) throw InvalidArgument("r must be nonnegative");
  AreaGrowth g{m, r, 0.0, 0.0, 0.0};
  if (r == 0) return g;
  auto boundary = [&](double rho) { return rho * rho + std::pow(rho, 2 * m) - r * r; };
  boost::uintmax_t iters = 200;
  const auto bracket = boost::math::tools::toms748_solve(boundary, 0.0, r, boost::math::tools::eps_tolerance<double>(),
                                                         iters);
  g.rho = 0.5 * (bracket.first + bracket.second);
  const Rule1D rule = gaussLegendre(std::max(16, m + 2), 0.0, g.rho);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double rho = rule.nodes[i];
    s += rule.weights[i] * (1.0 + m * m * std::pow(rho, 2 * m - 2)) * rho;
  }
  g.area = 2 * std::numbers::pi * s;
  g.ratio = g.area / (m * r * r);
  return g;
}

/// Smallest area / (m r^2) over the sampled m and r >= 1.
inline double measuredGrowthConstant(const std::vector<int>& ms, const std::vector<double>& rs) {
  double c = std::numeric_limits<double>::infinity();
  for (int m : ms)
    for (double r : rs)
      if (r >= 1) c = std::min(c, euclideanAreaGrowth(m, r).ratio);
  return c;
}

}  // namespace shrinkers
