#pragma once

// Chart-based immersed curves and surfaces in R^N and their pointwise
// differential geometry.
//
// Conventions used throughout the library:
//   A(X, Y) = (D_X Y)^perp                (second fundamental form)
//   H       = -trace A                    (so H = x^perp / 2 on shrinkers)
//   f       = |x|^2 / 4,  weight e^{-f}

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shrinkers/errors.hpp"
#include "shrinkers/jet.hpp"
#include "shrinkers/quadrature.hpp"

namespace shrinkers {

enum class Topology { Open, Circle, Sphere, Torus };
enum class DerivativeMode { ClosedForm, FiniteDifference };

struct ParamPoint {
  int chart = 0;
  double u = 0.0;
  double v = 0.0;
};

struct Chart {
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 1.0};
  std::array<bool, 2> periodic{false, false};
  std::function<Eigen::VectorXd(double, double)> map;
  std::function<JetVec(const Jet&, const Jet&)> jet_map;  // empty: finite differences only
  double scale = 1.0;
};

struct QuadratureSpec {
  int nodes_u = 64;
  int nodes_v = 64;
};

struct AnalyticImmersion {
  std::string name;
  int ambient_dim = 0;
  int intrinsic_dim = 0;
  std::vector<Chart> charts;
  Topology topology = Topology::Open;
  std::optional<int> genus;
  QuadratureSpec quadrature;
  // Topology::Sphere only: regular parameters (in another chart) of the two
  // points where chart 0 degenerates.
  std::array<ParamPoint, 2> poles{};

  int codimension() const { return ambient_dim - intrinsic_dim; }
  bool closed() const { return topology != Topology::Open; }
  Eigen::VectorXd position(const ParamPoint& p) const {
    return charts.at(p.chart).map(p.u, p.v);
  }
};

/// Builds a chart from a generic callable `f(u, v)` returning a container of
/// scalars; it is instantiated once for double and once for Jet.
template <class F>
Chart makeChart(F f, std::array<double, 2> lower, std::array<double, 2> upper,
                std::array<bool, 2> periodic, double scale = 1.0) {
  Chart c;
  c.lower = lower;
  c.upper = upper;
  c.periodic = periodic;
  c.scale = scale;
  c.map = [f](double u, double v) {
    const auto r = f(u, v);
    Eigen::VectorXd out(static_cast<Eigen::Index>(r.size()));
    Eigen::Index i = 0;
    for (double x : r) out[i++] = x;
    return out;
  };
  c.jet_map = [f](const Jet& u, const Jet& v) {
    const auto r = f(u, v);
    return JetVec(r.begin(), r.end());
  };
  return c;
}

struct DerivativeOptions {
  DerivativeMode mode = DerivativeMode::ClosedForm;
  double step = 0.0;  // finite-difference step; 0 selects eps^{1/(4+d)} * scale
};

inline Eigen::VectorXd values(const JetVec& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].value();
  return out;
}

namespace detail {

/// Weights of the central stencil on points -m..m approximating the d-th
/// derivative with O(h^4) truncation error.
inline std::vector<double> centralStencil(int d) {
  if (d == 0) return {1.0};
  const int m = (d - 1) / 2 + 2;
  const int npts = 2 * m + 1;
  Eigen::MatrixXd V(npts, npts);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(npts);
  for (int p = 0; p < npts; ++p)
    for (int k = 0; k < npts; ++k) V(p, k) = std::pow(static_cast<double>(k - m), p);
  rhs[d] = Jet::factorial(d);
  const Eigen::VectorXd w = V.fullPivLu().solve(rhs);
  return {w.data(), w.data() + npts};
}

inline const std::vector<double>& stencil(int d) {
  static const std::array<std::vector<double>, Jet::kMaxOrder + 1> table = [] {
    std::array<std::vector<double>, Jet::kMaxOrder + 1> t;
    for (int d = 0; d <= Jet::kMaxOrder; ++d) t[d] = centralStencil(d);
    return t;
  }();
  return table[d];
}

}  // namespace detail

/// Taylor jet of the chart map at `p`, valid to `order`.
inline JetVec localJet(const AnalyticImmersion& imm, const ParamPoint& p, int order,
                       const DerivativeOptions& opts = {}) {
  const Chart& chart = imm.charts.at(p.chart);
  const bool curve = imm.intrinsic_dim == 1;
  if (opts.mode == DerivativeMode::ClosedForm && chart.jet_map) {
    const Jet u = Jet::variable(p.u, 0, order);
    Jet v = curve ? Jet(p.v) : Jet::variable(p.v, 1, order);
    if (curve) v.setOrder(order);
    JetVec x = chart.jet_map(u, v);
    for (Jet& c : x) c.setOrder(std::min(c.order(), order));
    return x;
  }
  const int N = imm.ambient_dim;
  JetVec x(N);
  for (Jet& c : x) c.setOrder(order);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int d = 0; d <= order; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      if (curve && j > 0) continue;
      const double h =
          opts.step > 0.0 ? opts.step : std::pow(eps, 1.0 / (4.0 + d)) * chart.scale;
      const auto& wu = detail::stencil(i);
      const auto& wv = detail::stencil(j);
      const int mu = static_cast<int>(wu.size()) / 2, mv = static_cast<int>(wv.size()) / 2;
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(N);
      for (int a = 0; a < static_cast<int>(wu.size()); ++a) {
        if (wu[a] == 0.0) continue;
        for (int b = 0; b < static_cast<int>(wv.size()); ++b) {
          if (wv[b] == 0.0) continue;
          acc += (wu[a] * wv[b]) * chart.map(p.u + (a - mu) * h, p.v + (b - mv) * h);
        }
      }
      acc /= std::pow(h, d) * Jet::factorial(i) * Jet::factorial(j);
      for (int k = 0; k < N; ++k) x[k].coeff(i, j) = acc[k];
    }
  }
  return x;
}

/// Jets of every chart-level geometric quantity at one point. Index
/// conventions: a, b, c are chart coordinates; vectors live in R^N.
struct LocalGeometry {
  int n = 0;
  int N = 0;
  int order = 0;
  JetVec x;
  std::vector<JetVec> dx;                // [a]
  std::vector<std::vector<JetVec>> ddx;  // [a][b]
  std::vector<std::vector<Jet>> g;       // [a][b]
  std::vector<std::vector<Jet>> ginv;    // [a][b]
  std::vector<std::vector<JetVec>> A;    // [a][b], coordinate components
  JetVec H;
  std::vector<std::vector<std::vector<Jet>>> gamma;  // [c][a][b]
  std::vector<Jet> xT;                               // (x^T)^a

  JetVec tangentPart(const JetVec& U) const {
    JetVec out(N, Jet(0.0));
    for (int a = 0; a < n; ++a) {
      Jet coef(0.0);
      for (int b = 0; b < n; ++b) coef += ginv[a][b] * dot(dx[b], U);
      for (int k = 0; k < N; ++k) out[k] += coef * dx[a][k];
    }
    return out;
  }
  JetVec normalPart(const JetVec& U) const {
    JetVec t = tangentPart(U);
    JetVec out(U);
    for (int k = 0; k < N; ++k) out[k] -= t[k];
    return out;
  }
  /// Chart components X^a of the tangent part of an ambient vector.
  std::vector<Jet> tangentCoords(const JetVec& U) const {
    std::vector<Jet> out(n, Jet(0.0));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out[a] += ginv[a][b] * dot(dx[b], U);
    return out;
  }
};

inline LocalGeometry localGeometry(const AnalyticImmersion& imm, const ParamPoint& p,
                                   int order, const DerivativeOptions& opts = {}) {
  if (order < 2) throw DerivativeOrderUnavailable("local geometry needs jets of order >= 2");
  LocalGeometry G;
  G.n = imm.intrinsic_dim;
  G.N = imm.ambient_dim;
  G.order = order;
  const int n = G.n, N = G.N;
  G.x = localJet(imm, p, order, opts);
  G.dx.resize(n);
  for (int a = 0; a < n; ++a) G.dx[a] = partial(G.x, a);
  G.ddx.assign(n, std::vector<JetVec>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) G.ddx[a][b] = partial(G.dx[a], b);
  G.g.assign(n, std::vector<Jet>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) G.g[a][b] = dot(G.dx[a], G.dx[b]);

  const double scale = imm.charts.at(p.chart).scale;
  double det0 = 0.0;
  G.ginv.assign(n, std::vector<Jet>(n));
  if (n == 1) {
    det0 = G.g[0][0].value();
    if (!(det0 > 1e-12 * std::pow(scale, 4)))
      throw DegenerateImmersion("first fundamental form is singular at (" +
                                std::to_string(p.u) + ")");
    G.ginv[0][0] = G.g[0][0].reciprocal();
  } else {
    const Jet det = G.g[0][0] * G.g[1][1] - G.g[0][1] * G.g[1][0];
    det0 = det.value();
    if (!(det0 > 1e-12 * std::pow(scale, 4)))
      throw DegenerateImmersion("first fundamental form is singular at (" +
                                std::to_string(p.u) + ", " + std::to_string(p.v) + ")");
    const Jet inv = det.reciprocal();
    G.ginv[0][0] = G.g[1][1] * inv;
    G.ginv[1][1] = G.g[0][0] * inv;
    G.ginv[0][1] = -(G.g[0][1] * inv);
    G.ginv[1][0] = G.ginv[0][1];
  }

  G.A.assign(n, std::vector<JetVec>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) G.A[a][b] = G.normalPart(G.ddx[a][b]);
  G.H.assign(N, Jet(0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < N; ++k) G.H[k] -= G.ginv[a][b] * G.A[a][b][k];

  G.gamma.assign(n, std::vector<std::vector<Jet>>(n, std::vector<Jet>(n, Jet(0.0))));
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) G.gamma[c][a][b] += G.ginv[c][d] * dot(G.dx[d], G.ddx[a][b]);
  G.xT = G.tangentCoords(G.x);
  return G;
}

// ---------------------------------------------------------------------------
// Frames and pointwise data.

struct Frame {
  Eigen::VectorXd point;
  Eigen::MatrixXd tangents;  // N x n, orthonormal
  Eigen::MatrixXd normals;   // N x (N - n), orthonormal

  /// J on an oriented rank-2 normal plane: J nu_1 = nu_2, J nu_2 = -nu_1.
  Eigen::VectorXd rotateNormal(const Eigen::VectorXd& w) const {
    return normals.col(1) * normals.col(0).dot(w) - normals.col(0) * normals.col(1).dot(w);
  }
};

namespace detail {

/// Orthonormal tangent frame e = dx * E^T with E = L^{-1}, g = L L^T
/// (Gram–Schmidt on the coordinate vectors in chart order).
inline Eigen::MatrixXd tangentFrameCoefficients(const Eigen::MatrixXd& g) {
  const Eigen::MatrixXd L = g.llt().matrixL();
  return L.inverse();
}

/// Normal frame: polar orthonormalization of P^perp S, where S is the first
/// subset of the ambient basis (lexicographic order) whose projection is well
/// conditioned. Codimension 1 and 2 frames are oriented so that
/// det[e_1..e_n, nu_1..] > 0.
inline Eigen::MatrixXd normalFrame(const Eigen::MatrixXd& tangents) {
  const int N = static_cast<int>(tangents.rows()), n = static_cast<int>(tangents.cols());
  const int k = N - n;
  if (k == 0) return Eigen::MatrixXd(N, 0);
  const Eigen::MatrixXd Pperp =
      Eigen::MatrixXd::Identity(N, N) - tangents * tangents.transpose();
  std::vector<int> subset(k);
  for (int i = 0; i < k; ++i) subset[i] = i;
  Eigen::MatrixXd best;
  double best_sigma = -1.0;
  while (true) {
    Eigen::MatrixXd S(N, k);
    for (int i = 0; i < k; ++i) S.col(i) = Pperp.col(subset[i]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma = svd.singularValues()[k - 1];
    if (sigma > best_sigma) {
      best_sigma = sigma;
      best = svd.matrixU() * svd.matrixV().transpose();
    }
    if (sigma >= 0.25) break;
    int pos = k - 1;
    while (pos >= 0 && subset[pos] == N - k + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (int i = pos + 1; i < k; ++i) subset[i] = subset[i - 1] + 1;
  }
  if (k <= 2) {
    Eigen::MatrixXd full(N, N);
    full << tangents, best;
    if (full.determinant() < 0.0) best.col(k - 1) *= -1.0;
  }
  return best;
}

}  // namespace detail

struct FundamentalData {
  Frame frame;
  Eigen::MatrixXd metric;           // g_ab (chart coordinates)
  Eigen::MatrixXd frameCoefficients;  // E with e_i = sum_a E_ia d_a x
  std::vector<Eigen::VectorXd> A;   // A(e_i, e_j) at index i * n + j
  Eigen::VectorXd H;
  Eigen::VectorXd x_tangent;
  Eigen::VectorXd x_normal;
  double f = 0.0;
  double weight = 0.0;
  double A_norm_sq = 0.0;
  Eigen::MatrixXd A_H;   // <A_ij, H>
  Eigen::MatrixXd A_sq;  // sum_k <A_ik, A_kj>

  int n() const { return static_cast<int>(metric.rows()); }
  const Eigen::VectorXd& Aij(int i, int j) const { return A[static_cast<std::size_t>(i * n() + j)]; }
  /// Component <A(e_i, e_j), nu_alpha>.
  double Acomponent(int i, int j, int alpha) const {
    return Aij(i, j).dot(frame.normals.col(alpha));
  }
  double areaElement() const { return std::sqrt(metric.determinant()); }
};

/// Evaluates an ambient-vector-valued coordinate tensor T_ab in the frame.
inline Eigen::VectorXd frameComponent(const Eigen::MatrixXd& E,
                                      const std::vector<std::vector<Eigen::VectorXd>>& T,
                                      int i, int j) {
  const int n = static_cast<int>(E.rows());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(T[0][0].size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out += E(i, a) * E(j, b) * T[a][b];
  return out;
}

inline FundamentalData fundamentalDataFromGeometry(const LocalGeometry& G) {
  const int n = G.n, N = G.N;
  FundamentalData fd;
  fd.frame.point = values(G.x);
  fd.metric.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) fd.metric(a, b) = G.g[a][b].value();
  fd.frameCoefficients = detail::tangentFrameCoefficients(fd.metric);
  Eigen::MatrixXd dx(N, n);
  for (int a = 0; a < n; ++a) dx.col(a) = values(G.dx[a]);
  fd.frame.tangents = dx * fd.frameCoefficients.transpose();
  fd.frame.normals = detail::normalFrame(fd.frame.tangents);

  std::vector<std::vector<Eigen::VectorXd>> Acoord(n, std::vector<Eigen::VectorXd>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) Acoord[a][b] = values(G.A[a][b]);
  fd.A.resize(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      fd.A[static_cast<std::size_t>(i * n + j)] = frameComponent(fd.frameCoefficients, Acoord, i, j);

  fd.H = values(G.H);
  const Eigen::VectorXd& x = fd.frame.point;
  fd.x_tangent = fd.frame.tangents * (fd.frame.tangents.transpose() * x);
  fd.x_normal = x - fd.x_tangent;
  fd.f = 0.25 * x.squaredNorm();
  fd.weight = std::exp(-fd.f);
  fd.A_H.resize(n, n);
  fd.A_sq.resize(n, n);
  fd.A_norm_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      fd.A_H(i, j) = fd.Aij(i, j).dot(fd.H);
      fd.A_norm_sq += fd.Aij(i, j).squaredNorm();
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += fd.Aij(i, k).dot(fd.Aij(k, j));
      fd.A_sq(i, j) = s;
    }
  }
  return fd;
}

inline FundamentalData fundamentalData(const AnalyticImmersion& imm, const ParamPoint& p,
                                       const DerivativeOptions& opts = {}) {
  return fundamentalDataFromGeometry(localGeometry(imm, p, 2, opts));
}

inline Frame evalFrame(const AnalyticImmersion& imm, const ParamPoint& p,
                       const DerivativeOptions& opts = {}) {
  const JetVec x = localJet(imm, p, 1, opts);
  const int n = imm.intrinsic_dim, N = imm.ambient_dim;
  Eigen::MatrixXd dx(N, n);
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < N; ++k) dx(k, a) = a == 0 ? x[k].coeff(1, 0) : x[k].coeff(0, 1);
  const Eigen::MatrixXd g = dx.transpose() * dx;
  const double scale = imm.charts.at(p.chart).scale;
  if (!(g.determinant() > 1e-12 * std::pow(scale, 4)))
    throw DegenerateImmersion("first fundamental form is singular");
  Frame fr;
  fr.point = values(x);
  fr.tangents = dx * detail::tangentFrameCoefficients(g).transpose();
  fr.normals = detail::normalFrame(fr.tangents);
  return fr;
}

// ---------------------------------------------------------------------------
// Quadrature over the primary chart.

struct QuadratureNode {
  ParamPoint param;
  Eigen::VectorXd x;
  double weight = 0.0;  // parameter weight times area element
};

/// Tensor rule on chart 0: Gauss–Legendre on bounded axes, uniform nodes on
/// periodic axes. `refine` multiplies the node counts.
inline std::vector<QuadratureNode> quadratureNodes(const AnalyticImmersion& imm, int refine = 1,
                                                   const DerivativeOptions& opts = {}) {
  const Chart& c = imm.charts.at(0);
  auto rule = [&](int axis, int count) {
    return c.periodic[axis] ? periodicTrapezoid(count, c.lower[axis], c.upper[axis] - c.lower[axis])
                            : gaussLegendre(count, c.lower[axis], c.upper[axis]);
  };
  const Rule1D ru = rule(0, imm.quadrature.nodes_u * refine);
  Rule1D rv;
  if (imm.intrinsic_dim == 2)
    rv = rule(1, imm.quadrature.nodes_v * refine);
  else
    rv = Rule1D{{0.0}, {1.0}};
  std::vector<QuadratureNode> nodes;
  nodes.reserve(ru.nodes.size() * rv.nodes.size());
  for (std::size_t i = 0; i < ru.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rv.nodes.size(); ++j) {
      QuadratureNode q;
      q.param = {0, ru.nodes[i], rv.nodes[j]};
      const JetVec x = localJet(imm, q.param, 1, opts);
      Eigen::MatrixXd dx(imm.ambient_dim, imm.intrinsic_dim);
      for (int k = 0; k < imm.ambient_dim; ++k) {
        dx(k, 0) = x[k].coeff(1, 0);
        if (imm.intrinsic_dim == 2) dx(k, 1) = x[k].coeff(0, 1);
      }
      q.x = values(x);
      q.weight = ru.weights[i] * rv.weights[j] * std::sqrt((dx.transpose() * dx).determinant());
      nodes.push_back(std::move(q));
    }
  }
  return nodes;
}

struct ShrinkerResidual {
  double sup = 0.0;
  double mean = 0.0;
  double l2_gaussian = 0.0;  // ((4 pi)^{-n/2} int |H - x^perp/2|^2 e^{-f})^{1/2}
};

inline double gaussianNormalization(int n) { return std::pow(4.0 * std::numbers::pi, -0.5 * n); }

inline ShrinkerResidual shrinkerResidual(const AnalyticImmersion& imm,
                                         const DerivativeOptions& opts = {}) {
  ShrinkerResidual r;
  const auto nodes = quadratureNodes(imm, 1, opts);
  double l2 = 0.0;
  for (const auto& q : nodes) {
    const FundamentalData fd = fundamentalData(imm, q.param, opts);
    const double res = (fd.H - 0.5 * fd.x_normal).norm();
    r.sup = std::max(r.sup, res);
    r.mean += res;
    l2 += res * res * fd.weight * q.weight;
  }
  r.mean /= static_cast<double>(nodes.size());
  r.l2_gaussian = std::sqrt(gaussianNormalization(imm.intrinsic_dim) * l2);
  return r;
}

}  // namespace shrinkers
