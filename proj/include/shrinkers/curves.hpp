#pragma once

// Closed planar shrinking curves by shooting, their spectra, and CSV exchange.
//
// Unit-speed curve with tangent T = (cos t, sin t) and outward normal
// nu = (sin t, -cos t) for counterclockwise traversal, so that convex curves
// have k = t' > 0 and the shrinker equation reads k = <x, nu> / 2. We start on
// the positive x-axis at (2 k0, 0) heading straight up; there <x, T> = 0 and k
// is at an extremum. The curvature is periodic in arclength and each half
// period ends at the next zero of <x, T>. A curve closes after q curvature
// periods when the tangent has turned by 2 pi p in total.

#include <Eigen/Dense>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "shrinkers/errors.hpp"
#include "shrinkers/immersion.hpp"
#include "shrinkers/io.hpp"
#include "shrinkers/mesh.hpp"
#include "shrinkers/sampled.hpp"
#include "shrinkers/spectral.hpp"
#include "shrinkers/stability.hpp"

namespace shrinkers {

inline const double kCircleCurvature = 1.0 / std::numbers::sqrt2;

struct CurveConfig {
  double tolerance = 1e-13;   // absolute and relative error per step
  double max_length = 2000.0;
  double k_min = 1e-6;
  double k_max = 1e6;
  int samples = 1024;          // arclength samples of a closed curve
  int scan_points = 40;        // bracket scan over k0 in shootClosed
};

/// One half period of the curvature, starting at an extremum.
struct CurveTrajectory {
  double k0 = 0.0;
  double half_length = 0.0;
  double half_turn = 0.0;  // increase of the tangent angle over the half period
  bool circular = false;
  std::vector<std::array<double, 4>> states;  // (s, x, y, theta) at accepted steps
};

namespace detail {

using CurveState = std::array<double, 3>;

inline double curveCurvature(const CurveState& z) { return 0.5 * (z[0] * std::sin(z[2]) - z[1] * std::cos(z[2])); }
inline double radialTangent(const CurveState& z) { return z[0] * std::cos(z[2]) + z[1] * std::sin(z[2]); }

struct CurveRhs {
  void operator()(const CurveState& z, CurveState& dz, double /*s*/) const {
    dz = {std::cos(z[2]), std::sin(z[2]), curveCurvature(z)};
  }
};

inline void checkCurvature(const CurveState& z, const CurveConfig& cfg, double s) {
  const double k = curveCurvature(z);
  if (!(k >= cfg.k_min && k <= cfg.k_max))
    throw BlowUp("curvature " + std::to_string(k) + " left [" + std::to_string(cfg.k_min) + ", " +
                 std::to_string(cfg.k_max) + "] at s = " + std::to_string(s));
}

}  // namespace detail

inline CurveTrajectory integrateCurve(double k0, const CurveConfig& cfg = {}) {
  namespace ode = boost::numeric::odeint;
  using detail::CurveState;
  if (!(k0 > 0)) throw InvalidArgument("initial curvature must be positive");
  CurveTrajectory tr;
  tr.k0 = k0;
  CurveState z{2 * k0, 0.0, std::numbers::pi / 2};
  detail::checkCurvature(z, cfg, 0.0);
  const detail::CurveRhs rhs;
  auto stepper = ode::make_controlled(cfg.tolerance, cfg.tolerance, ode::runge_kutta_fehlberg78<CurveState>());
  ode::runge_kutta_fehlberg78<CurveState> plain;
  double s = 0.0, dt = 0.01;
  tr.states.push_back({s, z[0], z[1], z[2]});
  double sign = 0.0, peak = 0.0;
  const double circleLength = 2 * std::numbers::pi * std::numbers::sqrt2;
  while (s < cfg.max_length) {
    const CurveState prev = z;
    const double sPrev = s;
    if (stepper.try_step(rhs, z, s, dt) != ode::success) continue;
    detail::checkCurvature(z, cfg, s);
    tr.states.push_back({s, z[0], z[1], z[2]});
    const double g = detail::radialTangent(z);
    peak = std::max(peak, std::abs(g));
    if (sign == 0.0) {
      if (std::abs(g) > 1e-12) sign = g > 0 ? 1.0 : -1.0;
      // a curve whose <x, T> never leaves rounding level is the circle
      if (s >= circleLength && peak < 1e-10) {
        tr.circular = true;
        tr.half_length = circleLength / 2;
        tr.half_turn = std::numbers::pi;
        return tr;
      }
      continue;
    }
    if (g * sign > 0) continue;
    // bracketed return of <x, T> to zero: refine with fixed steps from prev
    auto at = [&](double h) {
      CurveState w = prev;
      plain.do_step(rhs, w, sPrev, h);
      return w;
    };
    boost::uintmax_t iters = 100;
    const auto root = boost::math::tools::toms748_solve(
        [&](double h) { return detail::radialTangent(at(h)); }, 0.0, s - sPrev, detail::radialTangent(prev), g,
        boost::math::tools::eps_tolerance<double>(52), iters);
    const double h = 0.5 * (root.first + root.second);
    const CurveState end = at(h);
    tr.states.back() = {sPrev + h, end[0], end[1], end[2]};
    tr.half_length = sPrev + h;
    tr.half_turn = end[2] - std::numbers::pi / 2;
    return tr;
  }
  throw BlowUp("no return to the axis within length " + std::to_string(cfg.max_length));
}

struct CurveShrinker {
  int p = 1;  // total tangent turning / 2 pi (rotation index)
  int q = 1;  // curvature periods
  double k0 = kCircleCurvature;
  double length = 0.0;
  double half_length = 0.0;
  std::vector<double> s, x, y, theta, k;  // samples on [0, length)
  int rotation_index = 0;
  int gauss_degree = 0;
  double closure_error = 0.0;
  bool convex = false;
  bool circular = false;
  double residual = 0.0;  // sup |k - <x, nu>/2| on the samples

  int size() const { return static_cast<int>(s.size()); }
  Eigen::Vector2d point(int i) const { return {x[i], y[i]}; }
  Eigen::Vector2d tangent(int i) const { return {std::cos(theta[i]), std::sin(theta[i])}; }
  Eigen::Vector2d normal(int i) const { return {std::sin(theta[i]), -std::cos(theta[i])}; }
};

/// Samples the solution through (2 k0, 0) at `samples` equally spaced
/// arclengths on [0, length) and measures closure at s = length.
inline CurveShrinker sampleCurve(double k0, double length, int p, int q, const CurveConfig& cfg = {}) {
  namespace ode = boost::numeric::odeint;
  using detail::CurveState;
  CurveShrinker c;
  c.p = p;
  c.q = q;
  c.k0 = k0;
  c.length = length;
  const int M = cfg.samples;
  std::vector<double> times(static_cast<std::size_t>(M + 1));
  for (int i = 0; i <= M; ++i) times[static_cast<std::size_t>(i)] = length * i / M;
  CurveState z{2 * k0, 0.0, std::numbers::pi / 2};
  CurveState last{};
  auto stepper = ode::make_controlled(cfg.tolerance, cfg.tolerance, ode::runge_kutta_fehlberg78<CurveState>());
  int idx = 0;
  ode::integrate_times(stepper, detail::CurveRhs{}, z, times.begin(), times.end(), 0.01,
                       [&](const CurveState& w, double s) {
                         if (idx++ == M) {
                           last = w;
                           return;
                         }
                         c.s.push_back(s);
                         c.x.push_back(w[0]);
                         c.y.push_back(w[1]);
                         c.theta.push_back(w[2]);
                         c.k.push_back(detail::curveCurvature(w));
                       });
  const double turn = last[2] - c.theta.front();
  c.rotation_index = static_cast<int>(std::lround(turn / (2 * std::numbers::pi)));
  c.gauss_degree = c.rotation_index;
  c.closure_error = std::hypot(last[0] - c.x.front(), last[1] - c.y.front()) +
                    std::abs(turn - 2 * std::numbers::pi * c.rotation_index);
  c.convex = *std::min_element(c.k.begin(), c.k.end()) > 0;
  for (int i = 0; i < c.size(); ++i)
    c.residual = std::max(c.residual, std::abs(c.k[i] - 0.5 * c.point(i).dot(c.normal(i))));
  return c;
}

inline CurveShrinker circleShrinker(const CurveConfig& cfg = {}) {
  CurveShrinker c = sampleCurve(kCircleCurvature, 2 * std::numbers::pi * std::numbers::sqrt2, 1, 1, cfg);
  c.circular = true;
  c.half_length = c.length / 2;
  return c;
}

/// Finds the closed curve with tangent turning 2 pi p over q curvature
/// periods, taking the smallest k0 in the scan whose bracket closes.
inline CurveShrinker shootClosed(int p, int q, const CurveConfig& cfg = {}) {
  if (p == 1 && q == 1) return circleShrinker(cfg);
  if (p < 1 || q < 2) throw InvalidArgument("non-circular targets need p >= 1 and q >= 2");
  auto mismatch = [&](double k0) { return 2.0 * q * integrateCurve(k0, cfg).half_turn - 2 * std::numbers::pi * p; };
  const double hi = kCircleCurvature - 1e-4;
  const double lo = 0.02;
  double prevK = 0.0, prevG = 0.0;
  bool havePrev = false;
  for (int i = 0; i <= cfg.scan_points; ++i) {
    const double k0 = lo + (hi - lo) * i / cfg.scan_points;
    double g = 0.0;
    try {
      g = mismatch(k0);
    } catch (const BlowUp&) {
      havePrev = false;
      continue;
    }
    if (havePrev && prevG * g <= 0) {
      boost::uintmax_t iters = 200;
      const auto root = boost::math::tools::toms748_solve(mismatch, prevK, k0, prevG, g,
                                                          boost::math::tools::eps_tolerance<double>(), iters);
      const double k = 0.5 * (root.first + root.second);
      const CurveTrajectory tr = integrateCurve(k, cfg);
      CurveShrinker c = sampleCurve(k, 2.0 * q * tr.half_length, p, q, cfg);
      c.half_length = tr.half_length;
      return c;
    }
    prevK = k0;
    prevG = g;
    havePrev = true;
  }
  throw NoRoot("no closing k0 for (p, q) = (" + std::to_string(p) + ", " + std::to_string(q) + ") in [" +
               std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

// ---------------------------------------------------------------------------
// Smooth interpolation of a sampled closed curve.

/// Real Fourier series of a closed curve in R^2 with period `length`.
struct FourierCurve {
  double length = 1.0;
  std::vector<std::array<double, 2>> a, b;  // cosine and sine coefficients per mode

  static FourierCurve fit(const CurveShrinker& c, double cutoff = 1e-16) {
    FourierCurve f;
    f.length = c.length;
    const int M = c.size();
    const int K = M / 2 - 1;
    double scale = 0.0;
    for (int i = 0; i < M; ++i) scale = std::max(scale, c.point(i).norm());
    for (int j = 0; j <= K; ++j) {
      std::array<double, 2> aj{0.0, 0.0}, bj{0.0, 0.0};
      for (int i = 0; i < M; ++i) {
        const double ph = 2 * std::numbers::pi * static_cast<double>((static_cast<long>(i) * j) % M) / M;
        const double cs = std::cos(ph), sn = std::sin(ph);
        aj[0] += c.x[i] * cs;
        aj[1] += c.y[i] * cs;
        bj[0] += c.x[i] * sn;
        bj[1] += c.y[i] * sn;
      }
      const double w = (j == 0 ? 1.0 : 2.0) / M;
      for (int d = 0; d < 2; ++d) {
        aj[d] *= w;
        bj[d] *= w;
      }
      f.a.push_back(aj);
      f.b.push_back(bj);
    }
    // drop the tail below the cutoff
    std::size_t keep = f.a.size();
    while (keep > 1 && std::max({std::abs(f.a[keep - 1][0]), std::abs(f.a[keep - 1][1]), std::abs(f.b[keep - 1][0]),
                                 std::abs(f.b[keep - 1][1])}) < cutoff * scale)
      --keep;
    f.a.resize(keep);
    f.b.resize(keep);
    return f;
  }

  /// Derivatives d^m/du^m, m = 0..4, of both coordinates at u.
  std::array<std::array<double, 5>, 2> derivatives(double u) const {
    std::array<std::array<double, 5>, 2> d{};
    const double om = 2 * std::numbers::pi / length;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double w = om * static_cast<double>(j);
      const double cs = std::cos(w * u), sn = std::sin(w * u);
      // d^m cos(wu) = w^m cos(wu + m pi/2), d^m sin(wu) = w^m sin(wu + m pi/2)
      const double cyc_c[4] = {cs, -sn, -cs, sn};
      const double cyc_s[4] = {sn, cs, -sn, -cs};
      double wm = 1.0;
      for (int m = 0; m <= 4; ++m) {
        for (int k = 0; k < 2; ++k) d[k][m] += wm * (a[j][k] * cyc_c[m % 4] + b[j][k] * cyc_s[m % 4]);
        wm *= w;
      }
    }
    return d;
  }

  int modes() const { return static_cast<int>(a.size()); }
};

namespace detail {

template <class T>
std::array<T, 2> evalFourier(const FourierCurve& f, const T& u) {
  if constexpr (std::is_same_v<T, Jet>) {
    const auto d = f.derivatives(u.value());
    std::array<Jet, 2> out;
    for (int k = 0; k < 2; ++k) {
      std::array<double, Jet::kMaxOrder + 1> t{};
      for (int m = 0; m <= Jet::kMaxOrder; ++m) t[m] = d[k][m] / Jet::factorial(m);
      out[k] = u.compose(t);
    }
    return out;
  } else {
    const auto d = f.derivatives(u);
    return {d[0][0], d[1][0]};
  }
}

}  // namespace detail

inline AnalyticImmersion fourierImmersion(const CurveShrinker& c, const std::string& name = "al-curve") {
  auto f = std::make_shared<const FourierCurve>(FourierCurve::fit(c));
  AnalyticImmersion imm;
  imm.name = name;
  imm.ambient_dim = 2;
  imm.intrinsic_dim = 1;
  imm.topology = Topology::Circle;
  imm.quadrature = {c.size(), 1};
  auto map = [f](auto u, auto) {
    const auto xy = detail::evalFourier(*f, u);
    return std::vector<std::decay_t<decltype(xy[0])>>{xy[0], xy[1]};
  };
  imm.charts.push_back(makeChart(map, {0.0, 0.0}, {c.length, 0.0}, {true, false}, c.length / (2 * std::numbers::pi)));
  return imm;
}

/// The product of a closed curve with the circle of radius sqrt 2, a torus
/// in R^4 that is a shrinker whenever the curve is.
inline AnalyticImmersion curveTimesCircle(const CurveShrinker& c, const std::string& name = "al-curve-x-circle") {
  auto f = std::make_shared<const FourierCurve>(FourierCurve::fit(c));
  AnalyticImmersion imm;
  imm.name = name;
  imm.ambient_dim = 4;
  imm.intrinsic_dim = 2;
  imm.topology = Topology::Torus;
  imm.genus = 1;
  imm.quadrature = {std::max(256, 4 * f->modes()), 32};
  auto map = [f](auto u, auto v) {
    using std::cos;
    using std::sin;
    const auto xy = detail::evalFourier(*f, u);
    using T = std::decay_t<decltype(xy[0])>;
    return std::vector<T>{xy[0], xy[1], std::numbers::sqrt2 * cos(v), std::numbers::sqrt2 * sin(v)};
  };
  imm.charts.push_back(
      makeChart(map, {0.0, 0.0}, {c.length, 2 * std::numbers::pi}, {true, true}, c.length / (2 * std::numbers::pi)));
  return imm;
}

// ---------------------------------------------------------------------------
// Spectra on curves.

inline CurveMesh curveMesh(const CurveShrinker& c) {
  CurveMesh m;
  m.ambient_dim = 2;
  const int M = c.size();
  for (int i = 0; i < M; ++i) {
    m.vertices.push_back(c.point(i));
    m.cells.push_back({i, (i + 1) % M});
  }
  validateMesh(m);
  return m;
}

/// Per-sample geometry: H = k nu, tangent T, |A|^2 = k^2.
inline SampledCurve sampledCurve(const CurveShrinker& c, const std::string& name = "curve") {
  SampledCurve s;
  s.name = name;
  s.mesh = curveMesh(c);
  s.exact_shrinker = true;
  for (int i = 0; i < c.size(); ++i) {
    s.H.push_back(c.k[i] * c.normal(i));
    Eigen::MatrixXd T(2, 1);
    T.col(0) = c.tangent(i);
    s.tangents.push_back(T);
    s.A2.push_back(c.k[i] * c.k[i]);
  }
  return s;
}

inline EigenResult curveDriftSpectrum(const CurveShrinker& c, int count, const SolverOptions& opts = {}) {
  return driftSpectrum(assembleDrift(curveMesh(c)), count, opts);
}

/// L = drift Laplacian + 1/2 + k^2 on the curve, L u = c u, c descending.
inline ScalarStability curveStabilitySpectrum(const CurveShrinker& c, int count, const SolverOptions& opts = {}) {
  return scalarStabilitySpectrum(sampledCurve(c), count, opts);
}

/// Number of nodal domains of a function sampled around a closed curve;
/// values below `hysteresis * max|u|` do not count as a sign.
inline int nodalDomains(const Eigen::VectorXd& u, double hysteresis = 1e-6) {
  const double thr = hysteresis * u.cwiseAbs().maxCoeff();
  std::vector<int> signs;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (std::abs(u[i]) > thr) signs.push_back(u[i] > 0 ? 1 : -1);
  if (signs.empty()) return 1;
  int changes = 0;
  for (std::size_t i = 0; i < signs.size(); ++i)
    if (signs[i] != signs[(i + 1) % signs.size()]) ++changes;
  return std::max(1, changes);
}

struct CurveVerdict {
  std::string name;
  double c2 = 0.0;  // second stability eigenvalue
  bool flagged = false;
};

/// Flags a curve as F-unstable when an eigenvalue of L lies in (1/2, 1),
/// with `margin` kept away from both ends.
inline std::vector<CurveVerdict> classifyStableCurves(const std::vector<std::pair<std::string, CurveShrinker>>& curves,
                                                      double margin = 1e-3) {
  std::vector<CurveVerdict> out;
  for (const auto& [name, c] : curves) {
    const EigenResult r = curveStabilitySpectrum(c, 6).spectrum;
    CurveVerdict v{name, r.values[1], false};
    for (int i = 0; i < r.count(); ++i)
      if (r.values[i] > 0.5 + margin && r.values[i] < 1.0 - margin) v.flagged = true;
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV exchange: s, x, y, theta, k.

inline void writeCurveCsv(const CurveShrinker& c, const std::string& path) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "# closed shrinking curve: p=" << c.p << " q=" << c.q << " length=" << std::setprecision(17) << c.length
      << "\n# columns: arclength s, position x, position y, tangent angle theta, curvature k\n";
  out << "s,x,y,theta,k\n";
  for (int i = 0; i < c.size(); ++i)
    out << c.s[i] << ',' << c.x[i] << ',' << c.y[i] << ',' << c.theta[i] << ',' << c.k[i] << '\n';
  writeFileAtomic(path, out.str());
}

/// Reads a curve written by writeCurveCsv; the total length is taken from the
/// header (or extrapolated from uniform spacing when absent).
inline CurveShrinker readCurveCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  CurveShrinker c;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      hs.imbue(std::locale::classic());
      std::string tok;
      while (hs >> tok) {
        if (tok.rfind("p=", 0) == 0) c.p = std::stoi(tok.substr(2));
        if (tok.rfind("q=", 0) == 0) c.q = std::stoi(tok.substr(2));
        if (tok.rfind("length=", 0) == 0) c.length = std::stod(tok.substr(7));
      }
      continue;
    }
    if (!header) {
      if (line != "s,x,y,theta,k") throw ParseError(path + ": unexpected header '" + line + "'");
      header = true;
      continue;
    }
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::array<double, 5> v{};
    char comma = 0;
    for (int i = 0; i < 5; ++i) {
      if (!(ls >> v[static_cast<std::size_t>(i)])) throw ParseError(path + ": bad row '" + line + "'");
      if (i < 4 && (!(ls >> comma) || comma != ',')) throw ParseError(path + ": bad row '" + line + "'");
    }
    c.s.push_back(v[0]);
    c.x.push_back(v[1]);
    c.y.push_back(v[2]);
    c.theta.push_back(v[3]);
    c.k.push_back(v[4]);
  }
  if (c.size() < 3) throw ParseError(path + ": fewer than three samples");
  if (c.length <= 0) c.length = c.s.back() + (c.s[1] - c.s[0]);
  const double turn = c.theta.back() - c.theta.front() + (c.theta[1] - c.theta[0]);
  c.rotation_index = static_cast<int>(std::lround(turn / (2 * std::numbers::pi)));
  c.gauss_degree = c.rotation_index;
  c.convex = *std::min_element(c.k.begin(), c.k.end()) > 0;
  c.k0 = c.k.front();
  c.circular = c.p == 1 && c.q == 1;
  for (int i = 0; i < c.size(); ++i)
    c.residual = std::max(c.residual, std::abs(c.k[i] - 0.5 * c.point(i).dot(c.normal(i))));
  return c;
}

}  // namespace shrinkers
