#pragma once

// Residual checks of pointwise identities on analytic fixtures.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "shrinkers/immersion.hpp"
#include "shrinkers/normal_calculus.hpp"

namespace shrinkers {

struct IdentityReport {
  std::string identity;
  std::string fixture;
  double sup = 0.0;
  double mean = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline IdentityReport makeIdentityReport(std::string identity, std::string fixture,
                                         const std::vector<double>& residuals, double tol) {
  IdentityReport r{std::move(identity), std::move(fixture), 0.0, 0.0, tol, false};
  for (double v : residuals) {
    r.sup = std::max(r.sup, v);
    r.mean += v;
  }
  if (!residuals.empty()) r.mean /= static_cast<double>(residuals.size());
  r.pass = r.sup < tol;
  return r;
}

/// Midpoint grid on chart 0: never touches a chart boundary, so sphere-type
/// charts stay away from their poles.
inline std::vector<ParamPoint> sampleGrid(const AnalyticImmersion& imm, int nu = 12, int nv = 12) {
  const Chart& c = imm.charts.at(0);
  if (imm.intrinsic_dim == 1) nv = 1;
  std::vector<ParamPoint> grid;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double u = c.lower[0] + (i + 0.5) / nu * (c.upper[0] - c.lower[0]);
      const double v = imm.intrinsic_dim == 1 ? 0.0 : c.lower[1] + (j + 0.5) / nv * (c.upper[1] - c.lower[1]);
      grid.push_back({0, u, v});
    }
  return grid;
}

enum class ShrinkerIdentities {
  Require,   // throw NotAShrinker on non-shrinker input
  Skip,      // report only the identities valid on every immersion
  Evaluate,  // report them anyway (failure-contrast runs)
};

struct IdentityOptions {
  DerivativeOptions derivatives;
  double tolerance = 1e-8;
  ShrinkerIdentities shrinker = ShrinkerIdentities::Require;
  double shrinker_threshold = 1e-6;
};

namespace detail {

inline Eigen::MatrixXd valueMatrix(const std::vector<std::vector<Jet>>& T) {
  const int n = static_cast<int>(T.size());
  Eigen::MatrixXd M(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) M(a, b) = T[a][b].value();
  return M;
}

inline Eigen::MatrixXd scalarHessian(const LocalGeometry& G, const Jet& phi) {
  const NormalTensor DD = covariantDerivative(G, covariantDerivative(G, scalarTensor(phi)));
  const int n = G.n;
  Eigen::MatrixXd M(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) M(a, b) = DD.comps[static_cast<std::size_t>(a * n + b)][0].value();
  return 0.5 * (M + M.transpose());
}

inline double shrinkerDefect(const FundamentalData& fd) { return (fd.H - 0.5 * fd.x_normal).norm(); }

inline void requireShrinker(const AnalyticImmersion& imm, const std::vector<ParamPoint>& grid,
                            const IdentityOptions& opts) {
  for (const auto& p : grid) {
    const double d = shrinkerDefect(fundamentalData(imm, p, opts.derivatives));
    if (d > opts.shrinker_threshold)
      throw NotAShrinker(imm.name + ": |H - x^perp/2| = " + std::to_string(d) + " at a sample");
  }
}

}  // namespace detail

/// Eigenvalues of Hess_f + Ric in an orthonormal frame at one point.
inline Eigen::VectorXd solitonEigenvalues(const AnalyticImmersion& imm, const ParamPoint& p,
                                          const DerivativeOptions& opts = {}) {
  const LocalGeometry G = localGeometry(imm, p, 3, opts);
  const FundamentalData fd = fundamentalDataFromGeometry(G);
  const Jet f = 0.25 * dot(G.x, G.x);
  const Eigen::MatrixXd& E = fd.frameCoefficients;
  const Eigen::MatrixXd T = toFrame(E, detail::scalarHessian(G, f) + ricciFromMetric(G));
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T).eigenvalues();
}

inline std::vector<IdentityReport> checkPointwiseIdentities(const AnalyticImmersion& imm,
                                                            const std::vector<ParamPoint>& grid,
                                                            const IdentityOptions& opts = {}) {
  bool shrinkerOnly = opts.shrinker != ShrinkerIdentities::Skip;
  if (opts.shrinker == ShrinkerIdentities::Require) detail::requireShrinker(imm, grid, opts);

  const int n = imm.intrinsic_dim, N = imm.ambient_dim;
  std::vector<double> hessF, hessX2, ricci, scalar, corPhi, corBound, dH, dV;
  for (const auto& p : grid) {
    const LocalGeometry G = localGeometry(imm, p, 3, opts.derivatives);
    const FundamentalData fd = fundamentalDataFromGeometry(G);
    const Eigen::MatrixXd& E = fd.frameCoefficients;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

    const Eigen::MatrixXd HessF = toFrame(E, detail::scalarHessian(G, 0.25 * dot(G.x, G.x)));
    const Eigen::MatrixXd HessX2 = toFrame(E, detail::scalarHessian(G, dot(G.x, G.x)));
    const Eigen::MatrixXd Ric = toFrame(E, ricciFromMetric(G));
    Eigen::MatrixXd xA(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) xA(i, j) = fd.x_normal.dot(fd.Aij(i, j));

    hessF.push_back((HessF - fd.A_H - 0.5 * I).norm());
    hessX2.push_back((HessX2 - 2.0 * I - 2.0 * xA).norm());
    ricci.push_back((Ric + fd.A_sq + fd.A_H).norm());
    scalar.push_back(std::abs(Ric.trace() - (fd.H.squaredNorm() - fd.A_norm_sq)));
    corPhi.push_back((HessF + Ric - 0.5 * I + fd.A_sq).norm());
    const Eigen::MatrixXd S = HessF + Ric - 0.5 * I;
    corBound.push_back(std::max(0.0, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues().maxCoeff()));

    // Ambient derivative of H and normal derivative of V^perp along e_i.
    std::vector<Eigen::VectorXd> dHc(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) dHc[static_cast<std::size_t>(a)] = values(partial(G.H, a));
    double worstH = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd lhs = Eigen::VectorXd::Zero(N);
      for (int a = 0; a < n; ++a) lhs += E(i, a) * dHc[static_cast<std::size_t>(a)];
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
      for (int j = 0; j < n; ++j) {
        rhs -= fd.H.dot(fd.Aij(i, j)) * fd.frame.tangents.col(j);
        rhs -= 0.5 * fd.frame.tangents.col(j).dot(fd.x_tangent) * fd.Aij(i, j);
      }
      worstH = std::max(worstH, (lhs - rhs).norm());
    }
    dH.push_back(worstH);

    double worstV = 0.0;
    for (int k = 0; k < N; ++k) {
      JetVec V(N, Jet(0.0));
      V[k] = Jet(1.0);
      const JetVec Vperp = G.normalPart(V);
      const Eigen::VectorXd Vt = fd.frame.tangents.transpose().col(k);  // <V, e_j>
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd lhs = Eigen::VectorXd::Zero(N);
        for (int a = 0; a < n; ++a) lhs += E(i, a) * values(partial(Vperp, a));
        lhs -= fd.frame.tangents * (fd.frame.tangents.transpose() * lhs);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
        for (int j = 0; j < n; ++j) rhs -= Vt[j] * fd.Aij(i, j);
        worstV = std::max(worstV, (lhs - rhs).norm());
      }
    }
    dV.push_back(worstV);
  }

  const double tol = opts.tolerance;
  std::vector<IdentityReport> out;
  if (shrinkerOnly) out.push_back(makeIdentityReport("hessian-f-minus-AH", imm.name, hessF, tol));
  out.push_back(makeIdentityReport("hessian-norm-squared", imm.name, hessX2, tol));
  out.push_back(makeIdentityReport("gauss-ricci", imm.name, ricci, tol));
  out.push_back(makeIdentityReport("gauss-scalar", imm.name, scalar, tol));
  if (shrinkerOnly) {
    out.push_back(makeIdentityReport("hessian-f-plus-ricci", imm.name, corPhi, tol));
    out.push_back(makeIdentityReport("hessian-f-plus-ricci-bound", imm.name, corBound, tol));
    out.push_back(makeIdentityReport("derivative-of-H", imm.name, dH, tol));
  }
  out.push_back(makeIdentityReport("derivative-of-translation", imm.name, dV, tol));
  return out;
}

/// L H = H, L V^perp = V^perp / 2 for every basis vector, and the equation
/// for L A, all evaluated from order-4 jets.
inline std::vector<IdentityReport> checkSimonsEquations(const AnalyticImmersion& imm,
                                                        const std::vector<ParamPoint>& grid,
                                                        IdentityOptions opts = {}) {
  if (opts.shrinker != ShrinkerIdentities::Evaluate) detail::requireShrinker(imm, grid, opts);
  const int n = imm.intrinsic_dim, N = imm.ambient_dim;
  std::vector<double> resH, resV, resA;
  for (const auto& p : grid) {
    const LocalGeometry G = localGeometry(imm, p, 4, opts.derivatives);
    const FundamentalData fd = fundamentalDataFromGeometry(G);
    const Eigen::MatrixXd& E = fd.frameCoefficients;

    const NormalTensor LH = stabilityOperator(G, sectionTensor(G.H));
    resH.push_back((values(LH.comps[0]) - fd.H).norm());

    double worstV = 0.0;
    for (int k = 0; k < N; ++k) {
      JetVec V(N, Jet(0.0));
      V[k] = Jet(1.0);
      const JetVec Vperp = G.normalPart(V);
      const NormalTensor LV = stabilityOperator(G, sectionTensor(Vperp));
      worstV = std::max(worstV, (values(LV.comps[0]) - 0.5 * values(Vperp)).norm());
    }
    resV.push_back(worstV);

    NormalTensor At{2, true, {}};
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) At.comps.push_back(G.A[a][b]);
    const NormalTensor LA = stabilityOperator(G, At);
    std::vector<std::vector<Eigen::VectorXd>> LAc(n, std::vector<Eigen::VectorXd>(n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) LAc[a][b] = values(LA.comps[static_cast<std::size_t>(a * n + b)]);
    double worstA = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd rhs = fd.Aij(i, j);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            rhs += 2.0 * fd.Aij(j, l).dot(fd.Aij(i, k)) * fd.Aij(l, k);
            rhs -= fd.Aij(k, l).dot(fd.Aij(i, l)) * fd.Aij(j, k);
            rhs -= fd.Aij(j, l).dot(fd.Aij(k, l)) * fd.Aij(k, i);
          }
        worstA = std::max(worstA, (frameComponent(E, LAc, i, j) - rhs).norm());
      }
    resA.push_back(worstA);
  }
  std::vector<IdentityReport> out;
  out.push_back(makeIdentityReport("simons-LH", imm.name, resH, opts.tolerance));
  out.push_back(makeIdentityReport("simons-LV", imm.name, resV, opts.tolerance));
  out.push_back(makeIdentityReport("simons-LA", imm.name, resA, opts.tolerance));
  return out;
}

struct SphericalEquivalence {
  IdentityReport shrinker;         // |H - x^perp / 2|
  IdentityReport minimalInSphere;  // mean curvature inside the sphere
  IdentityReport umbilicAH;        // |A^H + g / 2|
  bool agree = false;
};

inline SphericalEquivalence sphericalEquivalence(const AnalyticImmersion& imm,
                                                 const std::vector<ParamPoint>& grid,
                                                 double tol = 1e-8, const DerivativeOptions& d = {}) {
  const int n = imm.intrinsic_dim;
  std::vector<double> a, b, c;
  for (const auto& p : grid) {
    const FundamentalData fd = fundamentalData(imm, p, d);
    const Eigen::VectorXd& x = fd.frame.point;
    if (std::abs(x.squaredNorm() - 2.0 * n) > 1e-6)
      throw NotSpherical(imm.name + ": |x|^2 - 2n = " + std::to_string(x.squaredNorm() - 2.0 * n));
    a.push_back((fd.H - 0.5 * fd.x_normal).norm());
    b.push_back((fd.H - fd.H.dot(x) / x.squaredNorm() * x).norm());
    c.push_back((fd.A_H + 0.5 * Eigen::MatrixXd::Identity(n, n)).norm());
  }
  SphericalEquivalence r;
  r.shrinker = makeIdentityReport("sphere-shrinker", imm.name, a, tol);
  r.minimalInSphere = makeIdentityReport("sphere-minimal", imm.name, b, tol);
  r.umbilicAH = makeIdentityReport("sphere-AH", imm.name, c, tol);
  r.agree = r.shrinker.pass == r.minimalInSphere.pass && r.shrinker.pass == r.umbilicAH.pass;
  return r;
}

struct Torsion {
  double derivative = 0.0;   // <nabla^perp_V N, B>
  double closedForm = 0.0;   // -<A(x^T, V), B> / (2 |H|); meaningful on shrinkers
  double derivativeOpposite = 0.0;  // same with B replaced by -B (other orientation of J)
};

/// Torsion of an oriented codimension-2 immersion along the tangent vector
/// V in R^N (only its tangential part is used).
inline Torsion frenetTorsion(const AnalyticImmersion& imm, const Eigen::VectorXd& V,
                             const ParamPoint& p, const DerivativeOptions& d = {}) {
  if (imm.codimension() != 2) throw WrongCodimension("torsion needs codimension 2");
  const LocalGeometry G = localGeometry(imm, p, 3, d);
  const FundamentalData fd = fundamentalDataFromGeometry(G);
  const double normH = fd.H.norm();
  if (normH <= 1e-8) throw VanishingH(imm.name + ": |H| <= 1e-8 at the requested point");
  const Jet invH = sqrt(dot(G.H, G.H)).reciprocal();
  JetVec Nj(G.H);
  for (Jet& c : Nj) c = c * invH;
  JetVec Vj(static_cast<std::size_t>(imm.ambient_dim));
  for (int k = 0; k < imm.ambient_dim; ++k) Vj[k] = Jet(V[k]);
  const std::vector<Jet> Va = G.tangentCoords(Vj);

  Eigen::VectorXd dN = Eigen::VectorXd::Zero(imm.ambient_dim);
  for (int a = 0; a < imm.intrinsic_dim; ++a) dN += Va[a].value() * values(partial(Nj, a));
  dN -= fd.frame.tangents * (fd.frame.tangents.transpose() * dN);
  const Eigen::VectorXd B = fd.frame.rotateNormal(fd.H / normH);

  const std::vector<Jet> xa = G.tangentCoords(G.x);
  Eigen::VectorXd AxV = Eigen::VectorXd::Zero(imm.ambient_dim);
  for (int a = 0; a < imm.intrinsic_dim; ++a)
    for (int b = 0; b < imm.intrinsic_dim; ++b)
      AxV += xa[a].value() * Va[b].value() * values(G.A[a][b]);

  Torsion t;
  t.derivative = dN.dot(B);
  t.derivativeOpposite = -t.derivative;
  t.closedForm = -0.5 * AxV.dot(B) / normH;
  return t;
}

struct BinormalFlatness {
  std::string fixture;
  double binormalSup = 0.0;         // sup |<A, B>|
  double hyperplaneResidual = 0.0;  // RMS distance to the best-fit hyperplane
  bool flat = false;
  bool consistent = false;  // both small (< 1e-6) or both large (> 1e-2)
};

inline BinormalFlatness binormalFlatness(const AnalyticImmersion& imm,
                                         const std::vector<ParamPoint>& grid,
                                         const DerivativeOptions& d = {}) {
  if (imm.codimension() != 2) throw WrongCodimension("binormal needs codimension 2");
  const int n = imm.intrinsic_dim, N = imm.ambient_dim;
  BinormalFlatness r;
  r.fixture = imm.name;
  for (const auto& p : grid) {
    const FundamentalData fd = fundamentalData(imm, p, d);
    const double normH = fd.H.norm();
    if (normH <= 1e-8) throw VanishingH(imm.name + ": |H| vanishes at a sample");
    const Eigen::VectorXd B = fd.frame.rotateNormal(fd.H / normH);
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += std::pow(fd.Aij(i, j).dot(B), 2);
    r.binormalSup = std::max(r.binormalSup, std::sqrt(s));
  }
  const auto nodes = quadratureNodes(imm, 1, d);
  double total = 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(N);
  for (const auto& q : nodes) {
    total += q.weight;
    mean += q.weight * q.x;
  }
  mean /= total;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(N, N);
  for (const auto& q : nodes) cov += q.weight * (q.x - mean) * (q.x - mean).transpose();
  cov /= total;
  // Measure distances along the weakest direction directly: the square root of
  // the smallest covariance eigenvalue would only resolve sqrt(eps).
  const Eigen::VectorXd nu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvectors().col(0);
  double dist2 = 0.0;
  for (const auto& q : nodes) dist2 += q.weight * std::pow((q.x - mean).dot(nu), 2);
  r.hyperplaneResidual = std::sqrt(dist2 / total);
  const bool smallA = r.binormalSup < 1e-6, smallP = r.hyperplaneResidual < 1e-6;
  const bool largeA = r.binormalSup > 1e-2, largeP = r.hyperplaneResidual > 1e-2;
  r.flat = smallA && smallP;
  r.consistent = (smallA && smallP) || (largeA && largeP);
  return r;
}

struct H212Report {
  Eigen::VectorXd V;       // least-squares translation with phi H ~ V^perp
  double misfit = 0.0;     // |phi H - V^perp| / |phi H| in L^2(e^{-f})
  double normalDerivative = 0.0;  // |nabla^perp_{grad phi} N| / |grad phi| in L^2(e^{-f})
};

/// Borderline diagnostics for a 1/2-eigenfunction phi of the |H|^2-weighted
/// drift operator; `mu` is the measured eigenvalue.
inline H212Report h212Diagnostics(const AnalyticImmersion& imm, const AmbientFunction& phi, double mu,
                                  const DerivativeOptions& d = {}) {
  if (std::abs(mu - 0.5) > 1e-2)
    throw NotBorderline("mu_|H|^2 = " + std::to_string(mu) + " is not within 1e-2 of 1/2");
  const int N = imm.ambient_dim;
  const auto nodes = quadratureNodes(imm, 1, d);
  Eigen::MatrixXd Gram = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  double phiH2 = 0.0, grad2 = 0.0, dN2 = 0.0;
  std::vector<std::pair<Eigen::VectorXd, double>> samples;  // (phi H, w)
  std::vector<Eigen::MatrixXd> perps;
  for (const auto& q : nodes) {
    const LocalGeometry G = localGeometry(imm, q.param, 3, d);
    const FundamentalData fd = fundamentalDataFromGeometry(G);
    const double w = q.weight * fd.weight;
    const Jet ph = phi.jet(G.x);
    const Eigen::VectorXd phiH = ph.value() * fd.H;
    const Eigen::MatrixXd Pperp =
        Eigen::MatrixXd::Identity(N, N) - fd.frame.tangents * fd.frame.tangents.transpose();
    Gram += w * Pperp;
    rhs += w * (Pperp * phiH);
    phiH2 += w * phiH.squaredNorm();
    samples.emplace_back(phiH, w);
    perps.push_back(Pperp);

    const Eigen::VectorXd grad = tangentialGradient(G, ph);
    grad2 += w * grad.squaredNorm();
    const double normH = fd.H.norm();
    if (normH <= 1e-8) throw VanishingH(imm.name + ": |H| vanishes at a quadrature node");
    const Jet invH = sqrt(dot(G.H, G.H)).reciprocal();
    JetVec Nj(G.H);
    for (Jet& c : Nj) c = c * invH;
    JetVec gj(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) gj[k] = Jet(grad[k]);
    const std::vector<Jet> ga = G.tangentCoords(gj);
    Eigen::VectorXd dN = Eigen::VectorXd::Zero(N);
    for (int a = 0; a < imm.intrinsic_dim; ++a) dN += ga[a].value() * values(partial(Nj, a));
    dN = Pperp * dN;
    dN2 += w * dN.squaredNorm();
  }
  if (phiH2 <= 1e-20) throw InvalidArgument("phi H vanishes identically; not an eigenfunction");
  H212Report r;
  r.V = Gram.ldlt().solve(rhs);
  double mis = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    mis += samples[i].second * (samples[i].first - perps[i] * r.V).squaredNorm();
  r.misfit = std::sqrt(mis / phiH2);
  r.normalDerivative = grad2 > 0.0 ? std::sqrt(dN2 / grad2) : 0.0;
  return r;
}

struct ProjectionTrace {
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
  bool pass = false;
};

/// sum_{i <= n+k} |Pi^perp(E_i)|^2 for the orthogonal complement of the
/// column span of `basis` (N x n).
inline ProjectionTrace projectionTrace(const Eigen::MatrixXd& basis, int k) {
  const int N = static_cast<int>(basis.rows()), n = static_cast<int>(basis.cols());
  if (n < 1 || k < 1 || k > N - n) throw BadDimensions("need 1 <= k <= N - n");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  if (R.diagonal().cwiseAbs().minCoeff() < 1e-12) throw BadDimensions("subspace basis is rank deficient");
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, n);
  const Eigen::MatrixXd Pperp = Eigen::MatrixXd::Identity(N, N) - Q * Q.transpose();
  ProjectionTrace t;
  t.lower = k;
  t.upper = n + k;
  for (int i = 0; i < n + k; ++i) t.value += Pperp.col(i).squaredNorm();
  t.pass = t.value >= t.lower - 1e-12 && t.value <= t.upper + 1e-12;
  return t;
}

}  // namespace shrinkers
