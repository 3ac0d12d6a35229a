#pragma once

// Second variation of F along the scalar families phi V^perp, phi H and
// phi E, the instability witnesses built from them, and the counting bounds
// coming from constrained combinations of drift eigenfunctions.
//
// Conventions: drift Laplacian eigenvalues mu solve Lu + mu u = 0 (so mu >= 0);
// stability eigenvalues c solve L u = c u. All delta^2 values carry the
// (4 pi)^{-n/2} normalization.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "shrinkers/errors.hpp"
#include "shrinkers/immersion.hpp"
#include "shrinkers/normal_calculus.hpp"
#include "shrinkers/sampled.hpp"
#include "shrinkers/spectral.hpp"

namespace shrinkers {

inline constexpr const char* kConventionNote =
    "drift eigenvalues mu: Lu + mu u = 0; stability eigenvalues c: L u = c u";

// ---------------------------------------------------------------------------
// Quadratic forms on analytic immersions.

namespace detail {

inline void requireExactShrinker(const AnalyticImmersion& imm, const DerivativeOptions& opts) {
  const double sup = shrinkerResidual(imm, opts).sup;
  if (sup > 1e-4) throw NotAShrinker(imm.name + ": shrinker residual " + std::to_string(sup) + " exceeds 1e-4");
}

}  // namespace detail

/// (4 pi)^{-n/2} int [|grad phi|^2 - phi^2 / 2] |V^perp|^2 e^{-f}.
inline double secondVariationPhiV(const AnalyticImmersion& imm, const AmbientFunction& phi, const Eigen::VectorXd& V,
                                  const DerivativeOptions& opts = {}) {
  detail::requireExactShrinker(imm, opts);
  double s = 0.0;
  for (const auto& q : quadratureNodes(imm, 1, opts)) {
    const LocalGeometry G = localGeometry(imm, q.param, 2, opts);
    const Jet p = phi.jet(G.x);
    const Eigen::VectorXd grad = tangentialGradient(G, p);
    JetVec Vj(V.data(), V.data() + V.size());
    const double vperp2 = values(G.normalPart(Vj)).squaredNorm();
    s += q.weight * (grad.squaredNorm() - 0.5 * p.value() * p.value()) * vperp2 *
         std::exp(-0.25 * q.x.squaredNorm());
  }
  return gaussianNormalization(imm.intrinsic_dim) * s;
}

/// (4 pi)^{-n/2} int [|grad phi|^2 - phi^2] |H|^2 e^{-f}.
inline double secondVariationPhiH(const AnalyticImmersion& imm, const AmbientFunction& phi,
                                  const DerivativeOptions& opts = {}) {
  detail::requireExactShrinker(imm, opts);
  double s = 0.0;
  for (const auto& q : quadratureNodes(imm, 1, opts)) {
    const LocalGeometry G = localGeometry(imm, q.param, 2, opts);
    const Jet p = phi.jet(G.x);
    const Eigen::VectorXd grad = tangentialGradient(G, p);
    s += q.weight * (grad.squaredNorm() - p.value() * p.value()) * values(G.H).squaredNorm() *
         std::exp(-0.25 * q.x.squaredNorm());
  }
  return gaussianNormalization(imm.intrinsic_dim) * s;
}

/// -(4 pi)^{-n/2} int <u, L u> e^{-f} for u = phi V^perp, with L applied to
/// fourth-order jets.
inline double directSecondVariationPhiV(const AnalyticImmersion& imm, const AmbientFunction& phi,
                                        const Eigen::VectorXd& V, const DerivativeOptions& opts = {}) {
  double s = 0.0;
  for (const auto& q : quadratureNodes(imm, 1, opts)) {
    const LocalGeometry G = localGeometry(imm, q.param, 4, opts);
    const Jet p = phi.jet(G.x);
    JetVec u = G.normalPart(JetVec(V.data(), V.data() + V.size()));
    for (auto& c : u) c = p * c;
    const NormalTensor Lu = stabilityOperator(G, sectionTensor(u));
    s -= q.weight * values(u).dot(values(Lu.comps[0])) * std::exp(-0.25 * q.x.squaredNorm());
  }
  return gaussianNormalization(imm.intrinsic_dim) * s;
}

struct GaussianPairing {
  double inner = 0.0;   // int <H, V^perp> e^{-f}
  double norm_H = 0.0;  // L^2(e^{-f}) norms
  double norm_V = 0.0;
  double relative() const { return std::abs(inner) / std::max(norm_H * norm_V, 1e-300); }
};

inline GaussianPairing pairHWithTranslation(const AnalyticImmersion& imm, const Eigen::VectorXd& V,
                                            const DerivativeOptions& opts = {}) {
  GaussianPairing g;
  for (const auto& q : quadratureNodes(imm, 1, opts)) {
    const FundamentalData fd = fundamentalData(imm, q.param, opts);
    const Eigen::VectorXd Vp = V - fd.frame.tangents * (fd.frame.tangents.transpose() * V);
    const double w = q.weight * fd.weight;
    g.inner += w * fd.H.dot(Vp);
    g.norm_H += w * fd.H.squaredNorm();
    g.norm_V += w * Vp.squaredNorm();
  }
  g.norm_H = std::sqrt(g.norm_H);
  g.norm_V = std::sqrt(g.norm_V);
  return g;
}

// ---------------------------------------------------------------------------
// Sampled surfaces: fields are V x N matrices (one row per vertex).

namespace detail {

template <int Dim>
Eigen::MatrixXd meanCurvatureField(const SampledSurface<Dim>& s) {
  Eigen::MatrixXd H(s.mesh.vertexCount(), s.ambient_dim());
  for (int v = 0; v < s.mesh.vertexCount(); ++v) H.row(v) = s.H[static_cast<std::size_t>(v)].transpose();
  return H;
}

template <int Dim>
Eigen::MatrixXd translationField(const SampledSurface<Dim>& s, const Eigen::VectorXd& V) {
  Eigen::MatrixXd F(s.mesh.vertexCount(), s.ambient_dim());
  for (int v = 0; v < s.mesh.vertexCount(); ++v) F.row(v) = s.normalPart(v, V).transpose();
  return F;
}

inline double fieldInner(const SparseMatrix& M, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  return (X.array() * (M * Y).array()).sum();
}

inline double relativeInner(const SparseMatrix& M, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  const double nx = std::sqrt(fieldInner(M, X, X)), ny = std::sqrt(fieldInner(M, Y, Y));
  return std::abs(fieldInner(M, X, Y)) / std::max(nx * ny, 1e-300);
}

/// Unit normals of a codimension-one sample, oriented consistently by
/// walking the mesh from vertex 0.
template <int Dim>
std::vector<Eigen::VectorXd> orientedNormals(const SampledSurface<Dim>& s) {
  const int V = s.mesh.vertexCount();
  std::vector<Eigen::VectorXd> nu(static_cast<std::size_t>(V));
  for (int v = 0; v < V; ++v) {
    const Eigen::MatrixXd& T = s.tangents[static_cast<std::size_t>(v)];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(T.transpose(), Eigen::ComputeFullV);
    nu[static_cast<std::size_t>(v)] = svd.matrixV().col(s.ambient_dim() - 1);
  }
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(V));
  for (const auto& c : s.mesh.cells)
    for (int a : c)
      for (int b : c)
        if (a != b) adj[static_cast<std::size_t>(a)].push_back(b);
  std::vector<char> seen(static_cast<std::size_t>(V), 0);
  std::vector<int> queue;
  for (int root = 0; root < V; ++root) {
    if (seen[static_cast<std::size_t>(root)]) continue;
    seen[static_cast<std::size_t>(root)] = 1;
    queue.assign(1, root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (seen[static_cast<std::size_t>(w)]) continue;
        seen[static_cast<std::size_t>(w)] = 1;
        if (nu[static_cast<std::size_t>(w)].dot(nu[static_cast<std::size_t>(v)]) < 0) nu[static_cast<std::size_t>(w)] *= -1.0;
        queue.push_back(w);
      }
    }
  }
  return nu;
}

}  // namespace detail

/// Mesh version of the phi V^perp form: weights |V^perp|^2 per vertex.
template <int Dim>
double secondVariationPhiV(const SampledSurface<Dim>& s, const Eigen::VectorXd& phi, const Eigen::VectorXd& V) {
  std::vector<double> w(static_cast<std::size_t>(s.mesh.vertexCount()));
  for (int v = 0; v < s.mesh.vertexCount(); ++v) w[static_cast<std::size_t>(v)] = s.normalPart(v, V).squaredNorm();
  const SpectralProblem p = assembleDrift(s, WeightKind::Custom, w);
  return gaussianNormalization(Dim) * (phi.dot(p.K * phi) - 0.5 * phi.dot(p.M * phi));
}

/// Mesh version of the phi H form, using the |H|^2-weighted matrices.
template <int Dim>
double secondVariationPhiH(const SampledSurface<Dim>& s, const Eigen::VectorXd& phi) {
  FemWeights w;
  w.stiffness = s.meanCurvatureSquared();
  w.mass = w.stiffness;
  const SpectralProblem p = assembleFem(s.mesh, w);
  return gaussianNormalization(Dim) * (phi.dot(p.K * phi) - phi.dot(p.M * phi));
}

struct NamedValue {
  std::string name;
  double value = 0.0;
};

struct StabilityReport {
  std::string test;
  std::string fixture;
  std::string verdict;  // unstable-witness-found | no-witness-in-family | borderline
  std::string convention = kConventionNote;
  double mu = 0.0;      // eigenvalue that drives the test
  std::vector<NamedValue> delta2;
  std::vector<NamedValue> orthogonality;
  std::vector<NamedValue> diagnostics;
  bool witness_found = false;
  Eigen::MatrixXd witness;  // V x N normal field
  double witness_norm2 = 0.0;

  double orthogonalityMax() const {
    double m = 0.0;
    for (const auto& o : orthogonality) m = std::max(m, o.value);
    return m;
  }
  double delta2Of(const std::string& name) const {
    for (const auto& d : delta2)
      if (d.name == name) return d.value;
    throw InvalidArgument("no delta2 entry " + name);
  }
};

inline std::string classifyEigenvalue(double mu, double tol) {
  if (mu < 0.5 - tol) return "unstable-witness-found";
  if (mu <= 0.5 + tol) return "borderline";
  return "no-witness-in-family";
}

/// If mu_|H|^2 < 1/2, the field u H minus its Gaussian projection onto
/// span{H, E_1^perp, ..., E_N^perp} has negative second variation.
template <int Dim>
StabilityReport instabilityWitness(const SampledSurface<Dim>& s, double tol = 1e-2, const SolverOptions& opts = {}) {
  StabilityReport rep;
  rep.test = "mean-curvature-witness";
  rep.fixture = s.name;
  const int V = s.mesh.vertexCount(), N = s.ambient_dim();
  const EigenResult spec = muH2Spectrum(s, 1, opts);
  rep.mu = spec.values[1];
  rep.verdict = classifyEigenvalue(rep.mu, tol);
  if (rep.verdict != "unstable-witness-found") return rep;
  const double norm = gaussianNormalization(Dim);
  const Eigen::VectorXd u = spec.vectors.col(1);
  const SparseMatrix M = assembleDrift(s.mesh).M;
  const Eigen::MatrixXd H = detail::meanCurvatureField(s);
  const Eigen::MatrixXd uH = u.asDiagonal() * H;

  // Gram system for the projection onto span{H, E_i^perp}
  std::vector<Eigen::MatrixXd> basis{H};
  for (int i = 0; i < N; ++i) basis.push_back(detail::translationField(s, Eigen::VectorXd::Unit(N, i)));
  const int b = static_cast<int>(basis.size());
  Eigen::MatrixXd gram(b, b);
  Eigen::VectorXd rhs(b);
  for (int i = 0; i < b; ++i) {
    rhs[i] = detail::fieldInner(M, uH, basis[i]);
    for (int j = 0; j < b; ++j) gram(i, j) = detail::fieldInner(M, basis[i], basis[j]);
  }
  const Eigen::VectorXd coef = gram.completeOrthogonalDecomposition().solve(rhs);
  Eigen::MatrixXd Vperp = Eigen::MatrixXd::Zero(V, N);
  for (int i = 1; i < b; ++i) Vperp += coef[i] * basis[i];
  const double alpha = coef[0];
  const Eigen::MatrixXd W = uH - alpha * H - Vperp;

  rep.orthogonality.push_back({"H", detail::relativeInner(M, W, H)});
  for (int i = 1; i < b; ++i) rep.orthogonality.push_back({"E" + std::to_string(i), detail::relativeInner(M, W, basis[i])});

  // delta^2(uH) from the |H|^2-weighted forms; L H = H and L V^perp = V^perp / 2
  // on shrinkers give delta^2(uH - Y) = delta^2(uH) + 2 <uH, LY> - <Y, LY>.
  const double d2uH = secondVariationPhiH(s, u);
  const Eigen::MatrixXd Y = alpha * H + Vperp, LY = alpha * H + 0.5 * Vperp;
  const double d2family =
      d2uH + norm * (2 * detail::fieldInner(M, uH, LY) - detail::fieldInner(M, Y, LY));
  rep.delta2.push_back({"uH", d2uH});
  rep.delta2.push_back({"witness-family", d2family});
  rep.witness_norm2 = norm * detail::fieldInner(M, W, W);
  const double uHnorm2 = norm * detail::fieldInner(M, uH, uH);
  rep.diagnostics.push_back({"uH-norm2", uHnorm2});
  rep.diagnostics.push_back({"projection-norm2", norm * detail::fieldInner(M, Y, Y)});
  rep.diagnostics.push_back({"translation-projection-norm2", norm * detail::fieldInner(M, Vperp, Vperp)});
  rep.diagnostics.push_back({"H-coefficient", alpha});

  double d2 = d2family;
  if (N - Dim == 1) {
    // scalar form -(u, L u) = int |grad w|^2 - (1/2 + |A|^2) w^2 for w = <W, nu>
    Eigen::VectorXd w(V);
    const auto nu = detail::orientedNormals(s);
    for (int v = 0; v < V; ++v) w[v] = W.row(v).dot(nu[static_cast<std::size_t>(v)]);
    const SpectralProblem base = assembleDrift(s.mesh);
    FemWeights wq;
    wq.mass.resize(static_cast<std::size_t>(V));
    for (int v = 0; v < V; ++v) wq.mass[static_cast<std::size_t>(v)] = 0.5 + s.A2[static_cast<std::size_t>(v)];
    const SpectralProblem pq = assembleFem(s.mesh, wq);
    d2 = norm * (w.dot(base.K * w) - w.dot(pq.M * w));
    rep.delta2.push_back({"witness-direct", d2});
  }
  rep.witness = W;
  rep.witness_found = d2 < -1e-6 * rep.witness_norm2 && rep.orthogonalityMax() < 1e-6;
  if (!rep.witness_found) rep.verdict = "no-witness-in-family";
  return rep;
}

/// The same sample seen inside R^{N + extra}.
template <int Dim>
SampledSurface<Dim> embedInHigherDimension(const SampledSurface<Dim>& s, int extra = 1) {
  SampledSurface<Dim> out = s;
  const int N = s.ambient_dim() + extra;
  out.mesh.ambient_dim = N;
  auto pad = [N](const Eigen::VectorXd& v) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(N);
    w.head(v.size()) = v;
    return w;
  };
  for (auto& v : out.mesh.vertices) v = pad(v);
  for (auto& h : out.H) h = pad(h);
  for (auto& T : out.tangents) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, T.cols());
    P.topRows(T.rows()) = T;
    T = P;
  }
  return out;
}

struct ExtradimsResiduals {
  double H = 0.0;            // |int phi <E, H> e^{-f}| relative
  double translations = 0.0;  // sup over the subspace of |<E, V^perp>| pointwise
  double mean = 0.0;         // |int phi e^{-f}| relative: orthogonality to E itself
  double max() const { return std::max({H, translations, mean}); }
};

template <int Dim>
ExtradimsResiduals extradimsResiduals(const SampledSurface<Dim>& s, const Eigen::VectorXd& phi,
                                      const Eigen::VectorXd& E, const Eigen::MatrixXd& subspace,
                                      const SparseMatrix& M) {
  ExtradimsResiduals r;
  const int V = s.mesh.vertexCount();
  Eigen::VectorXd hE(V);
  for (int v = 0; v < V; ++v) hE[v] = s.H[static_cast<std::size_t>(v)].dot(E);
  const double nphi = std::sqrt(phi.dot(M * phi));
  const Eigen::VectorXd hs = detail::meanCurvatureField(s).rowwise().norm();
  r.H = std::abs(phi.dot(M * hE)) / std::max(nphi * std::sqrt(hs.dot(M * hs)), 1e-300);
  for (int v = 0; v < V; ++v)
    for (Eigen::Index i = 0; i < subspace.cols(); ++i)
      r.translations = std::max(r.translations, std::abs(s.normalPart(v, subspace.col(i)).dot(E)));
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(V);
  r.mean = std::abs(one.dot(M * phi)) / std::max(nphi * std::sqrt(one.dot(M * one)), 1e-300);
  return r;
}

/// For a sample lying in a proper linear subspace, tries the variation
/// phi E with E normal to the subspace and phi the first nonconstant drift
/// eigenfunction; delta^2(phi E) = (mu_1 - 1/2) int phi^2 e^{-f}.
template <int Dim>
StabilityReport extradimsTest(const SampledSurface<Dim>& s, std::optional<Eigen::VectorXd> E = std::nullopt,
                              double tol = 1e-2, const SolverOptions& opts = {}) {
  StabilityReport rep;
  rep.test = "extra-dimension-witness";
  rep.fixture = s.name;
  const int V = s.mesh.vertexCount(), N = s.ambient_dim();
  Eigen::MatrixXd X(V, N);
  for (int v = 0; v < V; ++v) X.row(v) = s.mesh.vertices[static_cast<std::size_t>(v)].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeFullV);
  Eigen::VectorXd e = E ? E->normalized() : Eigen::VectorXd(svd.matrixV().col(N - 1));
  const double offset = (X * e).cwiseAbs().maxCoeff();
  if (offset > 1e-8)
    throw NotInSubspace(s.name + ": vertices leave the hyperplane normal to E by " + std::to_string(offset));
  // orthonormal basis of the complement of E
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(N, N) - e * e.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj);
  const Eigen::MatrixXd subspace = es.eigenvectors().rightCols(N - 1);

  const SpectralProblem p = assembleDrift(s.mesh);
  const EigenResult spec = driftSpectrum(p, 1, opts);
  rep.mu = spec.values[1];
  rep.verdict = classifyEigenvalue(rep.mu, tol);
  const Eigen::VectorXd phi = spec.vectors.col(1);
  const auto res = extradimsResiduals(s, phi, e, subspace, p.M);
  rep.orthogonality = {{"H", res.H}, {"subspace-translations", res.translations}, {"E", res.mean}};
  const double norm = gaussianNormalization(Dim);
  const double l2 = norm * phi.dot(p.M * phi);
  const double direct = norm * (phi.dot(p.K * phi) - 0.5 * phi.dot(p.M * phi));
  rep.delta2 = {{"phiE-direct", direct}, {"phiE-formula", (rep.mu - 0.5) * l2}};
  rep.diagnostics = {{"subspace-offset", offset}};
  if (rep.verdict == "unstable-witness-found") {
    rep.witness_found = direct < -1e-6 * l2 && res.max() < 1e-6;
    if (rep.witness_found) {
      rep.witness = phi * e.transpose();
      rep.witness_norm2 = l2;
    } else {
      rep.verdict = "no-witness-in-family";
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Constrained combinations of eigenfunctions and counting bounds.

/// Number of homogeneous equations imposed on phi: n + k from the H
/// conditions and (n + k)(N - (n + k - 1)/2) from the translation pairs.
inline int constraintRowCount(int n, int N, int k) { return (n + k) * N - (n + k) * (n + k - 3) / 2; }

struct ConstrainedFamily {
  int n = 0, N = 0, k = 0, I = 0;
  int rows_formula = 0;
  int rows_enumerated = 0;
  int index = 0;               // eigen-index of the corollary bound
  double mu_index = 0.0;
  double bound = 0.0;          // k / (2 (n + k))
  bool bound_holds = false;
  double bound_margin = 0.0;   // mu_index / bound
  int theorem_index = 0;       // 2 n N
  double theorem_mu = 0.0;
  bool theorem_holds = false;
  double theorem_margin = 0.0;
  Eigen::VectorXd coefficients;  // a_i, sum a_i^2 = 1
  double constraint_residual = 0.0;
  double lhs = 0.0;            // int phi^2 e^{-f}
  double rhs = 0.0;            // 2 (n/k + 1) int |grad phi|^2 e^{-f}
  double spectral_rhs = 0.0;   // 2 (n/k + 1) sum a_i^2 mu_i
  bool inequality_holds = false;
};

template <int Dim>
ConstrainedFamily constrainedFamilyTest(const SampledSurface<Dim>& s, int k, int I, const EigenResult& drift) {
  ConstrainedFamily r;
  r.n = Dim;
  r.N = s.ambient_dim();
  r.k = k;
  r.I = I;
  if (k < 1 || k > r.N - r.n) throw InvalidArgument("k must lie in [1, N - n]");
  if (I < 0) throw InvalidArgument("index I must be nonnegative");
  const int m = r.n + k;
  r.rows_formula = constraintRowCount(r.n, r.N, k);
  r.index = m * r.N + m * I - m * (m - 3) / 2;
  r.theorem_index = 2 * r.n * r.N;
  const int needed = std::max(r.index, r.theorem_index);
  if (drift.count() < needed + 1)
    throw InsufficientEigenbasis("need eigenpairs up to index " + std::to_string(needed) + ", have " +
                                 std::to_string(drift.count() - 1));
  const SparseMatrix M = assembleDrift(s.mesh).M;
  const int V = s.mesh.vertexCount();

  // one constraint function g per equation: rows are int u_i g e^{-f}
  std::vector<Eigen::VectorXd> g;
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd h(V);
    for (int v = 0; v < V; ++v) h[v] = s.H[static_cast<std::size_t>(v)][j];  // <E_j^perp, H> = <E_j, H>
    g.push_back(h);
  }
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < r.N; ++l) {
      if (l < m && l < j) continue;  // symmetric pair already counted
      Eigen::VectorXd h(V);
      for (int v = 0; v < V; ++v) {
        const Eigen::MatrixXd& T = s.tangents[static_cast<std::size_t>(v)];
        h[v] = (j == l ? 1.0 : 0.0) - T.row(j).dot(T.row(l));
      }
      g.push_back(h);
    }
  r.rows_enumerated = static_cast<int>(g.size());
  const int cols = r.index + 1;
  const Eigen::MatrixXd U = drift.vectors.leftCols(cols);
  Eigen::MatrixXd C(r.rows_enumerated, cols);
  for (int i = 0; i < r.rows_enumerated; ++i) C.row(i) = (U.transpose() * (M * g[static_cast<std::size_t>(i)])).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  r.coefficients = svd.matrixV().col(cols - 1);
  r.constraint_residual = (C * r.coefficients).norm() / std::max(C.norm(), 1e-300);

  const SpectralProblem p = assembleDrift(s.mesh);
  const Eigen::VectorXd phi = U * r.coefficients;
  const double factor = 2.0 * (static_cast<double>(r.n) / k + 1.0);
  r.lhs = phi.dot(M * phi);
  r.rhs = factor * phi.dot(p.K * phi);
  for (int i = 0; i < cols; ++i) r.spectral_rhs += factor * r.coefficients[i] * r.coefficients[i] * drift.values[i];
  r.inequality_holds = r.lhs <= r.rhs * (1 + 1e-9);

  r.mu_index = drift.values[r.index];
  r.bound = static_cast<double>(k) / (2.0 * m);
  r.bound_holds = r.mu_index >= r.bound;
  r.bound_margin = r.mu_index / r.bound;
  r.theorem_mu = drift.values[r.theorem_index];
  r.theorem_holds = r.theorem_mu >= 0.25;
  r.theorem_margin = r.theorem_mu / 0.25;
  return r;
}

template <int Dim>
ConstrainedFamily constrainedFamilyTest(const SampledSurface<Dim>& s, int k, int I = 0, const SolverOptions& opts = {}) {
  const int m = Dim + k, N = s.ambient_dim();
  const int needed = std::max(m * N + m * I - m * (m - 3) / 2, 2 * Dim * N);
  return constrainedFamilyTest(s, k, I, driftSpectrum(assembleDrift(s.mesh), needed, opts));
}

// ---------------------------------------------------------------------------
// Scalar stability operator in codimension one.

struct ScalarStability {
  EigenResult spectrum;      // descending c, L u = c u
  int h_index = -1;          // eigenvector best aligned with <H, nu>
  double h_alignment = 0.0;  // |cos| of the angle in L^2(e^{-f})
  std::vector<int> translation_indices;  // best aligned with <E_i, nu>
  std::vector<double> translation_alignment;
};

/// Eigenvalues of L = drift Laplacian + 1/2 + |A|^2 on a codimension-one
/// sample (planar curve or hypersurface), solved as (K - M_q) u = nu M u
/// with q = 1/2 + |A|^2 and c = -nu.
template <int Dim>
ScalarStability scalarStabilitySpectrum(const SampledSurface<Dim>& s, int count, const SolverOptions& opts = {}) {
  if (s.ambient_dim() - Dim != 1)
    throw WrongCodimension("the scalar stability operator needs codimension one, got " +
                           std::to_string(s.ambient_dim() - Dim));
  if (static_cast<int>(s.A2.size()) != s.mesh.vertexCount()) throw InvalidArgument("no |A|^2 samples");
  const int V = s.mesh.vertexCount(), N = s.ambient_dim();
  std::vector<double> q(s.A2.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = 0.5 + s.A2[i];
  const SpectralProblem base = assembleDrift(s.mesh);
  FemWeights wq;
  wq.mass = q;
  const SparseMatrix A = base.K - assembleFem(s.mesh, wq).M;
  const double qmax = *std::max_element(q.begin(), q.end());
  ScalarStability out;
  EigenResult& r = out.spectrum;
  r = lowestEigenpairs(A, base.M, count, -qmax - 1.0, opts);
  r.values = -r.values;
  r.clusters.clear();
  for (int i = 0; i < r.count(); ++i) {
    if (i == 0 || r.values[i - 1] - r.values[i] > r.cluster_tol) r.clusters.emplace_back();
    r.clusters.back().push_back(i);
  }

  // fraction of f captured by each eigenvalue cluster
  auto align = [&](const Eigen::VectorXd& f) {
    int best = -1;
    double cosine = 0.0;
    const double nf2 = f.dot(base.M * f);
    for (const auto& cl : r.clusters) {
      double captured = 0.0;
      for (int i : cl) captured += std::pow(r.vectors.col(i).dot(base.M * f), 2);
      const double c = std::sqrt(captured / std::max(nf2, 1e-300));
      if (c > cosine) {
        cosine = c;
        best = cl.front();
      }
    }
    return std::pair{best, cosine};
  };
  Eigen::VectorXd h(V);
  const auto nu = detail::orientedNormals(s);
  for (int v = 0; v < V; ++v) h[v] = s.H[static_cast<std::size_t>(v)].dot(nu[static_cast<std::size_t>(v)]);
  std::tie(out.h_index, out.h_alignment) = align(h);
  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd t(V);
    for (int v = 0; v < V; ++v) t[v] = nu[static_cast<std::size_t>(v)][i];
    const auto [idx, c] = align(t);
    out.translation_indices.push_back(idx);
    out.translation_alignment.push_back(c);
  }
  return out;
}

}  // namespace shrinkers
