#pragma once

// Gaussian-weighted P1 finite elements and generalized symmetric eigensolves
// for the drift Laplacian and its weighted and conformal relatives.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shrinkers/errors.hpp"
#include "shrinkers/io.hpp"
#include "shrinkers/mesh.hpp"
#include "shrinkers/sampled.hpp"

namespace shrinkers {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class WeightKind { Unit, MeanCurvatureSquared, Conformal, Custom };

inline const char* weightName(WeightKind w) {
  switch (w) {
    case WeightKind::Unit: return "unit";
    case WeightKind::MeanCurvatureSquared: return "mean-curvature-squared";
    case WeightKind::Conformal: return "conformal";
    case WeightKind::Custom: return "custom";
  }
  return "?";
}

struct SpectralProblem {
  SparseMatrix K;
  SparseMatrix M;
  WeightKind weight = WeightKind::Unit;
  std::string mesh;
  int dimension() const { return static_cast<int>(K.rows()); }
};

/// Per-vertex weight fields (empty = 1), each optionally multiplied by the
/// Gaussian e^{-|x|^2/4} evaluated at the quadrature points.
struct FemWeights {
  std::vector<double> stiffness;
  std::vector<double> mass;
  bool gaussian_stiffness = true;
  bool gaussian_mass = true;
};

namespace detail {

template <int Dim>
struct CellRule {
  std::vector<std::array<double, Dim + 1>> points;  // barycentric
  std::vector<double> weights;                     // sum to 1
};

template <int Dim>
const CellRule<Dim>& cellRule() {
  static const CellRule<Dim> rule = [] {
    CellRule<Dim> r;
    if constexpr (Dim == 2) {
      r.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
      r.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    } else {
      const double d = 0.5 / std::sqrt(3.0);
      r.points = {{0.5 + d, 0.5 - d}, {0.5 - d, 0.5 + d}};
      r.weights = {0.5, 0.5};
    }
    return r;
  }();
  return rule;
}

}  // namespace detail

template <int Dim>
SpectralProblem assembleFem(const SimplexMesh<Dim>& mesh, const FemWeights& w) {
  const int V = mesh.vertexCount(), N = mesh.ambient_dim;
  const auto& rule = detail::cellRule<Dim>();
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(mesh.cells.size() * (Dim + 1) * (Dim + 1));
  mt.reserve(kt.capacity());
  for (const auto& c : mesh.cells) {
    Eigen::MatrixXd B(N, Dim);
    for (int i = 0; i < Dim; ++i) B.col(i) = mesh.vertices[c[i + 1]] - mesh.vertices[c[0]];
    const Eigen::MatrixXd G = B.transpose() * B;
    const double vol = std::sqrt(G.determinant()) / (Dim == 2 ? 2.0 : 1.0);
    // Gradients of the barycentric coordinates (columns), in R^N.
    Eigen::MatrixXd grads(N, Dim + 1);
    grads.rightCols(Dim) = B * G.inverse();
    grads.col(0) = -grads.rightCols(Dim).rowwise().sum();
    const Eigen::MatrixXd gg = grads.transpose() * grads;

    double kw = 0.0;
    Eigen::MatrixXd local_m = Eigen::MatrixXd::Zero(Dim + 1, Dim + 1);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& lam = rule.points[q];
      Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
      double ks = 0.0, ms = 0.0;
      for (int i = 0; i <= Dim; ++i) {
        x += lam[i] * mesh.vertices[c[i]];
        ks += lam[i] * (w.stiffness.empty() ? 1.0 : w.stiffness[c[i]]);
        ms += lam[i] * (w.mass.empty() ? 1.0 : w.mass[c[i]]);
      }
      const double g = std::exp(-0.25 * x.squaredNorm());
      if (w.gaussian_stiffness) ks *= g;
      if (w.gaussian_mass) ms *= g;
      kw += rule.weights[q] * ks;
      for (int i = 0; i <= Dim; ++i)
        for (int j = 0; j <= Dim; ++j) local_m(i, j) += rule.weights[q] * ms * lam[i] * lam[j];
    }
    for (int i = 0; i <= Dim; ++i)
      for (int j = 0; j <= Dim; ++j) {
        kt.emplace_back(c[i], c[j], vol * kw * gg(i, j));
        mt.emplace_back(c[i], c[j], vol * local_m(i, j));
      }
  }
  SpectralProblem p;
  p.K.resize(V, V);
  p.M.resize(V, V);
  p.K.setFromTriplets(kt.begin(), kt.end());
  p.M.setFromTriplets(mt.begin(), mt.end());
  // Exact symmetry regardless of summation order.
  p.K = 0.5 * (SparseMatrix(p.K.transpose()) + p.K);
  p.M = 0.5 * (SparseMatrix(p.M.transpose()) + p.M);
  p.K.makeCompressed();
  p.M.makeCompressed();
  return p;
}

template <int Dim>
SpectralProblem assembleDrift(const SampledSurface<Dim>& s, WeightKind weight,
                              const std::vector<double>& custom = {}) {
  FemWeights w;
  switch (weight) {
    case WeightKind::Unit: break;
    case WeightKind::MeanCurvatureSquared: {
      w.stiffness = s.meanCurvatureSquared();
      const double lo = *std::min_element(w.stiffness.begin(), w.stiffness.end());
      if (lo < 1e-10)
        throw VanishingWeight(s.name + ": min |H|^2 = " + std::to_string(lo) + " below 1e-10");
      w.mass = w.stiffness;
      break;
    }
    case WeightKind::Conformal:
      if (Dim != 2) throw BadDimensions("the conformal Laplacian needs a surface");
      w.gaussian_stiffness = false;
      break;
    case WeightKind::Custom:
      if (static_cast<int>(custom.size()) != s.mesh.vertexCount())
        throw InvalidArgument("custom weight needs one value per vertex");
      w.stiffness = custom;
      w.mass = custom;
      break;
  }
  SpectralProblem p = assembleFem(s.mesh, w);
  p.weight = weight;
  p.mesh = s.name;
  return p;
}

template <int Dim>
SpectralProblem assembleDrift(const SimplexMesh<Dim>& mesh, WeightKind weight = WeightKind::Unit) {
  if (weight != WeightKind::Unit && weight != WeightKind::Conformal)
    throw InvalidArgument("this weight needs per-vertex geometry; pass a SampledSurface");
  if (weight == WeightKind::Conformal && Dim != 2) throw BadDimensions("the conformal Laplacian needs a surface");
  FemWeights w;
  w.gaussian_stiffness = weight != WeightKind::Conformal;
  SpectralProblem p = assembleFem(mesh, w);
  p.weight = weight;
  return p;
}

// ---------------------------------------------------------------------------
// Eigensolvers.

struct EigenResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // M-orthonormal columns
  std::vector<double> residuals;
  std::vector<std::vector<int>> clusters;
  double cluster_tol = 0.0;
  double orthonormality_error = 0.0;
  int iterations = 0;
  std::string method;

  int count() const { return static_cast<int>(values.size()); }
  int multiplicityOf(int index) const {
    for (const auto& c : clusters)
      if (std::find(c.begin(), c.end(), index) != c.end()) return static_cast<int>(c.size());
    return 1;
  }
};

struct SolverOptions {
  int dense_limit = 1500;
  double tolerance = 1e-10;
  double accept = 1e-8;
  int max_iterations = 2000;
  unsigned seed = 20240601u;
};

namespace detail {

inline void normalizeSigns(Eigen::MatrixXd& U) {
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    Eigen::Index k = 0;
    U.col(j).cwiseAbs().maxCoeff(&k);
    if (U(k, j) < 0) U.col(j) *= -1.0;
  }
}

inline void finishResult(EigenResult& r, const SparseMatrix& A, const SparseMatrix& M) {
  const int m = r.count();
  r.residuals.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd Mu = M * r.vectors.col(i);
    r.residuals[static_cast<std::size_t>(i)] = (A * r.vectors.col(i) - r.values[i] * Mu).norm() / Mu.norm();
  }
  const Eigen::MatrixXd gram = r.vectors.transpose() * (M * r.vectors);
  r.orthonormality_error = (gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  const double est = r.residuals.empty() ? 0.0 : *std::max_element(r.residuals.begin(), r.residuals.end());
  r.cluster_tol = 20.0 * std::max(est, 1e-3);
  r.clusters.clear();
  for (int i = 0; i < m; ++i) {
    if (i == 0 || r.values[i] - r.values[i - 1] > r.cluster_tol) r.clusters.emplace_back();
    r.clusters.back().push_back(i);
  }
}

}  // namespace detail

/// Smallest `wanted` eigenpairs of A u = nu M u (A symmetric, M SPD); `shift`
/// must lie strictly below the spectrum.
inline EigenResult lowestEigenpairs(const SparseMatrix& A, const SparseMatrix& M, int wanted, double shift,
                                    const SolverOptions& opts = {}) {
  const int n = static_cast<int>(A.rows());
  if (wanted < 1 || wanted > n - 1)
    throw InvalidArgument("requested " + std::to_string(wanted) + " eigenpairs of a problem of dimension " +
                          std::to_string(n));
  EigenResult r;
  if (n <= opts.dense_limit) {
    const Eigen::MatrixXd Ad(A), Md(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Md);
    if (es.info() != Eigen::Success) throw SolverFailure("dense generalized eigensolver failed (M not SPD?)");
    r.values = es.eigenvalues().head(wanted);
    r.vectors = es.eigenvectors().leftCols(wanted);
    r.method = "dense";
  } else {
    // Shift-invert block subspace iteration with Rayleigh-Ritz.
    const SparseMatrix S = A - shift * M;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(S);
    if (ldlt.info() != Eigen::Success) throw SolverFailure("factorization of the shifted operator failed");
    if (ldlt.vectorD().minCoeff() <= 0.0)
      throw SolverFailure("shifted operator is not positive definite; min pivot " +
                          std::to_string(ldlt.vectorD().minCoeff()));
    const int block = std::min(n, wanted + std::max(10, wanted));
    std::mt19937 rng(opts.seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd X(n, block);
    for (int j = 0; j < block; ++j)
      for (int i = 0; i < n; ++i) X(i, j) = gauss(rng);
    double worst = 0.0;
    for (int it = 1; it <= opts.max_iterations; ++it) {
      const Eigen::MatrixXd Y = ldlt.solve(M * X);
      const Eigen::MatrixXd Ar = Y.transpose() * (A * Y);
      const Eigen::MatrixXd Mr = Y.transpose() * (M * Y);
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Ar + Ar.transpose()),
                                                                   0.5 * (Mr + Mr.transpose()));
      if (es.info() != Eigen::Success) throw SolverFailure("Rayleigh-Ritz step lost rank");
      X = Y * es.eigenvectors();
      r.values = es.eigenvalues().head(wanted);
      worst = 0.0;
      for (int i = 0; i < wanted; ++i) {
        const Eigen::VectorXd Mu = M * X.col(i);
        worst = std::max(worst, (A * X.col(i) - r.values[i] * Mu).norm() / Mu.norm());
      }
      r.iterations = it;
      if (worst < opts.tolerance) break;
    }
    if (!(worst < opts.accept))
      throw SolverFailure("subspace iteration stalled at residual " + std::to_string(worst) + " after " +
                          std::to_string(r.iterations) + " iterations (dimension " + std::to_string(n) + ")");
    r.vectors = X.leftCols(wanted);
    r.method = "shift-invert";
  }
  detail::normalizeSigns(r.vectors);
  detail::finishResult(r, A, M);
  return r;
}

/// Smallest count + 1 eigenvalues mu_0 <= ... <= mu_count of K u = mu M u.
inline EigenResult driftSpectrum(const SpectralProblem& p, int count, const SolverOptions& opts = {}) {
  if (count < 0 || count + 1 >= p.dimension())
    throw InvalidArgument("count must be below the problem dimension");
  return lowestEigenpairs(p.K, p.M, count + 1, -0.5, opts);
}

inline EigenResult conformalSpectrum(const TriangleMeshN& mesh, int count, const SolverOptions& opts = {}) {
  return driftSpectrum(assembleDrift(mesh, WeightKind::Conformal), count, opts);
}

/// Spectrum of the |H|^2-weighted drift operator; mu_|H|^2 is values[1].
template <int Dim>
EigenResult muH2Spectrum(const SampledSurface<Dim>& s, int count, const SolverOptions& opts = {}) {
  return driftSpectrum(assembleDrift(s, WeightKind::MeanCurvatureSquared), count, opts);
}

struct KorevaarRow {
  int k = 0;
  double mu = 0.0;
  double mu_lambda = 0.0;
  double k_one_plus_genus = 0.0;
  double ratio = 0.0;  // mu_k lambda / (k (1 + genus)); 0 for k = 0
};

inline std::vector<KorevaarRow> korevaarGap(const EigenResult& drift, double lambda, int genus) {
  std::vector<KorevaarRow> rows;
  for (int k = 0; k < drift.count(); ++k) {
    KorevaarRow row;
    row.k = k;
    row.mu = k == 0 ? 0.0 : drift.values[k];
    row.mu_lambda = row.mu * lambda;
    row.k_one_plus_genus = static_cast<double>(k) * (1 + genus);
    row.ratio = k == 0 ? 0.0 : row.mu_lambda / row.k_one_plus_genus;
    rows.push_back(row);
  }
  return rows;
}

/// Writes a sparse matrix as "row col value" lines (0-based, row-major order).
inline void emitTriplets(const SparseMatrix& A, const std::string& path) {
  std::ostringstream out;
  out.precision(17);
  out << "# row col value\n";
  const Eigen::SparseMatrix<double, Eigen::RowMajor> R(A);
  for (int i = 0; i < R.outerSize(); ++i)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(R, i); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  writeFileAtomic(path, out.str());
}

}  // namespace shrinkers
