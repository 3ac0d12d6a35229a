#pragma once

// A mesh together with per-vertex geometric data (mean curvature vector,
// tangent plane, |A|^2), either sampled exactly from an analytic immersion
// or estimated from the mesh alone.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "shrinkers/immersion.hpp"
#include "shrinkers/mesh.hpp"

namespace shrinkers {

template <int Dim>
struct SampledSurface {
  std::string name;
  SimplexMesh<Dim> mesh;
  std::vector<Eigen::VectorXd> H;         // per vertex
  std::vector<Eigen::MatrixXd> tangents;  // per vertex, N x Dim orthonormal
  std::vector<double> A2;                 // per vertex |A|^2; empty when unknown
  bool exact_shrinker = false;

  int ambient_dim() const { return mesh.ambient_dim; }
  std::vector<double> meanCurvatureSquared() const {
    std::vector<double> h(H.size());
    for (std::size_t i = 0; i < H.size(); ++i) h[i] = H[i].squaredNorm();
    return h;
  }
  Eigen::VectorXd coordinate(int axis) const {
    Eigen::VectorXd v(mesh.vertexCount());
    for (int i = 0; i < mesh.vertexCount(); ++i) v[i] = mesh.vertices[static_cast<std::size_t>(i)][axis];
    return v;
  }
  /// <V^perp, E> per vertex for V = E_axis, i.e. the normal part of a basis vector.
  Eigen::VectorXd normalPart(int vertex, const Eigen::VectorXd& V) const {
    const Eigen::MatrixXd& T = tangents[static_cast<std::size_t>(vertex)];
    return V - T * (T.transpose() * V);
  }
};

using SampledSurface2 = SampledSurface<2>;
using SampledCurve = SampledSurface<1>;

template <int Dim>
SampledSurface<Dim> sampleImmersion(const AnalyticImmersion& imm, const SimplexMesh<Dim>& mesh,
                                    const DerivativeOptions& opts = {}) {
  if (static_cast<int>(mesh.vertex_params.size()) != mesh.vertexCount())
    throw InvalidArgument("mesh was not built from an immersion");
  SampledSurface<Dim> s;
  s.name = imm.name;
  s.mesh = mesh;
  for (const auto& p : mesh.vertex_params) {
    const FundamentalData fd = fundamentalData(imm, p, opts);
    s.H.push_back(fd.H);
    s.tangents.push_back(fd.frame.tangents);
    s.A2.push_back(fd.A_norm_sq);
  }
  return s;
}

/// Discrete estimates on a bare triangle mesh: cotangent Laplacian of the
/// position (H = -Delta x with a lumped barycentric mass) and tangent planes
/// from area-weighted face projectors.
inline SampledSurface2 sampleMesh(const TriangleMeshN& mesh, std::string name = "mesh") {
  const int V = mesh.vertexCount(), N = mesh.ambient_dim;
  SampledSurface2 s;
  s.name = std::move(name);
  s.mesh = mesh;
  std::vector<Eigen::VectorXd> lap(static_cast<std::size_t>(V), Eigen::VectorXd::Zero(N));
  std::vector<double> area(static_cast<std::size_t>(V), 0.0);
  std::vector<Eigen::MatrixXd> proj(static_cast<std::size_t>(V), Eigen::MatrixXd::Zero(N, N));
  for (const auto& t : mesh.cells) {
    const double a = simplexVolume(mesh, t);
    Eigen::MatrixXd B(N, 2);
    B.col(0) = mesh.vertices[t[1]] - mesh.vertices[t[0]];
    B.col(1) = mesh.vertices[t[2]] - mesh.vertices[t[0]];
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, 2);
    for (int k = 0; k < 3; ++k) {
      const int i = t[k], j = t[(k + 1) % 3], o = t[(k + 2) % 3];
      const Eigen::VectorXd u = mesh.vertices[i] - mesh.vertices[o];
      const Eigen::VectorXd w = mesh.vertices[j] - mesh.vertices[o];
      const double cross = std::sqrt(std::max(u.squaredNorm() * w.squaredNorm() - std::pow(u.dot(w), 2), 1e-300));
      const double cot = u.dot(w) / cross;
      lap[i] += 0.5 * cot * (mesh.vertices[j] - mesh.vertices[i]);
      lap[j] += 0.5 * cot * (mesh.vertices[i] - mesh.vertices[j]);
      area[t[k]] += a / 3.0;
      proj[t[k]] += a * Q * Q.transpose();
    }
  }
  for (int v = 0; v < V; ++v) {
    s.H.push_back(-lap[v] / area[v]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj[v]);
    s.tangents.push_back(es.eigenvectors().rightCols(2));
  }
  return s;
}

}  // namespace shrinkers
