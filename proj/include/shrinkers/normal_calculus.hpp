#pragma once

// Covariant calculus on jets: covariant derivatives of scalar and
// normal-bundle-valued tensors, the drift Laplacian, the stability operator
// L = drift + 1/2 + sum <., A_kl> A_kl, and intrinsic curvature.

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "shrinkers/immersion.hpp"

namespace shrinkers {

/// Covariant tensor of rank r whose components are normal vectors
/// (`normal == true`) or scalars stored as one-element vectors.
struct NormalTensor {
  int rank = 0;
  bool normal = true;
  std::vector<JetVec> comps;  // n^rank components, first index most significant
};

namespace detail {
inline int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}
inline int digitAt(int flat, int pos, int rank, int n) {
  return (flat / ipow(n, rank - 1 - pos)) % n;
}
inline int replaceDigit(int flat, int pos, int rank, int n, int digit) {
  const int w = ipow(n, rank - 1 - pos);
  return flat + (digit - (flat / w) % n) * w;
}
}  // namespace detail

inline NormalTensor scalarTensor(const Jet& phi) { return {0, false, {JetVec{phi}}}; }
inline NormalTensor sectionTensor(const JetVec& U) { return {0, true, {U}}; }

/// (nabla T)_{c I} = proj(d_c T_I) - sum_s Gamma^d_{c I_s} T_{I[s -> d]}.
inline NormalTensor covariantDerivative(const LocalGeometry& G, const NormalTensor& T) {
  const int n = G.n, r = T.rank;
  const int m = detail::ipow(n, r);
  NormalTensor D{r + 1, T.normal, std::vector<JetVec>(static_cast<std::size_t>(n * m))};
  for (int c = 0; c < n; ++c) {
    for (int I = 0; I < m; ++I) {
      JetVec comp = partial(T.comps[static_cast<std::size_t>(I)], c);
      if (T.normal) comp = G.normalPart(comp);
      for (int s = 0; s < r; ++s) {
        const int Is = detail::digitAt(I, s, r, n);
        for (int d = 0; d < n; ++d) {
          const Jet& gam = G.gamma[d][c][Is];
          const JetVec& other = T.comps[static_cast<std::size_t>(detail::replaceDigit(I, s, r, n, d))];
          for (std::size_t k = 0; k < comp.size(); ++k) comp[k] -= gam * other[k];
        }
      }
      D.comps[static_cast<std::size_t>(c * m + I)] = std::move(comp);
    }
  }
  return D;
}

/// Drift Laplacian  trace nabla^2 T - 1/2 nabla_{x^T} T.
inline NormalTensor driftLaplacian(const LocalGeometry& G, const NormalTensor& T) {
  const int n = G.n, r = T.rank;
  const int m = detail::ipow(n, r);
  const NormalTensor D = covariantDerivative(G, T);
  const NormalTensor DD = covariantDerivative(G, D);
  NormalTensor out{r, T.normal, {}};
  const std::size_t width = T.comps[0].size();
  for (int I = 0; I < m; ++I) {
    JetVec acc(width, Jet(0.0));
    for (int e = 0; e < n; ++e) {
      for (int c = 0; c < n; ++c) {
        const JetVec& dd = DD.comps[static_cast<std::size_t>((e * n + c) * m + I)];
        for (std::size_t k = 0; k < width; ++k) acc[k] += G.ginv[e][c] * dd[k];
      }
      const JetVec& d1 = D.comps[static_cast<std::size_t>(e * m + I)];
      for (std::size_t k = 0; k < width; ++k) acc[k] -= 0.5 * G.xT[e] * d1[k];
    }
    out.comps.push_back(std::move(acc));
  }
  return out;
}

/// sum_{k,l} <U, A_kl> A_kl in an orthonormal frame, written with raised
/// chart indices.
inline JetVec curvatureTerm(const LocalGeometry& G, const JetVec& U) {
  const int n = G.n;
  JetVec out(U.size(), Jet(0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Jet s = dot(U, G.A[a][b]);
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const Jet w = G.ginv[a][c] * G.ginv[b][d] * s;
          for (std::size_t k = 0; k < U.size(); ++k) out[k] += w * G.A[c][d][k];
        }
    }
  return out;
}

/// L applied componentwise to a normal-valued tensor.
inline NormalTensor stabilityOperator(const LocalGeometry& G, const NormalTensor& T) {
  NormalTensor out = driftLaplacian(G, T);
  for (std::size_t I = 0; I < T.comps.size(); ++I) {
    const JetVec q = curvatureTerm(G, T.comps[I]);
    for (std::size_t k = 0; k < q.size(); ++k) out.comps[I][k] += 0.5 * T.comps[I][k] + q[k];
  }
  return out;
}

/// Scalar function on R^N, evaluable on doubles and on jets.
struct AmbientFunction {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Jet(const JetVec&)> jet;
};

template <class F>
AmbientFunction makeAmbientFunction(F f) {
  return {[f](const Eigen::VectorXd& x) { return static_cast<double>(f(x)); },
          [f](const JetVec& x) { return Jet(f(x)); }};
}

/// Values of the tangential gradient of phi o x at the base point.
inline Eigen::VectorXd tangentialGradient(const LocalGeometry& G, const Jet& phi) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(G.N);
  for (int a = 0; a < G.n; ++a)
    for (int b = 0; b < G.n; ++b)
      grad += G.ginv[a][b].value() * phi.partial(b).value() * values(G.dx[a]);
  return grad;
}

/// Ricci tensor in chart coordinates (values), from Christoffel jets.
inline Eigen::MatrixXd ricciFromMetric(const LocalGeometry& G) {
  if (G.order < 3) throw DerivativeOrderUnavailable("Ricci curvature needs jets of order >= 3");
  const int n = G.n;
  Eigen::MatrixXd Ric = Eigen::MatrixXd::Zero(n, n);
  // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) {
        const int c = a;
        s += G.gamma[a][d][b].partial(c).value() - G.gamma[a][c][b].partial(d).value();
        for (int e = 0; e < n; ++e)
          s += G.gamma[a][c][e].value() * G.gamma[e][d][b].value() -
               G.gamma[a][d][e].value() * G.gamma[e][c][b].value();
      }
      Ric(b, d) = s;
    }
  return Ric;
}

/// Chart-coordinate matrix of values -> orthonormal frame components.
inline Eigen::MatrixXd toFrame(const Eigen::MatrixXd& E, const Eigen::MatrixXd& T) {
  return E * T * E.transpose();
}

}  // namespace shrinkers
