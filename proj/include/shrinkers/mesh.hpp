#pragma once

// Simplicial meshes (closed curves and closed surfaces) with vertices in R^N,
// structured meshing of closed analytic immersions, validation, and the
// JSON mesh format.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shrinkers/errors.hpp"
#include "shrinkers/immersion.hpp"
#include "shrinkers/io.hpp"

namespace shrinkers {

template <int Dim>
struct SimplexMesh {
  static constexpr int kDim = Dim;
  int ambient_dim = 0;
  std::vector<Eigen::VectorXd> vertices;
  std::vector<std::array<int, Dim + 1>> cells;
  int genus = 0;
  // Parameters of each vertex when the mesh was built from an immersion.
  std::vector<ParamPoint> vertex_params;

  int vertexCount() const { return static_cast<int>(vertices.size()); }
};

using TriangleMeshN = SimplexMesh<2>;
using CurveMesh = SimplexMesh<1>;

/// Volume (length or area) of one simplex.
template <int Dim>
double simplexVolume(const SimplexMesh<Dim>& m, const std::array<int, Dim + 1>& c) {
  Eigen::MatrixXd B(m.ambient_dim, Dim);
  for (int i = 0; i < Dim; ++i) B.col(i) = m.vertices[c[i + 1]] - m.vertices[c[0]];
  const double det = (B.transpose() * B).determinant();
  return std::sqrt(std::max(det, 0.0)) / (Dim == 2 ? 2.0 : 1.0);
}

template <int Dim>
double meshVolume(const SimplexMesh<Dim>& m) {
  double s = 0.0;
  for (const auto& c : m.cells) s += simplexVolume(m, c);
  return s;
}

namespace detail {

inline std::string edgeName(int a, int b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace detail

/// Checks the closed-mesh invariants and sets `genus` (surfaces) from the
/// Euler characteristic. Throws MeshValidation listing up to 10 violations.
template <int Dim>
void validateMesh(SimplexMesh<Dim>& m) {
  std::vector<std::string> problems;
  auto report = [&](std::string s) {
    if (problems.size() < 10) problems.push_back(std::move(s));
  };
  const int V = m.vertexCount();
  for (const auto& v : m.vertices)
    if (v.size() != m.ambient_dim) report("vertex of dimension " + std::to_string(v.size()));
  bool indicesOk = true;
  for (std::size_t t = 0; t < m.cells.size(); ++t)
    for (int idx : m.cells[t])
      if (idx < 0 || idx >= V) {
        report("cell " + std::to_string(t) + " references vertex " + std::to_string(idx));
        indicesOk = false;
      }
  if (!indicesOk || m.cells.empty()) {
    if (m.cells.empty()) report("mesh has no cells");
    std::string msg = "invalid mesh:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw MeshValidation(msg);
  }

  if constexpr (Dim == 2) {
    std::map<std::pair<int, int>, int> edges;
    for (std::size_t t = 0; t < m.cells.size(); ++t) {
      const auto& c = m.cells[t];
      for (int k = 0; k < 3; ++k) {
        const int a = c[k], b = c[(k + 1) % 3];
        ++edges[{std::min(a, b), std::max(a, b)}];
      }
      double longest = 0.0;
      for (int k = 0; k < 3; ++k)
        longest = std::max(longest, (m.vertices[c[k]] - m.vertices[c[(k + 1) % 3]]).squaredNorm());
      if (simplexVolume(m, c) < 1e-14 * longest || longest == 0.0)
        report("triangle " + std::to_string(t) + " is degenerate");
    }
    for (const auto& [e, count] : edges)
      if (count != 2)
        report("edge " + detail::edgeName(e.first, e.second) + " is shared by " + std::to_string(count) +
               " triangle" + (count == 1 ? "" : "s"));
    const long chi = static_cast<long>(V) - static_cast<long>(edges.size()) + static_cast<long>(m.cells.size());
    if (chi % 2 != 0) report("odd Euler characteristic " + std::to_string(chi));
    else m.genus = static_cast<int>(1 - chi / 2);
  } else {
    std::vector<int> degree(static_cast<std::size_t>(V), 0);
    for (std::size_t s = 0; s < m.cells.size(); ++s) {
      const auto& c = m.cells[s];
      for (int idx : c) ++degree[static_cast<std::size_t>(idx)];
      if ((m.vertices[c[0]] - m.vertices[c[1]]).norm() == 0.0)
        report("segment " + std::to_string(s) + " is degenerate");
    }
    for (int v = 0; v < V; ++v)
      if (degree[static_cast<std::size_t>(v)] != 2)
        report("vertex " + std::to_string(v) + " lies on " + std::to_string(degree[static_cast<std::size_t>(v)]) +
               " segments");
    m.genus = 0;
  }
  if (!problems.empty()) {
    std::string msg = "invalid mesh:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw MeshValidation(msg);
  }
}

/// Structured mesh of a closed immersion. Spheres: resolution - 1 latitude
/// rings of 2 * resolution vertices plus the two poles (resolution 2 gives an
/// octahedron). Tori: resolution x resolution periodic grid. Curves:
/// `resolution` equally spaced parameters.
inline TriangleMeshN buildMesh(const AnalyticImmersion& imm, int resolution) {
  if (imm.intrinsic_dim != 2 || !imm.closed())
    throw InvalidArgument("buildMesh needs a closed surface");
  if (resolution < 2) throw InvalidArgument("resolution must be at least 2");
  TriangleMeshN m;
  m.ambient_dim = imm.ambient_dim;
  const Chart& c = imm.charts.at(0);
  auto add = [&](const ParamPoint& p) {
    m.vertices.push_back(imm.position(p));
    m.vertex_params.push_back(p);
    return m.vertexCount() - 1;
  };
  if (imm.topology == Topology::Sphere) {
    const int rings = resolution - 1, cols = 2 * resolution;
    // chart 0's polar angle runs from the pole at p3 = +1 (first entry of
    // `poles` in chart 1) to p3 = -1.
    const int north = add(imm.poles[0]);
    for (int i = 1; i <= rings; ++i)
      for (int j = 0; j < cols; ++j)
        add({0, c.lower[0] + (c.upper[0] - c.lower[0]) * i / resolution,
             c.lower[1] + (c.upper[1] - c.lower[1]) * j / cols});
    const int south = add(imm.poles[1]);
    auto ring = [&](int i, int j) { return 1 + (i - 1) * cols + ((j % cols) + cols) % cols; };
    for (int j = 0; j < cols; ++j) m.cells.push_back({north, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i < rings; ++i)
      for (int j = 0; j < cols; ++j) {
        m.cells.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
        m.cells.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
      }
    for (int j = 0; j < cols; ++j) m.cells.push_back({south, ring(rings, j + 1), ring(rings, j)});
  } else if (imm.topology == Topology::Torus) {
    const int r = resolution;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        add({0, c.lower[0] + (c.upper[0] - c.lower[0]) * i / r, c.lower[1] + (c.upper[1] - c.lower[1]) * j / r});
    auto id = [&](int i, int j) { return ((i % r) * r) + (j % r); };
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        m.cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        m.cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
  } else {
    throw InvalidArgument("buildMesh supports sphere and torus topologies");
  }
  validateMesh(m);
  if (imm.genus && *imm.genus != m.genus)
    throw MeshValidation("mesh genus " + std::to_string(m.genus) + " differs from declared genus " +
                         std::to_string(*imm.genus));
  return m;
}

inline CurveMesh buildCurveMesh(const AnalyticImmersion& imm, int resolution) {
  if (imm.intrinsic_dim != 1 || !imm.closed()) throw InvalidArgument("buildCurveMesh needs a closed curve");
  if (resolution < 3) throw InvalidArgument("resolution must be at least 3");
  CurveMesh m;
  m.ambient_dim = imm.ambient_dim;
  const Chart& c = imm.charts.at(0);
  for (int i = 0; i < resolution; ++i) {
    const ParamPoint p{0, c.lower[0] + (c.upper[0] - c.lower[0]) * i / resolution, 0.0};
    m.vertices.push_back(imm.position(p));
    m.vertex_params.push_back(p);
    m.cells.push_back({i, (i + 1) % resolution});
  }
  validateMesh(m);
  return m;
}

// ---------------------------------------------------------------------------
// JSON mesh format: {"ambient_dim": N, "genus": g, "vertices": [[...]], "triangles": [[a, b, c]]}

inline nlohmann::json meshToJson(const TriangleMeshN& m) {
  nlohmann::json j;
  j["ambient_dim"] = m.ambient_dim;
  j["genus"] = m.genus;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : m.vertices) j["vertices"].push_back(std::vector<double>(v.data(), v.data() + v.size()));
  j["triangles"] = nlohmann::json::array();
  for (const auto& t : m.cells) j["triangles"].push_back({t[0], t[1], t[2]});
  return j;
}

inline TriangleMeshN meshFromJson(const nlohmann::json& j) {
  TriangleMeshN m;
  try {
    m.ambient_dim = j.at("ambient_dim").get<int>();
    if (m.ambient_dim < 2) throw ParseError("ambient_dim must be at least 2");
    for (const auto& v : j.at("vertices")) {
      const auto xs = v.get<std::vector<double>>();
      if (static_cast<int>(xs.size()) != m.ambient_dim)
        throw ParseError("vertex with " + std::to_string(xs.size()) + " coordinates, expected " +
                         std::to_string(m.ambient_dim));
      m.vertices.push_back(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())));
    }
    for (const auto& t : j.at("triangles")) {
      const auto idx = t.get<std::vector<int>>();
      if (idx.size() != 3) throw ParseError("triangle with " + std::to_string(idx.size()) + " indices");
      m.cells.push_back({idx[0], idx[1], idx[2]});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed mesh: ") + e.what());
  }
  validateMesh(m);
  if (j.contains("genus") && !j["genus"].is_null() && j["genus"].get<int>() != m.genus)
    throw MeshValidation("declared genus " + std::to_string(j["genus"].get<int>()) +
                         " differs from Euler characteristic genus " + std::to_string(m.genus));
  return m;
}

inline TriangleMeshN loadMesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return meshFromJson(j);
}

inline void saveMesh(const TriangleMeshN& m, const std::string& path) {
  writeFileAtomic(path, meshToJson(m).dump(1) + "\n");
}

}  // namespace shrinkers
