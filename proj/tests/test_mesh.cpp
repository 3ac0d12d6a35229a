#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "shrinkers/fixtures.hpp"
#include "shrinkers/mesh.hpp"
#include "shrinkers/sampled.hpp"

using namespace shrinkers;

namespace {

std::string tempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("shrinkers_" + name)).string();
}

TriangleMeshN octahedron() {
  TriangleMeshN m;
  m.ambient_dim = 3;
  for (int s : {1, -1})
    for (int a = 0; a < 3; ++a) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
      v[a] = s;
      m.vertices.push_back(v);
    }
  // vertices: 0 +x, 1 +y, 2 +z, 3 -x, 4 -y, 5 -z
  m.cells = {{0, 1, 2}, {1, 3, 2}, {3, 4, 2}, {4, 0, 2}, {1, 0, 5}, {3, 1, 5}, {4, 3, 5}, {0, 4, 5}};
  return m;
}

}  // namespace

TEST(BuildMesh, SphereResolution32) {
  const auto m = buildMesh(fixtures::sphere(2.0), 32);
  EXPECT_EQ(m.genus, 0);
  EXPECT_NEAR(meshVolume(m) / (16 * fixtures::kPi), 1.0, 1e-2);
}

TEST(BuildMesh, TorusResolution64HasGenusOne) {
  const auto m = buildMesh(fixtures::cliffordTorus(), 64);
  EXPECT_EQ(m.genus, 1);
  EXPECT_EQ(m.vertexCount(), 64 * 64);
  EXPECT_NEAR(meshVolume(m) / (8 * fixtures::kPi * fixtures::kPi), 1.0, 1e-2);
}

TEST(BuildMesh, ResolutionTwoIsAnOctahedron) {
  const auto m = buildMesh(fixtures::sphere(2.0), 2);
  EXPECT_EQ(m.vertexCount(), 6);
  EXPECT_EQ(m.cells.size(), 8u);
  EXPECT_EQ(m.genus, 0);
  for (const auto& v : m.vertices) EXPECT_NEAR(v.norm(), 2.0, 1e-12);
}

TEST(BuildMesh, AreaConvergesAtSecondOrder) {
  const auto s = fixtures::sphere(2.0);
  const double exact = 16 * fixtures::kPi;
  const double e1 = std::abs(meshVolume(buildMesh(s, 16)) - exact);
  const double e2 = std::abs(meshVolume(buildMesh(s, 32)) - exact);
  const double e3 = std::abs(meshVolume(buildMesh(s, 64)) - exact);
  EXPECT_GE(std::log2(e1 / e2), 1.8);
  EXPECT_GE(std::log2(e2 / e3), 1.8);
}

TEST(BuildMesh, RejectsOpenSurfaces) {
  EXPECT_THROW(buildMesh(fixtures::plane(), 8), InvalidArgument);
  EXPECT_THROW(buildMesh(fixtures::circle(1.0), 8), InvalidArgument);
}

TEST(BuildMesh, CurveMesh) {
  const auto m = buildCurveMesh(fixtures::circle(std::sqrt(2.0)), 256);
  EXPECT_EQ(m.vertexCount(), 256);
  EXPECT_NEAR(meshVolume(m), 2 * fixtures::kPi * std::sqrt(2.0), 1e-3);
}

TEST(ValidateMesh, OpenEdgeIsNamed) {
  auto m = octahedron();
  validateMesh(m);
  EXPECT_EQ(m.genus, 0);
  m.cells.pop_back();
  try {
    validateMesh(m);
    FAIL() << "expected MeshValidation";
  } catch (const MeshValidation& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("edge (0, 4)"), std::string::npos) << what;
    EXPECT_NE(what.find("shared by 1 triangle"), std::string::npos) << what;
  }
}

TEST(ValidateMesh, DegenerateAndOutOfRange) {
  auto m = octahedron();
  m.vertices[5] = 0.5 * (m.vertices[0] + m.vertices[1]);  // triangle (1, 0, 5) becomes a segment
  EXPECT_THROW(validateMesh(m), MeshValidation);
  auto bad = octahedron();
  bad.cells[0][0] = 17;
  EXPECT_THROW(validateMesh(bad), MeshValidation);
}

TEST(MeshJson, OctahedronFileLoads) {
  const std::string path = tempPath("octa.json");
  {
    std::ofstream out(path);
    out << R"({"ambient_dim": 3, "genus": 0,
      "vertices": [[1,0,0],[0,1,0],[0,0,1],[-1,0,0],[0,-1,0],[0,0,-1]],
      "triangles": [[0,1,2],[1,3,2],[3,4,2],[4,0,2],[1,0,5],[3,1,5],[4,3,5],[0,4,5]]})";
  }
  const auto m = loadMesh(path);
  EXPECT_EQ(m.genus, 0);
  EXPECT_EQ(m.vertexCount(), 6);
  std::filesystem::remove(path);
}

TEST(MeshJson, CliffordRoundTripKeepsFourDimensions) {
  const auto m = buildMesh(fixtures::cliffordTorus(), 12);
  const std::string path = tempPath("clifford.json");
  saveMesh(m, path);
  const auto back = loadMesh(path);
  EXPECT_EQ(back.ambient_dim, 4);
  EXPECT_EQ(back.genus, 1);
  ASSERT_EQ(back.vertexCount(), m.vertexCount());
  for (int i = 0; i < m.vertexCount(); ++i) EXPECT_EQ((back.vertices[i] - m.vertices[i]).norm(), 0.0);
  EXPECT_EQ(back.cells, m.cells);
  std::filesystem::remove(path);
}

TEST(MeshJson, Errors) {
  const std::string path = tempPath("broken.json");
  {
    std::ofstream out(path);
    out << R"({"ambient_dim": 3, "vertices": [[1,0]], "triangles": []})";
  }
  EXPECT_THROW(loadMesh(path), ParseError);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_THROW(loadMesh(path), ParseError);
  {
    std::ofstream out(path);
    out << R"({"ambient_dim": 3, "genus": 0,
      "vertices": [[1,0,0],[0,1,0],[0,0,1],[-1,0,0]],
      "triangles": [[0,1,2],[1,3,2]]})";
  }
  EXPECT_THROW(loadMesh(path), MeshValidation);
  std::filesystem::remove(path);
  EXPECT_THROW(loadMesh(tempPath("missing.json")), IoError);
}

TEST(SampleMesh, DiscreteMeanCurvatureOnSphere) {
  const auto s = fixtures::sphere(2.0);
  const auto m = buildMesh(s, 32);
  const auto exact = sampleImmersion(s, m);
  const auto est = sampleMesh(m);
  // Compare away from the poles where the structured mesh is regular.
  for (int v = 40; v < m.vertexCount() - 40; v += 37) {
    EXPECT_NEAR((est.H[v] - exact.H[v]).norm(), 0.0, 2e-2) << v;
    const Eigen::MatrixXd P1 = est.tangents[v] * est.tangents[v].transpose();
    const Eigen::MatrixXd P2 = exact.tangents[v] * exact.tangents[v].transpose();
    EXPECT_LT((P1 - P2).norm(), 5e-2);
  }
}
