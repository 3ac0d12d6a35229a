#include <gtest/gtest.h>
#include <sys/wait.h>

#include <locale>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "schema_check.hpp"
#include "shrinkers/registry.hpp"

using namespace shrinkers;

namespace {

struct Output {
  int code = -1;
  std::string text;
};

Output runTool(const std::string& args) {
  const std::string cmd = std::string(SHRINKERLAB_BIN) + " " + args + " 2>&1";
  Output out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.text.append(buf, n);
  const int status = pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string tempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("shrinkerlab_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const nlohmann::json& schema() {
  static const nlohmann::json s = schema_check::load(SCHEMA_PATH);
  return s;
}

}  // namespace

TEST(FormatDouble, SeventeenDigitsRoundTrip) {
  EXPECT_EQ(formatDouble(0.1), "0.10000000000000001");
  EXPECT_EQ(formatDouble(0.5), "0.5");
  EXPECT_EQ(formatDouble(-2.0), "-2");
  EXPECT_EQ(formatDouble(1e-300), "1e-300");
  EXPECT_EQ(formatDouble(2.0 / 3.0), "0.66666666666666663");
  EXPECT_EQ(formatDouble(std::nan("")), "null");
  for (double v : {4.0 / std::numbers::e, std::numbers::pi, 1.0 / 3.0, 6.02214076e23})
    EXPECT_EQ(std::stod(formatDouble(v)), v);
}

TEST(FormatDouble, IgnoresTheLocale) {
  struct Comma : std::numpunct<char> {
    char do_decimal_point() const override { return ','; }
  };
  const std::locale saved = std::locale::global(std::locale(std::locale::classic(), new Comma));
  std::ostringstream probe;
  probe << 1.5;
  EXPECT_EQ(probe.str(), "1,5");  // the global locale is in effect for streams
  EXPECT_EQ(formatDouble(1.5), "1.5");
  EXPECT_NE(dumpJson(nlohmann::json{{"x", 1.5}}).find("1.5"), std::string::npos);
  std::locale::global(saved);
}

TEST(RunReport, PassIsTheConjunctionOfChecks) {
  RunReport r;
  EXPECT_TRUE(r.pass());
  r.near("a", 1.0, 1.0 + 1e-9, 1e-8, kClosedForm);
  r.rel("b", 100.0, 101.0, 2e-2, kNumericalOracle);
  r.le("c", 1.0, 1.0, kExact);
  EXPECT_TRUE(r.pass());
  r.ge("d", 0.9, 1.0, kExact);
  EXPECT_FALSE(r.pass());
  EXPECT_EQ(r.failures(), 1);
  RunReport s;
  s.near("nan", std::nan(""), 0.0, 1e300, kExact);
  EXPECT_FALSE(s.pass());
  RunReport t;
  t.error("boom", InvalidArgument("bad"));
  EXPECT_FALSE(t.pass());
  ASSERT_EQ(t.notes.size(), 1u);
}

TEST(RunReport, JsonValidatesAndRoundTrips) {
  RunReport r;
  r.command = "entropy";
  r.fixture = "graph-z3";
  RunConfig cfg;
  const auto f = findFixture("graph-z3");
  ASSERT_TRUE(f);
  EXPECT_EQ(f->m, 3);
  r.config = cfg.echo(*f);
  functionalsSuite(r, *f, cfg);
  EXPECT_TRUE(r.pass());
  const std::string text = dumpJson(toJson(r));
  const auto j = nlohmann::json::parse(text);
  const auto err = schema_check::validate(j, schema());
  EXPECT_FALSE(err) << *err;
  EXPECT_EQ(j["checks"].size(), r.checks.size());
  for (std::size_t i = 0; i < r.checks.size(); ++i) EXPECT_EQ(j["checks"][i]["value"].get<double>(), r.checks[i].value);
  EXPECT_EQ(dumpJson(j), text);
}

TEST(Schema, RejectsMalformedReports) {
  RunReport r;
  r.command = "verify";
  r.fixture = "plane";
  r.config = RunConfig{}.echo(*findFixture("plane"));
  r.near("x", 1.0, 1.0, 0.1, kExact);
  auto j = toJson(r);
  EXPECT_FALSE(schema_check::validate(j, schema()));
  auto bad = j;
  bad["checks"][0]["provenance"] = "guess";
  EXPECT_TRUE(schema_check::validate(bad, schema()));
  bad = j;
  bad.erase("pass");
  EXPECT_TRUE(schema_check::validate(bad, schema()));
  bad = j;
  bad["timing"] = 1.0;
  EXPECT_TRUE(schema_check::validate(bad, schema()));
}

TEST(Registry, KnownAndUnknownIds) {
  for (const char* id : {"plane", "sphere2", "sphere3", "circle", "clifford", "al-curve", "graph-zm"})
    EXPECT_TRUE(findFixture(id)) << id;
  EXPECT_EQ(findFixture("graph-zm")->m, 2);
  for (const char* id : {"bogus", "graph-z", "graph-z0", "graph-zx", "sphere"}) EXPECT_FALSE(findFixture(id)) << id;
}

TEST(Registry, CurveTargetsAreCoprimeAndInRange) {
  const auto t = curveTargets(4);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[0], std::make_pair(2, 3));
  EXPECT_EQ(t[1], std::make_pair(3, 5));
  EXPECT_EQ(t[2], std::make_pair(4, 7));
  EXPECT_EQ(t[3], std::make_pair(5, 8));
}

TEST(PlotData, SpectrumAndRefinementCsv) {
  EigenResult e;
  e.values = Eigen::Vector3d(0.0, 0.5, 0.5);
  e.clusters = {{0}, {1, 2}};
  const std::string path = tempPath("spectrum.csv");
  emitSpectrumCsv(e, path, "test spectrum");
  EXPECT_EQ(slurp(path), "# test spectrum\n# k: eigenvalue index; mu: eigenvalue; multiplicity: size of its cluster\n"
                         "k,mu,multiplicity\n0,0,1\n1,0.5,2\n2,0.5,2\n");
  std::filesystem::remove(path);

  // error = C h^2 exactly gives slope 2
  const auto rows = refinementRows({0.4, 0.2, 0.1}, {0.5 + 0.16, 0.5 + 0.04, 0.5 + 0.01}, 0.5);
  EXPECT_FALSE(std::isfinite(rows[0].slope));
  EXPECT_NEAR(rows[1].slope, 2.0, 1e-10);
  EXPECT_NEAR(rows[2].slope, 2.0, 1e-10);
  const std::string rpath = tempPath("refinement.csv");
  emitRefinementCsv(rows, rpath, "study");
  const std::string text = slurp(rpath);
  EXPECT_NE(text.find("h,mu1,error,slope\n0.40000000000000002,0.66000000000000003,"), std::string::npos) << text;
  std::filesystem::remove(rpath);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(runTool("fixtures list").code, 0);
  const auto bogus = runTool("entropy --fixture bogus");
  EXPECT_EQ(bogus.code, 2);
  EXPECT_NE(bogus.text.find("unknown fixture"), std::string::npos);
  EXPECT_NE(bogus.text.find("Usage"), std::string::npos);
  EXPECT_EQ(runTool("entropy --fixture plane --resolution abc").code, 2);
  EXPECT_EQ(runTool("entropy").code, 2);
  EXPECT_EQ(runTool("frobnicate").code, 2);
  EXPECT_EQ(runTool("spectrum --mesh " + tempPath("does-not-exist.json")).code, 3);
  EXPECT_EQ(runTool("entropy --fixture graph-zm --out " + tempPath("no/such/dir/r.json")).code, 3);
}

TEST(Cli, MeshFileAndFailureExit) {
  const std::string mesh = tempPath("octa.json");
  {
    std::ofstream out(mesh);
    out << R"({"ambient_dim": 3, "genus": 0,
      "vertices": [[2,0,0],[0,2,0],[0,0,2],[-2,0,0],[0,-2,0],[0,0,-2]],
      "triangles": [[0,1,2],[1,3,2],[3,4,2],[4,0,2],[1,0,5],[3,1,5],[4,3,5],[0,4,5]]})";
  }
  const std::string out = tempPath("octa_report.json");
  const auto r = runTool("verify --mesh " + mesh + " --out " + out);
  EXPECT_EQ(r.code, 0) << r.text;
  const auto j = schema_check::load(out);
  EXPECT_FALSE(schema_check::validate(j, schema()));
  EXPECT_EQ(j["fixture"], "mesh");
  EXPECT_TRUE(j["pass"].get<bool>());

  // an open mesh is an input failure
  {
    std::ofstream o(mesh);
    o << R"({"ambient_dim": 3, "genus": 0, "vertices": [[1,0,0],[0,1,0],[0,0,1],[-1,0,0]],
      "triangles": [[0,1,2],[1,3,2]]})";
  }
  EXPECT_EQ(runTool("spectrum --mesh " + mesh).code, 3);
  // tolerances so tight that a check fails give exit 1
  EXPECT_EQ(runTool("verify --fixture sphere3 --tol 1e-30").code, 1);
  std::filesystem::remove(mesh);
  std::filesystem::remove(out);
}

TEST(Cli, CliffordSpectrum) {
  const auto r = runTool("spectrum --fixture clifford --count 6");
  EXPECT_EQ(r.code, 0) << r.text;
  EXPECT_NE(r.text.find("mu_6"), std::string::npos);
  EXPECT_EQ(r.text.find("mu_7"), std::string::npos);
  EXPECT_NE(r.text.find("mu_1  = 0.50"), std::string::npos) << r.text;
  EXPECT_NE(r.text.find("(multiplicity 4)"), std::string::npos);
}

TEST(Cli, ReportWritesPlotData) {
  const std::string dir = tempPath("report_dir");
  std::filesystem::create_directories(dir);
  const auto r = runTool("report --fixture circle --resolution 512 --out " + dir + "/circle.json");
  EXPECT_EQ(r.code, 0) << r.text;
  for (const char* f : {"circle.json", "circle.spectrum.csv", "circle.refinement.csv", "circle.curve.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir + "/" + f)) << f;
  const std::string curve = slurp(dir + "/circle.curve.csv");
  EXPECT_NE(curve.find("s,x,y,theta,k\n"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir + "/circle.json.tmp"));
  std::filesystem::remove_all(dir);
  EXPECT_EQ(runTool("report --fixture circle").code, 2);  // --out is required
}
