#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shrinkers/registry.hpp"

using namespace shrinkers;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Options {
  std::string fixture;
  RunConfig run;
  std::string out;
};

void printReport(const RunReport& r, const SuiteArtifacts& art, int count) {
  if (art.spectrum) {
    const EigenResult& s = *art.spectrum;
    const int shown = std::min(count > 0 ? count : s.count() - 1, s.count() - 1);
    std::printf("%s\n", art.spectrum_title.c_str());
    for (int k = 0; k <= shown; ++k)
      std::printf("  mu_%-2d = %.10f  (multiplicity %d)\n", k, s.values[k], s.multiplicityOf(k));
  }
  for (const auto& c : r.checks) {
    std::printf("%s  %-44s %-14.8g %s %.8g", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.relation == "le" ? "<=" : c.relation == "ge" ? ">=" : c.relation == "eq" ? "==" : "~", c.expected);
    if (c.tolerance > 0) std::printf(" (%s tol %.1e)", c.relation.c_str(), c.tolerance);
    std::printf("\n");
  }
  for (const auto& m : r.measurements) std::printf("      %-44s %.12g\n", m.name.c_str(), m.value);
  for (const auto& n : r.notes) std::printf("note: %s\n", n.c_str());
  std::printf("%s: %zu checks, %d failed\n", r.pass() ? "PASS" : "FAIL", r.checks.size(), r.failures());
}

std::string sibling(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

void emitPlots(const SuiteArtifacts& art, const std::string& out) {
  if (art.spectrum) {
    const std::string path = sibling(out, ".spectrum.csv");
    emitSpectrumCsv(*art.spectrum, path, art.spectrum_title);
    std::printf("wrote %s\n", path.c_str());
  }
  if (!art.refinement.empty()) {
    const std::string path = sibling(out, ".refinement.csv");
    emitRefinementCsv(art.refinement, path, art.refinement_title);
    std::printf("wrote %s\n", path.c_str());
  }
  if (art.curve) {
    const std::string path = sibling(out, ".curve.csv");
    writeCurveCsv(*art.curve, path);
    std::printf("wrote %s\n", path.c_str());
  }
}

int run(const std::string& command, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  r.command = command;
  SuiteArtifacts art;

  if (command == "curves") {
    r.fixture = "curves";
    FixtureInfo dummy{"curves", "curve", true, 1024, ""};
    r.config = o.run.echo(dummy);
    const auto found = curveSuite(r, o.run);
    for (const auto& c : found)
      std::printf("curve p=%d q=%d  k0 %.12f  length %.10f  closure %.2e  degree %d\n", c.p, c.q, c.k0, c.length,
                  c.closure_error, c.gauss_degree);
  } else if (!o.run.mesh.empty()) {
    if (command == "stability")
      throw InvalidArgument("stability needs a built-in fixture (mesh files carry no normal data)");
    const TriangleMeshN m = loadMesh(o.run.mesh);
    r.fixture = "mesh";
    FixtureInfo info{"mesh", "mesh", false, 0, o.run.mesh};
    r.config = o.run.echo(info);
    art = meshFileSuite(r, m, o.run, command != "spectrum", command != "entropy");
  } else {
    const auto f = findFixture(o.fixture);
    r.fixture = f->id;
    r.config = o.run.echo(*f);
    if (command == "entropy")
      functionalsSuite(r, *f, o.run);
    else if (command == "spectrum")
      art = spectralSuite(r, *f, o.run);
    else if (command == "stability")
      stabilitySuite(r, *f, o.run);
    else
      art = verifyFixture(r, *f, o.run);
  }

  printReport(r, art, o.run.count);
  if (!o.out.empty()) {
    writeReport(r, o.out);
    std::printf("wrote %s\n", o.out.c_str());
    if (command == "report") emitPlots(art, o.out);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("elapsed %.2f s\n", secs);
  return r.pass() ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for self-shrinkers of mean curvature flow", "shrinkerlab"};
  app.require_subcommand(1);
  Options o;

  auto* fixtures = app.add_subcommand("fixtures", "Fixture registry");
  fixtures->add_subcommand("list", "List the built-in fixtures");
  fixtures->require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commandList[] = {
      {"entropy", "F-functional, entropy and Willmore checks"},
      {"spectrum", "Drift Laplacian spectrum and the conformal comparison"},
      {"stability", "Instability witnesses, counting bounds and the scalar stability operator"},
      {"curves", "Shoot closed curve shrinkers and run the curve suite"},
      {"verify", "Every suite that applies to the fixture"},
      {"report", "verify, plus CSV plot data next to --out"},
  };
  std::vector<CLI::App*> commands;
  for (const auto& s : commandList) {
    auto* sub = app.add_subcommand(s.name, s.help);
    if (std::string(s.name) != "curves") {
      sub->add_option("--fixture", o.fixture, "Fixture id (see `fixtures list`)");
      sub->add_option("--mesh", o.run.mesh, "Mesh JSON file used instead of a fixture");
    }
    sub->add_option("--resolution", o.run.resolution, "Mesh resolution or curve samples (0: fixture default)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--count", o.run.count, "Number of eigenvalues or curve targets")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol", o.run.tol, "Tolerance for pointwise identity residuals")->check(CLI::PositiveNumber);
    auto* out = sub->add_option("--out", o.out, "RunReport JSON path");
    if (std::string(s.name) == "report") out->required();
    sub->add_option("--seed", o.run.seed, "Seed for randomized checks and iterative solvers");
    commands.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (fixtures->parsed()) {
    for (const auto& f : fixtureRegistry()) std::printf("%-10s %-10s %s\n", f.id.c_str(), f.kind.c_str(), f.description.c_str());
    return kExitPass;
  }

  for (auto* sub : commands) {
    if (!sub->parsed()) continue;
    const std::string name = sub->get_name();
    if (name != "curves") {
      if (o.fixture.empty() == o.run.mesh.empty()) {
        std::cerr << "error: give exactly one of --fixture or --mesh\n\n" << sub->help();
        return kExitUsage;
      }
      if (!o.fixture.empty() && !findFixture(o.fixture)) {
        std::cerr << "error: unknown fixture '" << o.fixture << "'\n\n" << sub->help();
        return kExitUsage;
      }
    }
    try {
      return run(name, o);
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    } catch (const ParseError& e) {
      std::cerr << "cannot read mesh: " << e.what() << "\n";
      return kExitIo;
    } catch (const MeshValidation& e) {
      std::cerr << "invalid mesh: " << e.what() << "\n";
      return kExitIo;
    } catch (const InvalidArgument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitCheckFailed;
    }
  }
  return kExitUsage;
}
