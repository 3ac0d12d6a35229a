#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "shrinkers/curves.hpp"
#include "shrinkers/fixtures.hpp"
#include "shrinkers/functionals.hpp"
#include "shrinkers/identities.hpp"
#include "shrinkers/mesh.hpp"
#include "shrinkers/report.hpp"
#include "shrinkers/sampled.hpp"
#include "shrinkers/spectral.hpp"
#include "shrinkers/stability.hpp"

namespace shrinkers {

struct FixtureInfo {
  std::string id;
  std::string kind;  // surface | curve | noncompact | mesh
  bool shrinker = true;
  int default_resolution = 0;
  std::string description;
  int m = 0;  // graph exponent
};

inline const std::vector<FixtureInfo>& fixtureRegistry() {
  static const std::vector<FixtureInfo> list = {
      {"plane", "noncompact", true, 0, "plane through the origin in R^3"},
      {"sphere2", "surface", true, 64, "round sphere of radius 2 in R^3"},
      {"sphere3", "surface", false, 32, "round sphere of radius 3 in R^3 (not a shrinker)"},
      {"circle", "curve", true, 1024, "circle of radius sqrt 2 in R^2"},
      {"clifford", "surface", true, 48, "product of two circles of radius sqrt 2 in R^4"},
      {"al-curve", "curve", true, 1024, "first non-circular closed curve shrinker (rotation index 2)"},
      {"graph-zm", "noncompact", false, 0, "graph of z -> z^m in C^2 (m = 2; graph-z<m> for other m)", 2},
  };
  return list;
}

/// Accepts the registry ids and graph-z<m> for m >= 1.
inline std::optional<FixtureInfo> findFixture(const std::string& id) {
  for (const auto& f : fixtureRegistry())
    if (f.id == id) return f;
  const std::string prefix = "graph-z";
  if (id.rfind(prefix, 0) == 0 && id.size() > prefix.size()) {
    const std::string tail = id.substr(prefix.size());
    if (tail.find_first_not_of("0123456789") == std::string::npos && tail.size() < 4) {
      FixtureInfo f = fixtureRegistry().back();
      f.id = id;
      f.m = std::stoi(tail);
      if (f.m >= 1) return f;
    }
  }
  return std::nullopt;
}

/// Solved once per process.
inline const CurveShrinker& alCurve() {
  static const CurveShrinker c = shootClosed(2, 3);
  return c;
}

inline CurveShrinker fixtureCurve(const FixtureInfo& f, int samples) {
  CurveConfig cfg;
  cfg.samples = samples;
  if (f.id == "circle") return circleShrinker(cfg);
  if (f.id == "al-curve") {
    const auto& c = alCurve();
    return samples == c.size() ? c : sampleCurve(c.k0, c.length, c.p, c.q, cfg);
  }
  throw InvalidArgument(f.id + " is not a curve fixture");
}

inline AnalyticImmersion fixtureImmersion(const FixtureInfo& f) {
  if (f.id == "plane") return fixtures::plane(3);
  if (f.id == "sphere2") return fixtures::sphere(2.0);
  if (f.id == "sphere3") return fixtures::sphere(3.0);
  if (f.id == "circle") return fixtures::circle(std::numbers::sqrt2);
  if (f.id == "clifford") return fixtures::cliffordTorus();
  if (f.id == "al-curve") return fourierImmersion(alCurve(), "al-curve");
  if (f.m >= 1) return fixtures::complexGraph(f.m, 1.0);
  throw InvalidArgument("unknown fixture " + f.id);
}

inline std::optional<double> closedFormEntropy(const std::string& id) {
  const double e = std::numbers::e, pi = std::numbers::pi;
  if (id == "plane") return 1.0;
  if (id == "sphere2" || id == "sphere3") return 4.0 / e;
  if (id == "circle") return std::sqrt(2 * pi / e);
  if (id == "clifford") return 2 * pi / e;
  return std::nullopt;
}

inline std::optional<double> closedFormF(const std::string& id) {
  if (id == "sphere3") return 9.0 * std::exp(-2.25);
  return closedFormEntropy(id);
}

struct RunConfig {
  std::string mesh;     // mesh file used instead of a fixture
  int resolution = 0;   // 0: fixture default
  int count = 0;        // 0: command default
  double tol = 1e-8;    // pointwise identity tolerance
  unsigned seed = 20240601u;

  int resolutionFor(const FixtureInfo& f) const { return resolution > 0 ? resolution : f.default_resolution; }
  nlohmann::json echo(const FixtureInfo& f) const {
    nlohmann::json j;
    j["mesh"] = mesh;
    j["resolution"] = f.kind == "noncompact" ? 0 : resolutionFor(f);
    j["count"] = count;
    j["tol"] = tol;
    j["seed"] = seed;
    return j;
  }
};

/// Data a suite computed that the plot emitter can use.
struct SuiteArtifacts {
  std::optional<EigenResult> spectrum;
  std::string spectrum_title;
  std::vector<RefinementRow> refinement;
  std::string refinement_title;
  std::optional<CurveShrinker> curve;
};

template <class F>
void guarded(RunReport& r, const std::string& name, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    r.error(name, e);
  }
}

inline SolverOptions solverOptions(const RunConfig& cfg) {
  SolverOptions o;
  o.seed = cfg.seed;
  return o;
}

// ---------------------------------------------------------------------------
// Functionals: F, entropy, Willmore, profile, area growth.

inline void functionalsSuite(RunReport& r, const FixtureInfo& f, const RunConfig& cfg) {
  const double e = std::numbers::e;
  if (f.kind == "noncompact" && !f.shrinker) {
    guarded(r, "area-growth", [&] {
      const double pi = std::numbers::pi;
      r.rel("area-growth/m1-r10-ratio", euclideanAreaGrowth(1, 10.0).ratio, pi, 1e-10, kClosedForm);
      const double a1 = euclideanAreaGrowth(1, 2.0).area;
      r.ge("area-growth/m3-r2-vs-m1", euclideanAreaGrowth(3, 2.0).area, 0.75 * 3 * a1, kNumericalOracle);
      for (double rad : {1.0, 2.0, 4.0, 8.0}) {
        const auto g = euclideanAreaGrowth(f.m, rad);
        r.measure("area-growth/m" + std::to_string(f.m) + "-ratio-r" + formatDouble(rad), g.ratio);
      }
      const double C = measuredGrowthConstant({1, 2, 3, 4, 5}, {1, 2, 4, 8});
      r.measure("area-growth/measured-constant", C);
      r.ge("area-growth/measured-constant-positive", C, 0.0, kNumericalOracle);
    });
    return;
  }

  const AnalyticImmersion imm = fixtureImmersion(f);
  double F = 0.0;
  guarded(r, "F", [&] {
    F = gaussianArea(imm);
    if (auto cf = closedFormF(f.id))
      r.rel("F", F, *cf, 1e-6, kClosedForm);
    else
      r.measure("F", F);
  });

  guarded(r, "entropy", [&] {
    const EntropyResult ent = entropy(imm);
    r.measure("entropy/c", ent.c);
    r.measure("entropy/x0-norm", ent.x0.size() ? ent.x0.norm() : 0.0);
    r.measure("entropy/converged-starts", ent.converged_starts);
    if (auto cf = closedFormEntropy(f.id))
      r.rel("entropy/lambda", ent.lambda, *cf, 1e-3, kClosedForm);
    else
      r.ge("entropy/lambda-above-circle", ent.lambda, *closedFormEntropy("circle"), kNumericalOracle);
    if (f.id == "sphere3") {
      r.near("entropy/argmax-scale", ent.c, 2.0 / 3.0, 1e-3, kClosedForm);
    } else if (f.id != "plane") {
      r.truth("entropy/argmax-is-identity", ent.argmax_is_identity);
      r.rel("entropy/lambda-equals-F", ent.lambda, ent.F, 1e-4, kNumericalOracle);
    }
  });

  if (f.id == "sphere2") {
    guarded(r, "entropy/mesh", [&] {
      const int res = cfg.resolutionFor(f);
      const EntropyResult ent = entropy(buildMesh(imm, res));
      r.rel("entropy/mesh-lambda", ent.lambda, 4.0 / e, 1e-3, kClosedForm);
      r.truth("entropy/mesh-argmax-is-identity", ent.argmax_is_identity);
    });
    guarded(r, "profile-max", [&] {
      const auto pm = maxhArgmax();
      r.near("profile-max/argmax", pm.argmax, 2.0, 1e-6, kClosedForm);
      r.near("profile-max/value", pm.value, 4.0 / e, 1e-10, kClosedForm);
    });
  }

  if (!f.shrinker) return;
  guarded(r, "willmore", [&] {
    const WillmoreGap g = willmoreEntropyGap(imm);
    r.measure("willmore/W", g.W);
    r.measure("willmore/gap", g.gap);
    r.le("willmore/identity-residual", g.identity_residual, 1e-6, kNumericalOracle);
    r.truth("willmore/equality-consistent", g.consistent);
    if (f.id == "al-curve")
      r.ge("willmore/gap", g.gap, 1e-2, kNumericalOracle);
    else if (f.id == "plane")
      r.near("willmore/gap", g.gap, 2.0, 1e-6, kClosedForm);  // W = 0, F = 1
    else
      r.near("willmore/gap", g.gap, 0.0, 1e-4, kClosedForm);
    if (f.id == "sphere2") {
      r.rel("willmore/W", g.W, 4.0 / e, 1e-3, kClosedForm);
      r.rel("willmore/stable-bound-sharp", g.W, stableWillmoreBound(0, true), 1e-3, kClosedForm);
      r.rel("willmore/oriented-genus0-bound", stableWillmoreBound(0, true), 2.0 * yangYauConstant(0) / e, 1e-15,
            kClosedForm);
    }
  });
}

// ---------------------------------------------------------------------------
// Spectra.

inline double korevaarMaxRatio(const EigenResult& drift, double lambda, int genus, int kmax) {
  double worst = 0.0;
  for (const auto& row : korevaarGap(drift, lambda, genus))
    if (row.k >= 1 && row.k <= kmax) worst = std::max(worst, row.ratio);
  return worst;
}

inline void conformalChain(RunReport& r, const TriangleMeshN& m, const EigenResult& drift, int kmax,
                           const SolverOptions& opts) {
  const EigenResult conf = conformalSpectrum(m, kmax, opts);
  double worst = -1e300;
  for (int k = 0; k <= kmax; ++k) worst = std::max(worst, drift.values[k] - conf.values[k]);
  r.le("korevaar/drift-minus-conformal-max", worst, 0.0, kNumericalOracle, 1e-8);
}

inline SuiteArtifacts spectralSuite(RunReport& r, const FixtureInfo& f, const RunConfig& cfg) {
  SuiteArtifacts art;
  const SolverOptions opts = solverOptions(cfg);
  const int res = cfg.resolutionFor(f);

  if (f.kind == "surface") {
    if (!f.shrinker) {
      r.notes.push_back(f.id + " is not a shrinker; its drift spectrum carries no closed-form expectation");
      return art;
    }
    const AnalyticImmersion imm = fixtureImmersion(f);
    const int count = cfg.count > 0 ? cfg.count : 10;
    guarded(r, "spectrum", [&] {
      const TriangleMeshN m = buildMesh(imm, res);
      const EigenResult d = driftSpectrum(assembleDrift(m), std::max(count, 10), opts);
      art.spectrum = d;
      art.spectrum_title = "drift spectrum of " + f.id + " at resolution " + std::to_string(res);
      r.near("spectrum/mu0", d.values[0], 0.0, 1e-6, kExact);
      if (f.id == "sphere2") {
        for (int k = 1; k <= 3; ++k) r.near("spectrum/mu" + std::to_string(k), d.values[k], 0.5, 1e-2, kClosedForm);
        for (int k = 4; k <= 8; ++k) r.near("spectrum/mu" + std::to_string(k), d.values[k], 1.5, 1e-2, kClosedForm);
        r.eq("spectrum/multiplicity-1", d.multiplicityOf(1), 3);
        r.eq("spectrum/multiplicity-4", d.multiplicityOf(4), 5);
      } else {
        for (int k = 1; k <= 4; ++k) r.near("spectrum/mu" + std::to_string(k), d.values[k], 0.5, 1e-2, kClosedForm);
        r.eq("spectrum/multiplicity-1", d.multiplicityOf(1), 4);
        r.ge("spectrum/mu5", d.values[5], 0.9, kClosedForm);
      }
      const int genus = f.id == "clifford" ? 1 : 0;
      const double ratio = korevaarMaxRatio(d, *closedFormEntropy(f.id), genus, 10);
      r.measure("korevaar/max-ratio", ratio);
      r.le("korevaar/max-ratio", ratio, 1.2, kNumericalOracle);
      conformalChain(r, m, d, 10, opts);
    });
    guarded(r, "refinement", [&] {
      std::vector<double> h, mu;
      for (int level : {8, 16, 32}) {
        h.push_back(2 * std::numbers::pi / level);
        mu.push_back(driftSpectrum(assembleDrift(buildMesh(imm, level)), 1, opts).values[1]);
      }
      art.refinement = refinementRows(h, mu, 0.5);
      art.refinement_title = "first nonzero drift eigenvalue of " + f.id + " under refinement";
      for (std::size_t i = 1; i < art.refinement.size(); ++i)
        r.ge("refinement/slope-" + std::to_string(i), art.refinement[i].slope, 1.8, kNumericalOracle);
    });
    return art;
  }

  if (f.kind == "curve") {
    const int count = cfg.count > 0 ? cfg.count : 4;
    guarded(r, "spectrum", [&] {
      const CurveShrinker c = fixtureCurve(f, res);
      art.curve = c;
      const EigenResult d = curveDriftSpectrum(c, std::max(count, 4), opts);
      art.spectrum = d;
      art.spectrum_title = "drift spectrum of " + f.id + " with " + std::to_string(res) + " samples";
      r.near("spectrum/mu0", d.values[0], 0.0, 1e-8, kExact);
      if (f.id == "circle") {
        const double expected[] = {0.5, 0.5, 2.0, 2.0};
        for (int k = 1; k <= 4; ++k)
          r.near("spectrum/mu" + std::to_string(k), d.values[k], expected[k - 1], 1e-3, kClosedForm);
        r.eq("spectrum/multiplicity-1", d.multiplicityOf(1), 2);
        r.eq("spectrum/multiplicity-3", d.multiplicityOf(3), 2);
      } else {
        r.le("spectrum/mu1", d.values[1], 0.499, kNumericalOracle);
      }
    });
    if (f.id == "circle")
      guarded(r, "refinement", [&] {
        std::vector<double> h, mu;
        for (int level : {16, 32, 64}) {
          h.push_back(2 * std::numbers::pi / level);
          mu.push_back(curveDriftSpectrum(fixtureCurve(f, level), 1, opts).values[1]);
        }
        art.refinement = refinementRows(h, mu, 0.5);
        art.refinement_title = "first nonzero drift eigenvalue of the circle under refinement";
        for (std::size_t i = 1; i < art.refinement.size(); ++i)
          r.ge("refinement/slope-" + std::to_string(i), art.refinement[i].slope, 1.8, kNumericalOracle);
      });
    return art;
  }

  r.notes.push_back(f.id + " is noncompact; no spectrum is computed");
  return art;
}

/// Spectrum, entropy and the conformal comparison for a mesh read from disk.
inline SuiteArtifacts meshFileSuite(RunReport& r, const TriangleMeshN& m, const RunConfig& cfg, bool withEntropy,
                                    bool withSpectrum) {
  SuiteArtifacts art;
  const SolverOptions opts = solverOptions(cfg);
  r.measure("mesh/vertices", m.vertexCount());
  r.measure("mesh/genus", m.genus);
  double lambda = 0.0;
  if (withEntropy)
    guarded(r, "entropy", [&] {
      const EntropyResult ent = entropy(m);
      lambda = ent.lambda;
      r.measure("entropy/F", ent.F);
      r.measure("entropy/lambda", ent.lambda);
      r.ge("entropy/lambda-at-least-F", ent.lambda, ent.F, kExact, 1e-12);
    });
  if (withSpectrum)
    guarded(r, "spectrum", [&] {
      const int count = std::min(std::max(cfg.count, 10), m.vertexCount() - 2);
      const EigenResult d = driftSpectrum(assembleDrift(m), count, opts);
      art.spectrum = d;
      art.spectrum_title = "drift spectrum of " + cfg.mesh;
      r.near("spectrum/mu0", d.values[0], 0.0, 1e-8, kExact);
      const int kmax = std::min(count, 10);
      conformalChain(r, m, d, kmax, opts);
      if (lambda > 0) r.measure("korevaar/max-ratio", korevaarMaxRatio(d, lambda, m.genus, kmax));
    });
  return art;
}

// ---------------------------------------------------------------------------
// Stability.

inline void witnessChecks(RunReport& r, const std::string& prefix, const StabilityReport& rep, bool expectWitness) {
  r.measure(prefix + "/mu", rep.mu);
  if (!expectWitness) {
    r.near(prefix + "/mu", rep.mu, 0.5, 1e-2, kClosedForm);
    r.truth(prefix + "/no-witness", !rep.witness_found);
    return;
  }
  r.le(prefix + "/mu", rep.mu, 0.5, kNumericalOracle);
  r.truth(prefix + "/witness-found", rep.witness_found);
  r.le(prefix + "/orthogonality", rep.orthogonalityMax(), 1e-6, kNumericalOracle);
}

inline void stabilitySuite(RunReport& r, const FixtureInfo& f, const RunConfig& cfg) {
  const SolverOptions opts = solverOptions(cfg);
  const int res = cfg.resolutionFor(f);
  if (!f.shrinker) {
    r.notes.push_back(f.id + " is not a shrinker; the second variation is not defined there");
    return;
  }
  if (f.id == "plane") {
    guarded(r, "second-variation", [&] {
      const auto imm = fixtureImmersion(f);
      const auto phi = makeAmbientFunction([](const auto& x) { return x[0]; });
      Eigen::VectorXd V = Eigen::VectorXd::Zero(3);
      V[2] = 1.0;
      r.near("second-variation/plane", secondVariationPhiV(imm, phi, V), 0.0, 1e-8, kClosedForm);
    });
    return;
  }

  if (f.id == "sphere2" || f.id == "clifford") {
    const AnalyticImmersion imm = fixtureImmersion(f);
    const SampledSurface2 s = sampleImmersion(imm, buildMesh(imm, res));
    guarded(r, "witness", [&] {
      const auto rep = instabilityWitness(s, 1e-2, opts);
      if (f.id == "sphere2")
        witnessChecks(r, "witness", rep, false);
      else
        r.measure("witness/mu", rep.mu);
    });
    if (f.id == "clifford") return;
    guarded(r, "extradims", [&] { witnessChecks(r, "extradims", extradimsTest(embedInHigherDimension(s), {}, 1e-2, opts), false); });
    guarded(r, "counting", [&] {
      const auto c = constrainedFamilyTest(s, 1, 0, opts);
      r.eq("counting/rows", c.rows_formula, c.rows_enumerated);
      r.ge("counting/corollary-margin", c.bound_margin, 10.0, kNumericalOracle);
      r.ge("counting/theorem-margin", c.theorem_margin, 10.0, kNumericalOracle);
      r.le("counting/constraint-residual", c.constraint_residual, 1e-10, kExact);
      r.le("counting/family-inequality", c.lhs, c.rhs, kNumericalOracle);
      r.rel("counting/gradient-vs-spectral", c.rhs, c.spectral_rhs, 1e-8, kNumericalOracle);
      r.measure("counting/mu-index", c.mu_index);
      r.measure("counting/theorem-mu", c.theorem_mu);
    });
    guarded(r, "scalar", [&] {
      const auto st = scalarStabilitySpectrum(s, 4, opts);
      r.near("scalar/c0", st.spectrum.values[0], 1.0, 1e-2, kClosedForm);
      for (int i = 1; i <= 3; ++i) r.near("scalar/c" + std::to_string(i), st.spectrum.values[i], 0.5, 1e-2, kClosedForm);
      r.ge("scalar/h-alignment", st.h_alignment, 0.999, kNumericalOracle);
    });
    return;
  }

  // curves
  const CurveShrinker c = fixtureCurve(f, res);
  const SampledCurve s = sampledCurve(c, f.id);
  guarded(r, "scalar", [&] {
    const auto st = curveStabilitySpectrum(c, 5, opts);
    const auto& v = st.spectrum.values;
    r.near("scalar/c0", v[0], 1.0, 1e-3, kClosedForm);
    r.eq("scalar/h-index", st.h_index, 0);
    if (f.id == "circle") {
      const double expected[] = {0.5, 0.5, -1.0, -1.0};
      for (int i = 1; i <= 4; ++i) r.near("scalar/c" + std::to_string(i), v[i], expected[i - 1], 1e-3, kClosedForm);
    } else {
      r.ge("scalar/c1", v[1], 0.501, kNumericalOracle);
      r.le("scalar/c1", v[1], 0.999, kNumericalOracle);
    }
  });
  const bool al = f.id == "al-curve";
  guarded(r, "witness", [&] {
    const auto rep = instabilityWitness(s, 1e-2, opts);
    witnessChecks(r, "witness", rep, al);
    if (al) {
      r.le("witness/delta2-direct", rep.delta2Of("witness-direct"), 0.0, kNumericalOracle);
      r.le("witness/delta2-family", rep.delta2Of("witness-family"), 0.0, kNumericalOracle);
      r.rel("witness/family-vs-direct", rep.delta2Of("witness-family"), rep.delta2Of("witness-direct"), 1e-2,
            kNumericalOracle);
    }
  });
  guarded(r, "extradims", [&] {
    const auto rep = extradimsTest(embedInHigherDimension(s), {}, 1e-2, opts);
    witnessChecks(r, "extradims", rep, al);
    if (al) {
      r.le("extradims/delta2", rep.delta2Of("phiE-direct"), 0.0, kNumericalOracle);
      r.near("extradims/direct-vs-formula", rep.delta2Of("phiE-direct"), rep.delta2Of("phiE-formula"), 1e-8,
             kNumericalOracle);
    }
  });
}

// ---------------------------------------------------------------------------
// Closed curves: shooting, spectra, nodal domains, classification.

/// Coprime (p, q) with 1/2 < p/q < 1/sqrt 2, ordered by q.
inline std::vector<std::pair<int, int>> curveTargets(int count) {
  std::vector<std::pair<int, int>> out;
  for (int q = 2; static_cast<int>(out.size()) < count && q < 200; ++q)
    for (int p = 1; p < q && static_cast<int>(out.size()) < count; ++p) {
      const double r = static_cast<double>(p) / q;
      if (r > 0.5 && r < 1 / std::numbers::sqrt2 && std::gcd(p, q) == 1) out.push_back({p, q});
    }
  return out;
}

inline std::vector<CurveShrinker> curveSuite(RunReport& r, const RunConfig& cfg) {
  const SolverOptions opts = solverOptions(cfg);
  CurveConfig cc;
  if (cfg.resolution > 0) cc.samples = cfg.resolution;
  std::vector<CurveShrinker> found;
  std::vector<std::pair<std::string, CurveShrinker>> named;

  guarded(r, "circle", [&] {
    const CurveShrinker c = shootClosed(1, 1, cc);
    double dev = 0.0;
    for (double k : c.k) dev = std::max(dev, std::abs(k - kCircleCurvature));
    r.le("circle/curvature-deviation", dev, 1e-8, kClosedForm);
    r.le("circle/closure", c.closure_error, 1e-8, kExact);
    named.push_back({"circle", c});
    found.push_back(c);
  });

  const int count = cfg.count > 0 ? cfg.count : 2;
  for (const auto& [p, q] : curveTargets(count)) {
    const std::string tag = "al-" + std::to_string(p) + "-" + std::to_string(q);
    guarded(r, tag, [&] {
      CurveShrinker c = (p == 2 && q == 3 && cc.samples == alCurve().size()) ? alCurve() : shootClosed(p, q, cc);
      r.le(tag + "/closure", c.closure_error, 1e-8, kExact);
      r.ge(tag + "/gauss-degree", c.gauss_degree, 2, kExact);
      r.le(tag + "/residual", c.residual, 1e-8, kExact);
      r.measure(tag + "/k0", c.k0);
      r.measure(tag + "/length", c.length);
      named.push_back({tag, c});
      found.push_back(c);
      if (p != 2 || q != 3) return;
      const auto st = curveStabilitySpectrum(c, 4, opts);
      r.near(tag + "/c0", st.spectrum.values[0], 1.0, 1e-3, kNumericalOracle);
      r.ge(tag + "/c1", st.spectrum.values[1], 0.501, kNumericalOracle);
      r.le(tag + "/c1", st.spectrum.values[1], 0.999, kNumericalOracle);
      r.eq(tag + "/c0-eigenfunction-is-curvature", st.h_index, 0);
      r.le(tag + "/mu1", curveDriftSpectrum(c, 2, opts).values[1], 0.499, kNumericalOracle);
      Eigen::VectorXd n1(c.size()), n2(c.size()), x1(c.size()), x2(c.size());
      for (int i = 0; i < c.size(); ++i) {
        n1[i] = c.normal(i)[0];
        n2[i] = c.normal(i)[1];
        x1[i] = c.x[i];
        x2[i] = c.y[i];
      }
      r.ge(tag + "/nodal-n1", nodalDomains(n1), 4, kExact);
      r.ge(tag + "/nodal-n2", nodalDomains(n2), 4, kExact);
      r.ge(tag + "/nodal-x1", nodalDomains(x1), 4, kExact);
      r.ge(tag + "/nodal-x2", nodalDomains(x2), 4, kExact);
    });
  }

  guarded(r, "classify", [&] {
    for (const auto& v : classifyStableCurves(named)) {
      r.measure("classify/" + v.name + "-c2", v.c2);
      r.eq("classify/" + v.name + "-flagged", v.flagged ? 1 : 0, v.name == "circle" ? 0 : 1);
    }
  });
  return found;
}

// ---------------------------------------------------------------------------
// Pointwise identities.

inline void identityReports(RunReport& r, const std::string& prefix, const std::vector<IdentityReport>& reps) {
  for (const auto& rep : reps) r.le(prefix + rep.identity, rep.sup, rep.tolerance, kClosedForm);
}

inline void identitySuite(RunReport& r, const FixtureInfo& f, const RunConfig& cfg) {
  const AnalyticImmersion imm = fixtureImmersion(f);
  const auto grid = f.kind == "curve" ? sampleGrid(imm, 24, 1) : sampleGrid(imm, 8, 8);
  IdentityOptions opts;
  opts.tolerance = cfg.tol;

  if (f.shrinker) {
    guarded(r, "identity/pointwise", [&] { identityReports(r, "identity/", checkPointwiseIdentities(imm, grid, opts)); });
    guarded(r, "identity/simons", [&] { identityReports(r, "identity/", checkSimonsEquations(imm, grid, opts)); });
  } else {
    opts.shrinker = ShrinkerIdentities::Skip;
    guarded(r, "identity/pointwise", [&] { identityReports(r, "identity/", checkPointwiseIdentities(imm, grid, opts)); });
  }

  if (f.id == "sphere3") {
    opts.shrinker = ShrinkerIdentities::Evaluate;
    guarded(r, "contrast", [&] {
      for (const auto& rep : checkPointwiseIdentities(imm, grid, opts))
        if (rep.identity == "hessian-f-minus-AH" || rep.identity == "hessian-f-plus-ricci")
          r.ge("contrast/" + rep.identity, rep.sup, 1e-2, kClosedForm);
      for (const auto& rep : checkSimonsEquations(imm, grid, opts))
        if (rep.identity == "simons-LA") r.ge("contrast/" + rep.identity, rep.sup, 1e-2, kClosedForm);
    });
  }

  if (f.id == "sphere2" || f.id == "circle" || f.id == "clifford")
    guarded(r, "identity/spherical", [&] {
      const auto e = sphericalEquivalence(imm, grid, cfg.tol);
      r.le("identity/spherical-shrinker", e.shrinker.sup, cfg.tol, kClosedForm);
      r.le("identity/spherical-minimal", e.minimalInSphere.sup, cfg.tol, kClosedForm);
      r.le("identity/spherical-umbilic", e.umbilicAH.sup, cfg.tol, kClosedForm);
      r.truth("identity/spherical-agree", e.agree);
    });

  if (f.id == "clifford") {
    guarded(r, "identity/torsion", [&] {
      double diff = 0.0, opposite = 0.0;
      for (const auto& p : sampleGrid(imm, 5, 5)) {
        const Frame fr = evalFrame(imm, p);
        for (int i = 0; i < 2; ++i) {
          const Torsion t = frenetTorsion(imm, fr.tangents.col(i), p);
          diff = std::max(diff, std::abs(t.derivative - t.closedForm));
          opposite = std::max(opposite, std::abs(t.derivative + t.derivativeOpposite));
        }
      }
      r.le("identity/torsion-two-ways", diff, cfg.tol, kClosedForm);
      r.eq("identity/torsion-orientation", opposite, 0.0);
    });
    guarded(r, "identity/binormal", [&] {
      const auto bent = binormalFlatness(imm, sampleGrid(imm, 6, 6));
      r.truth("identity/binormal-clifford-not-flat", !bent.flat);
      r.truth("identity/binormal-clifford-consistent", bent.consistent);
      const auto s4 = fixtures::sphere(2.0, 4, Eigen::VectorXd(), fixtures::randomIsometry(4, 3, cfg.seed));
      const auto flat = binormalFlatness(s4, sampleGrid(s4, 6, 6));
      r.truth("identity/binormal-hyperplane-flat", flat.flat);
      r.truth("identity/binormal-hyperplane-consistent", flat.consistent);
    });
  }

  guarded(r, "identity/projection-trace", [&] {
    std::mt19937 rng(cfg.seed);
    std::normal_distribution<double> gauss;
    int passed = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const int N = std::uniform_int_distribution<int>(3, 8)(rng);
      const int n = std::uniform_int_distribution<int>(1, N - 1)(rng);
      const int k = std::uniform_int_distribution<int>(1, N - n)(rng);
      Eigen::MatrixXd B(N, n);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = gauss(rng);
      passed += projectionTrace(B, k).pass ? 1 : 0;
    }
    r.eq("identity/projection-trace-random", passed, 100);
  });
}

// ---------------------------------------------------------------------------

/// Runs every suite that applies to the fixture.
inline SuiteArtifacts verifyFixture(RunReport& r, const FixtureInfo& f, const RunConfig& cfg) {
  functionalsSuite(r, f, cfg);
  SuiteArtifacts art = spectralSuite(r, f, cfg);
  stabilitySuite(r, f, cfg);
  identitySuite(r, f, cfg);
  return art;
}

}  // namespace shrinkers
