// A short walk through the library: entropy and spectrum of the round
// sphere, then the first closed curve shrinker that is not a circle.

#include <cstdio>
#include <string>

#include "shrinkers/registry.hpp"

using namespace shrinkers;

int main(int argc, char** argv) {
  const std::string csv = argc > 1 ? argv[1] : "al_curve.csv";

  const auto sphere = fixtures::sphere(2.0);
  const auto mesh = buildMesh(sphere, 48);
  const auto ent = entropy(mesh);
  std::printf("sphere of radius 2: F = %.6f, entropy = %.6f at c = %.4f\n", ent.F, ent.lambda, ent.c);

  const auto spec = driftSpectrum(assembleDrift(mesh), 8);
  std::printf("drift spectrum:");
  for (int k = 0; k < spec.count(); ++k) std::printf(" %.4f", spec.values[k]);
  std::printf("\n");

  const CurveShrinker c = shootClosed(2, 3);
  std::printf("closed curve with rotation index %d: k0 = %.9f, length = %.6f, closure error %.1e\n",
              c.rotation_index, c.k0, c.length, c.closure_error);

  const auto st = curveStabilitySpectrum(c, 3);
  std::printf("stability operator: c1 = %.5f, c2 = %.5f (the circle has 1 and 1/2)\n", st.spectrum.values[0],
              st.spectrum.values[1]);

  const auto w = instabilityWitness(sampledCurve(c, "al-curve"));
  std::printf("mean curvature witness: mu = %.4f, %s\n", w.mu, w.verdict.c_str());

  writeCurveCsv(c, csv);
  std::printf("wrote %s\n", csv.c_str());
  return 0;
}
