#pragma once

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shrinkers/curves.hpp"
#include "shrinkers/io.hpp"
#include "shrinkers/spectral.hpp"

namespace shrinkers {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

// How the expected value of a check was obtained.
inline constexpr const char* kClosedForm = "closed-form";
inline constexpr const char* kNumericalOracle = "numerical-oracle";
inline constexpr const char* kExact = "exact";

struct Check {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string relation;  // abs | rel | le | ge | eq
  std::string provenance;
  bool pass = false;
};

struct Measurement {
  std::string name;
  double value = 0.0;
};

struct RunReport {
  std::string command;
  std::string fixture;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<Measurement> measurements;
  std::vector<std::string> notes;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  int failures() const {
    int n = 0;
    for (const auto& c : checks) n += c.pass ? 0 : 1;
    return n;
  }

  // |value - expected| <= tol
  Check& near(std::string name, double value, double expected, double tol, const char* prov) {
    return add({std::move(name), value, expected, tol, "abs", prov, std::abs(value - expected) <= tol});
  }
  // |value - expected| <= tol |expected|
  Check& rel(std::string name, double value, double expected, double tol, const char* prov) {
    return add({std::move(name), value, expected, tol, "rel", prov,
                std::abs(value - expected) <= tol * std::abs(expected)});
  }
  Check& le(std::string name, double value, double bound, const char* prov, double slack = 0.0) {
    return add({std::move(name), value, bound, slack, "le", prov, value <= bound + slack});
  }
  Check& ge(std::string name, double value, double bound, const char* prov, double slack = 0.0) {
    return add({std::move(name), value, bound, slack, "ge", prov, value >= bound - slack});
  }
  Check& eq(std::string name, double value, double expected) {
    return add({std::move(name), value, expected, 0.0, "eq", kExact, value == expected});
  }
  Check& truth(std::string name, bool value) { return eq(std::move(name), value ? 1.0 : 0.0, 1.0); }
  // Records a failed check for a computation that threw.
  Check& error(std::string name, const std::exception& e) {
    notes.push_back(name + ": " + e.what());
    return add({std::move(name), std::nan(""), 0.0, 0.0, "eq", kExact, false});
  }
  void measure(std::string name, double value) { measurements.push_back({std::move(name), value}); }

 private:
  Check& add(Check c) {
    if (!std::isfinite(c.value)) c.pass = false;
    checks.push_back(std::move(c));
    return checks.back();
  }
};

/// 17 significant digits, independent of the locale.
inline std::string formatDouble(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace detail {

inline void dumpJson(const nlohmann::json& j, std::ostringstream& out, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << nlohmann::json(it.key()).dump() << ": ";
        dumpJson(it.value(), out, depth + 1);
      }
      out << "\n" << close << "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        dumpJson(j[i], out, depth + 1);
      }
      out << "\n" << close << "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out << formatDouble(j.get<double>());
      return;
    default:
      out << j.dump();
  }
}

}  // namespace detail

inline std::string dumpJson(const nlohmann::json& j) {
  std::ostringstream out;
  detail::dumpJson(j, out, 0);
  out << "\n";
  return out.str();
}

inline nlohmann::json toJson(const RunReport& r) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["command"] = r.command;
  j["fixture"] = r.fixture;
  j["config"] = r.config;
  j["pass"] = r.pass();
  j["failures"] = r.failures();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["value"] = c.value;
    cj["expected"] = c.expected;
    cj["tolerance"] = c.tolerance;
    cj["relation"] = c.relation;
    cj["provenance"] = c.provenance;
    cj["pass"] = c.pass;
    j["checks"].push_back(cj);
  }
  j["measurements"] = nlohmann::json::array();
  for (const auto& m : r.measurements) j["measurements"].push_back({{"name", m.name}, {"value", m.value}});
  j["notes"] = r.notes;
  return j;
}

inline void writeReport(const RunReport& r, const std::string& path) { writeFileAtomic(path, dumpJson(toJson(r))); }

// ---------------------------------------------------------------------------
// Plot data.

inline void emitSpectrumCsv(const EigenResult& r, const std::string& path, const std::string& title) {
  std::ostringstream out;
  out << "# " << title << "\n# k: eigenvalue index; mu: eigenvalue; multiplicity: size of its cluster\n";
  out << "k,mu,multiplicity\n";
  for (int k = 0; k < r.count(); ++k) out << k << "," << formatDouble(r.values[k]) << "," << r.multiplicityOf(k) << "\n";
  writeFileAtomic(path, out.str());
}

struct RefinementRow {
  double h = 0.0;
  double mu = 0.0;
  double error = 0.0;
  double slope = std::nan("");  // log(e_prev / e) / log(h_prev / h); undefined on the first row
};

inline std::vector<RefinementRow> refinementRows(const std::vector<double>& h, const std::vector<double>& mu,
                                                 double exact) {
  std::vector<RefinementRow> rows;
  for (std::size_t i = 0; i < h.size(); ++i) {
    RefinementRow r{h[i], mu[i], std::abs(mu[i] - exact)};
    if (i > 0) r.slope = std::log(rows.back().error / r.error) / std::log(rows.back().h / r.h);
    rows.push_back(r);
  }
  return rows;
}

inline void emitRefinementCsv(const std::vector<RefinementRow>& rows, const std::string& path,
                              const std::string& title) {
  std::ostringstream out;
  out << "# " << title << "\n# h: nominal spacing; mu1: first nonzero eigenvalue; error: |mu1 - exact|;"
      << " slope: observed order against the previous row\n";
  out << "h,mu1,error,slope\n";
  for (const auto& r : rows)
    out << formatDouble(r.h) << "," << formatDouble(r.mu) << "," << formatDouble(r.error) << ","
        << (std::isfinite(r.slope) ? formatDouble(r.slope) : "") << "\n";
  writeFileAtomic(path, out.str());
}

}  // namespace shrinkers
