#pragma once

// Validates a document against the subset of JSON Schema used by the report
// schema: type, const, enum, minimum, required, properties,
// additionalProperties (false) and items. Returns the first violation.

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

namespace schema_check {

inline bool hasType(const nlohmann::json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
  if (t == "number") return v.is_number();
  if (t == "null") return v.is_null();
  return false;
}

inline std::optional<std::string> validate(const nlohmann::json& v, const nlohmann::json& s, const std::string& at = "$") {
  if (s.contains("type")) {
    bool ok = false;
    if (s["type"].is_array()) {
      for (const auto& t : s["type"]) ok = ok || hasType(v, t.get<std::string>());
    } else {
      ok = hasType(v, s["type"].get<std::string>());
    }
    if (!ok) return at + ": wrong type";
  }
  if (s.contains("const") && v != s["const"]) return at + ": const mismatch";
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || e == v;
    if (!found) return at + ": not in enum";
  }
  if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>())
    return at + ": below minimum";
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& key : s["required"])
        if (!v.contains(key.get<std::string>())) return at + ": missing " + key.get<std::string>();
    const nlohmann::json props = s.value("properties", nlohmann::json::object());
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (props.contains(it.key())) {
        if (auto err = validate(it.value(), props[it.key()], at + "." + it.key())) return err;
      } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
        return at + ": unexpected key " + it.key();
      }
    }
  }
  if (v.is_array() && s.contains("items"))
    for (std::size_t i = 0; i < v.size(); ++i)
      if (auto err = validate(v[i], s["items"], at + "[" + std::to_string(i) + "]")) return err;
  return std::nullopt;
}

inline nlohmann::json load(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

}  // namespace schema_check
