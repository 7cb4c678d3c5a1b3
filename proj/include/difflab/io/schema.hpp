#pragma once

#include "difflab/core/errors.hpp"
#include "difflab/io/schemas_embedded.hpp"

#include "json.hpp"

#include <string>

namespace difflab {

inline constexpr int SCHEMA_VERSION = 1;

namespace detail {

inline bool has_type(const nlohmann::json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  throw SchemaError("schema uses unknown type '" + t + "'");
}

inline std::string where(const std::string& path) { return path.empty() ? "/" : path; }

// The subset of JSON Schema used by the shipped schemas: type, enum, required,
// properties, additionalProperties, items, minItems, minimum, maximum.
inline void validate_node(const nlohmann::json& v, const nlohmann::json& s, const std::string& path) {
  if (s.contains("type")) {
    const auto& t = s.at("type");
    bool ok = false;
    if (t.is_array()) {
      for (const auto& x : t) ok = ok || has_type(v, x.get<std::string>());
    } else {
      ok = has_type(v, t.get<std::string>());
    }
    if (!ok) throw SchemaError(where(path) + ": expected " + t.dump() + ", got " + v.type_name());
  }
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s.at("enum")) found = found || e == v;
    if (!found) throw SchemaError(where(path) + ": value " + v.dump() + " not in " + s.at("enum").dump());
  }
  if (v.is_number()) {
    if (s.contains("minimum") && v.get<double>() < s.at("minimum").get<double>())
      throw SchemaError(where(path) + ": " + v.dump() + " is below the minimum " + s.at("minimum").dump());
    if (s.contains("maximum") && v.get<double>() > s.at("maximum").get<double>())
      throw SchemaError(where(path) + ": " + v.dump() + " is above the maximum " + s.at("maximum").dump());
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& r : s.at("required"))
        if (!v.contains(r.get<std::string>())) throw SchemaError(where(path) + ": missing required '" + r.get<std::string>() + "'");
    const nlohmann::json empty = nlohmann::json::object();
    const auto& props = s.contains("properties") ? s.at("properties") : empty;
    for (const auto& [key, value] : v.items()) {
      if (props.contains(key)) {
        validate_node(value, props.at(key), path + "/" + key);
      } else if (s.contains("additionalProperties")) {
        const auto& ap = s.at("additionalProperties");
        if (ap.is_boolean()) {
          if (!ap.get<bool>()) throw SchemaError(where(path) + ": unexpected property '" + key + "'");
        } else {
          validate_node(value, ap, path + "/" + key);
        }
      }
    }
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s.at("minItems").get<std::size_t>())
      throw SchemaError(where(path) + ": needs at least " + s.at("minItems").dump() + " items");
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) validate_node(v[i], s.at("items"), path + "/" + std::to_string(i));
  }
}

} // namespace detail

/// Published schema by name (space, pair, sequence, battery, gallery, report).
inline const nlohmann::json& schema(const std::string& name) {
  static const std::map<std::string, nlohmann::json> parsed = [] {
    std::map<std::string, nlohmann::json> m;
    for (const auto& [k, text] : schemas::embedded()) m.emplace(k, nlohmann::json::parse(text));
    return m;
  }();
  auto it = parsed.find(name);
  if (it == parsed.end()) throw SchemaError("no schema named '" + name + "'");
  return it->second;
}

/// Throws SchemaError naming the offending JSON path.
inline void validate_against(const nlohmann::json& doc, const nlohmann::json& s) { detail::validate_node(doc, s, ""); }
inline void validate(const nlohmann::json& doc, const std::string& schema_name) {
  try {
    validate_against(doc, schema(schema_name));
  } catch (const SchemaError& e) {
    throw SchemaError(schema_name + " document: " + e.what());
  }
}

} // namespace difflab
