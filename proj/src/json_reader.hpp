#pragma once

// Strict JSON object access with config-path error messages. Internal header.

#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "tribus/errors.hpp"
#include "tribus/geometry.hpp"

namespace tribus::detail {

using nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

inline std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

class JsonObject {
 public:
  JsonObject(const json& doc, std::string path, bool strict) : doc_(doc), path_(std::move(path)), strict_(strict) {
    if (!doc_.is_object()) throw ParseError(label() + ": expected a JSON object");
  }

  bool has(const std::string& key) const {
    seen_.insert(key);
    return doc_.contains(key) && !doc_.at(key).is_null();
  }

  const json& raw(const std::string& key) const {
    if (!has(key)) throw ValidationError(path(key), "missing required field");
    return doc_.at(key);
  }

  template <class T>
  T required(const std::string& key) const {
    return convert<T>(raw(key), path(key));
  }

  template <class T>
  T optional(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    return convert<T>(doc_.at(key), path(key));
  }

  Vec3 vec3(const std::string& key) const { return to_vec3(raw(key), path(key)); }

  Vec3 vec3_or(const std::string& key, const Vec3& fallback) const {
    return has(key) ? to_vec3(doc_.at(key), path(key)) : fallback;
  }

  std::string path(const std::string& key) const { return join_path(path_, key); }
  const std::string& path() const { return path_; }
  bool strict() const { return strict_; }

  /// Rejects keys that were never looked up (strict mode only).
  void finish() const {
    if (!strict_) return;
    for (const auto& item : doc_.items()) {
      if (!seen_.count(item.key())) throw ValidationError(path(item.key()), "unknown key");
    }
  }

  template <class T>
  static T convert(const json& value, const std::string& where) {
    try {
      if constexpr (std::is_same_v<T, int>) {
        if (!value.is_number_integer()) throw ParseError(where + ": expected an integer");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!value.is_number()) throw ParseError(where + ": expected a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!value.is_boolean()) throw ParseError(where + ": expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!value.is_string()) throw ParseError(where + ": expected a string");
      }
      return value.get<T>();
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }

  static Vec3 to_vec3(const json& value, const std::string& where) {
    if (!value.is_array() || value.size() != 3) throw ParseError(where + ": expected an array of 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) out[i] = convert<double>(value[i], index_path(where, i));
    return out;
  }

 private:
  std::string label() const { return path_.empty() ? "config" : path_; }

  const json& doc_;
  std::string path_;
  bool strict_;
  mutable std::set<std::string> seen_;
};

inline const json& require_array(const json& value, const std::string& where) {
  if (!value.is_array()) throw ParseError(where + ": expected an array");
  return value;
}

inline json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace tribus::detail
