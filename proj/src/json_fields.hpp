#pragma once

// Small helpers for reading required fields out of nlohmann documents with
// path-carrying diagnostics.

#include <string>

#include <json.hpp>

#include "tdppt/instance.hpp"

namespace tdppt::detail {

using json = nlohmann::json;

inline const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw InstanceError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw InstanceError(path, std::string("missing field ") + key);
    return *it;
}

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline double number(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_number()) throw InstanceError(join(path, key), "expected a number");
    return v.get<double>();
}

inline double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    return number(obj, key, path);
}

inline std::string text(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_string()) throw InstanceError(join(path, key), "expected a string");
    return v.get<std::string>();
}

inline bool flag(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_boolean()) throw InstanceError(join(path, key), "expected a boolean");
    return v.get<bool>();
}

inline const json& array(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_array()) throw InstanceError(join(path, key), "expected an array");
    return v;
}

inline Point point(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    std::string p = join(path, key);
    return Point{number(v, "x", p), number(v, "y", p)};
}

inline json point_json(const Point& p) { return json{{"x", p.x}, {"y", p.y}}; }

inline std::string item(const std::string& path, const char* key, std::size_t i) {
    return join(path, key) + "[" + std::to_string(i) + "]";
}

}  // namespace tdppt::detail
