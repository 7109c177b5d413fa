#include "config.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace scissortruss::cli {

namespace {

const Json& empty_object() {
  static const Json empty = Json::object();
  return empty;
}

}  // namespace

Json parse_config(std::string_view text, std::string_view source) {
  try {
    Json j = Json::parse(text.begin(), text.end());
    if (!j.is_object()) throw ConfigError(fmt::format("{}: top level must be a JSON object", source));
    return j;
  } catch (const Json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
}

ConfigObject::ConfigObject(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {
  if (!j.is_object()) throw ConfigError(fmt::format("'{}' must be a JSON object", path_));
}

std::string ConfigObject::key_path(std::string_view key) const {
  return path_.empty() ? std::string(key) : fmt::format("{}.{}", path_, key);
}

void ConfigObject::allow_only(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [key, value] : j_->items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(fmt::format("unknown key '{}'", key_path(key)));
    }
  }
}

bool ConfigObject::has(std::string_view key) const {
  return j_->contains(std::string(key)) && !j_->at(std::string(key)).is_null();
}

const Json& ConfigObject::at(std::string_view key) const { return j_->at(std::string(key)); }

double ConfigObject::number(std::string_view key) const {
  if (!has(key)) throw ConfigError(fmt::format("missing required key '{}'", key_path(key)));
  const Json& v = at(key);
  if (!v.is_number()) throw ConfigError(fmt::format("key '{}': expected a number", key_path(key)));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(fmt::format("key '{}': not finite", key_path(key)));
  return d;
}

double ConfigObject::number(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::optional<double> ConfigObject::optional_number(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

int ConfigObject::integer(std::string_view key, int fallback) const {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(fmt::format("key '{}': expected an integer", key_path(key)));
  }
  return v.get<int>();
}

bool ConfigObject::boolean(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_boolean()) throw ConfigError(fmt::format("key '{}': expected true or false", key_path(key)));
  return v.get<bool>();
}

std::string ConfigObject::string(std::string_view key, std::string fallback) const {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_string()) throw ConfigError(fmt::format("key '{}': expected a string", key_path(key)));
  return v.get<std::string>();
}

std::vector<double> ConfigObject::number_list(std::string_view key) const {
  if (!has(key)) throw ConfigError(fmt::format("missing required key '{}'", key_path(key)));
  const Json& v = at(key);
  if (v.is_number()) return {number(key)};
  if (!v.is_array() || v.empty()) {
    throw ConfigError(fmt::format("key '{}': expected a number or a non-empty array", key_path(key)));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ConfigError(fmt::format("key '{}[{}]': expected a number", key_path(key), i));
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

ConfigObject ConfigObject::object(std::string_view key) const {
  if (!has(key)) return ConfigObject(empty_object(), key_path(key));
  return ConfigObject(at(key), key_path(key));
}

}  // namespace scissortruss::cli
