#pragma once

#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace scissortruss::cli {

using Json = nlohmann::json;

/// Malformed or incomplete configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses JSON text; syntax errors carry the line and column.
Json parse_config(std::string_view text, std::string_view source);

/// Typed view over one JSON object that names the offending key on error.
class ConfigObject {
 public:
  ConfigObject(const Json& j, std::string path);

  /// Throws ConfigError for keys outside `allowed`.
  void allow_only(std::initializer_list<std::string_view> allowed) const;

  bool has(std::string_view key) const;
  double number(std::string_view key) const;
  double number(std::string_view key, double fallback) const;
  std::optional<double> optional_number(std::string_view key) const;
  int integer(std::string_view key, int fallback) const;
  bool boolean(std::string_view key, bool fallback) const;
  std::string string(std::string_view key, std::string fallback) const;
  std::vector<double> number_list(std::string_view key) const;  // scalar or array
  ConfigObject object(std::string_view key) const;  // {} when absent

  const Json& raw() const { return *j_; }
  std::string key_path(std::string_view key) const;

 private:
  const Json& at(std::string_view key) const;

  const Json* j_;
  std::string path_;
};

}  // namespace scissortruss::cli
