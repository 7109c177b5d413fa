#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scissortruss/dynamics.hpp"
#include "scissortruss/materials.hpp"

namespace scissortruss {

/// File could not be read or written, or its contents are not a valid table.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws IoError when absent.
  std::size_t column(std::string_view name) const;
};

/// RFC 4180 style: comma separated, double-quoted fields may hold commas,
/// quotes ("") and newlines. The first record is the header. Every row must
/// have as many fields as the header.
CsvTable parse_csv(std::string_view text);
std::string to_csv(const CsvTable& table);

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// Six significant digits, the precision used for every emitted CSV.
std::string csv_number(double value);

/// Parses a full-string decimal number; std::nullopt for anything else.
std::optional<double> parse_number(std::string_view text);

std::vector<MaterialRecord> load_materials(const std::filesystem::path& path);

/// Aperture rows keep the label and natural-frequency text verbatim.
std::vector<FrequencyReference> load_frequency_references(const std::filesystem::path& path);
std::vector<FrequencyReference> load_antenna_references(const std::filesystem::path& path);

struct DeploymentTimeRecord {
  std::string mechanism;
  double aperture = 0.0;
  int unit_count = 0;
  std::optional<double> intermediate_s;
  std::optional<double> complete_deployed_s;
  std::optional<double> complete_cycle_s;
};

std::vector<DeploymentTimeRecord> load_deployment_times(const std::filesystem::path& path);

}  // namespace scissortruss
