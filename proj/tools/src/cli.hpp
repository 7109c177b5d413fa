#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"

namespace scissortruss::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitIo = 4;

/// Requested design cannot meet its constraints. Maps to exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

struct RunContext {
  std::filesystem::path out_dir;
  std::filesystem::path data_dir;
  std::filesystem::path config_dir;  // base for relative paths inside the config
  std::optional<std::uint64_t> seed;
};

struct ReportBundle {
  std::vector<std::filesystem::path> paths;
  std::string summary;
  std::vector<std::string> warnings;
};

/// SCISSORTRUSS_DATA when set, otherwise the data directory of the source tree.
std::filesystem::path default_data_dir();

ReportBundle cmd_design(const Json& config, const RunContext& ctx);
ReportBundle cmd_analyze(const Json& config, const RunContext& ctx);
ReportBundle cmd_material(const Json& config, const RunContext& ctx);
ReportBundle cmd_optimize(const Json& config, const RunContext& ctx);

/// Loads the config, dispatches and maps failures to exit codes. The summary
/// goes to `out` unless quiet; diagnostics and warnings go to `err`.
int run(const RunConfig& rc, std::ostream& out, std::ostream& err);

}  // namespace scissortruss::cli
