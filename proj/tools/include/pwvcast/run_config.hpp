#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwvcast/pwv_convert.hpp"
#include "pwvcast/time_series.hpp"
#include "pwvcast/training.hpp"

namespace pwvcast::cli {

struct SettingSpec {
  std::string key;                            // flag name without "--", also the config-file key
  std::optional<std::string> default_value;   // nullopt: unset unless given
  bool is_switch = false;                     // boolean flag taking no value on the command line
  std::string help;
};

// Every setting the CLI understands, in dump order.
const std::vector<SettingSpec>& setting_specs();

using RawSettings = std::map<std::string, std::string>;

// `key = value` lines; `#` starts a comment; blank lines ignored. Unknown keys
// and malformed lines throw ConfigError naming the line.
RawSettings parse_config_file(std::istream& in);

// Fully resolved settings for one run: defaults, then the config file, then flags.
struct RunConfig {
  std::string command;
  RawSettings resolved;  // every set key, after layering

  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> loss_out;
  SeriesKind kind = SeriesKind::kPwv;
  std::optional<double> latitude_deg;
  std::optional<double> height_m;
  std::string station_id;
  std::uint64_t seed = 0;
  std::size_t epochs = 150;
  std::size_t batch = 32;
  std::vector<std::size_t> arch{64};
  double delta = 1.0;
  bool normalize = false;
  std::optional<double> bias_mm;
  bool estimate_bias = false;
  bool purge = false;
  std::optional<double> clip_norm;
  double train_fraction = 0.8;
  std::size_t leads = 12;
  std::size_t steps = 1;
  std::size_t hidden = 8;
  bool corrupt = false;

  // Station for ZWD input; throws ConfigError naming --lat / --height when absent.
  std::optional<StationMeta> station() const;
  TrainConfig train_config() const;
  // Throws ConfigError naming the flag when a required path is missing.
  const std::filesystem::path& require_path(const std::optional<std::filesystem::path>& p,
                                            const std::string& flag) const;
};

// Throws ConfigError on unparseable values.
RunConfig resolve_config(const std::string& command, const RawSettings& file_settings,
                         const RawSettings& flag_settings);

// The resolved settings as a loadable config file; unset keys appear as comments.
void dump_config(const RunConfig& config, std::ostream& out);

}  // namespace pwvcast::cli
