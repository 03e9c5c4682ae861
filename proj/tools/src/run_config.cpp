#include "pwvcast/run_config.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "pwvcast/errors.hpp"

namespace pwvcast::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const SettingSpec* find_spec(const std::string& key) {
  for (const auto& spec : setting_specs()) {
    if (spec.key == key) return &spec;
  }
  return nullptr;
}

double to_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || p != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("--" + key + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || p != text.data() + text.size()) {
    throw ConfigError("--" + key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::size_t to_positive(const std::string& key, const std::string& text) {
  const auto v = to_uint(key, text);
  if (v == 0) throw ConfigError("--" + key + " must be at least 1");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("--" + key + ": expected true or false, got '" + text + "'");
}

std::vector<std::size_t> to_arch(const std::string& text) {
  std::vector<std::size_t> arch;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) arch.push_back(to_positive("arch", trim(item)));
  if (arch.empty()) throw ConfigError("--arch: expected comma-separated hidden sizes, e.g. 64 or 32,16");
  return arch;
}

}  // namespace

const std::vector<SettingSpec>& setting_specs() {
  static const std::vector<SettingSpec> specs = {
      {"input", std::nullopt, false, "input CSV (timestamp,value)"},
      {"kind", "pwv", false, "input series kind: zwd or pwv (convert defaults to zwd)"},
      {"lat", std::nullopt, false, "station latitude in degrees (required for ZWD input)"},
      {"height", std::nullopt, false, "station height in meters (required for ZWD input)"},
      {"station-id", "", false, "free-form station label"},
      {"seed", "0", false, "seed for initialization, shuffling and gradcheck data"},
      {"out", std::nullopt, false, "output path"},
      {"epochs", "150", false, "training epochs"},
      {"batch", "32", false, "mini-batch size"},
      {"arch", "64", false, "comma-separated LSTM hidden sizes"},
      {"delta", "1.0", false, "Huber loss threshold"},
      {"normalize", "false", true, "standardize inputs with training-set mean/stddev"},
      {"bias", std::nullopt, false, "constant added to every prediction after training (mm)"},
      {"estimate-bias", "false", true, "estimate the bias on the training windows instead of --bias"},
      {"purge", "false", true, "drop the test windows whose inputs overlap the training labels"},
      {"clip-norm", std::nullopt, false, "clip batch gradients to this global L2 norm"},
      {"train-fraction", "0.8", false, "fraction of windows (in time order) used for training"},
      {"loss-out", std::nullopt, false, "loss history CSV (default: <out>.loss.csv)"},
      {"model", std::nullopt, false, "model file"},
      {"leads", "12", false, "number of 5-minute lead steps to evaluate"},
      {"steps", "1", false, "number of 5-minute steps to forecast"},
      {"hidden", "8", false, "hidden size of the gradcheck model"},
      {"corrupt", "false", true, "corrupt the analytic gradient (gradcheck self-test)"},
  };
  return specs;
}

RawSettings parse_config_file(std::istream& in) {
  RawSettings settings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (find_spec(key) == nullptr) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    settings[key] = value;
  }
  return settings;
}

RunConfig resolve_config(const std::string& command, const RawSettings& file_settings,
                         const RawSettings& flag_settings) {
  RunConfig cfg;
  cfg.command = command;
  for (const auto& spec : setting_specs()) {
    if (spec.default_value) cfg.resolved[spec.key] = *spec.default_value;
  }
  if (command == "convert") cfg.resolved["kind"] = "zwd";
  for (const auto& [k, v] : file_settings) cfg.resolved[k] = v;
  for (const auto& [k, v] : flag_settings) cfg.resolved[k] = v;

  const auto& r = cfg.resolved;
  auto get = [&r](const std::string& key) -> std::optional<std::string> {
    auto it = r.find(key);
    if (it == r.end()) return std::nullopt;
    return it->second;
  };

  if (auto v = get("input")) cfg.input = *v;
  if (auto v = get("out")) cfg.out = *v;
  if (auto v = get("model")) cfg.model = *v;
  if (auto v = get("loss-out")) cfg.loss_out = *v;
  cfg.kind = parse_series_kind(*get("kind"));
  if (auto v = get("lat")) cfg.latitude_deg = to_real("lat", *v);
  if (auto v = get("height")) cfg.height_m = to_real("height", *v);
  cfg.station_id = *get("station-id");
  cfg.seed = to_uint("seed", *get("seed"));
  cfg.epochs = to_positive("epochs", *get("epochs"));
  cfg.batch = to_positive("batch", *get("batch"));
  cfg.arch = to_arch(*get("arch"));
  cfg.delta = to_real("delta", *get("delta"));
  if (!(cfg.delta > 0.0)) throw ConfigError("--delta must be positive");
  cfg.normalize = to_bool("normalize", *get("normalize"));
  if (auto v = get("bias")) cfg.bias_mm = to_real("bias", *v);
  cfg.estimate_bias = to_bool("estimate-bias", *get("estimate-bias"));
  if (cfg.bias_mm && cfg.estimate_bias) throw ConfigError("--bias and --estimate-bias are exclusive");
  cfg.purge = to_bool("purge", *get("purge"));
  if (auto v = get("clip-norm")) {
    cfg.clip_norm = to_real("clip-norm", *v);
    if (!(*cfg.clip_norm > 0.0)) throw ConfigError("--clip-norm must be positive");
  }
  cfg.train_fraction = to_real("train-fraction", *get("train-fraction"));
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw ConfigError("--train-fraction must lie in (0, 1)");
  }
  cfg.leads = to_positive("leads", *get("leads"));
  cfg.steps = to_positive("steps", *get("steps"));
  cfg.hidden = to_positive("hidden", *get("hidden"));
  cfg.corrupt = to_bool("corrupt", *get("corrupt"));
  return cfg;
}

std::optional<StationMeta> RunConfig::station() const {
  if (kind != SeriesKind::kZwd) {
    if (latitude_deg && height_m) return StationMeta(*latitude_deg, *height_m, station_id);
    return std::nullopt;
  }
  if (!latitude_deg) throw ConfigError("ZWD input requires --lat (station latitude in degrees)");
  if (!height_m) throw ConfigError("ZWD input requires --height (station height in meters)");
  return StationMeta(*latitude_deg, *height_m, station_id);
}

TrainConfig RunConfig::train_config() const {
  TrainConfig tc;
  tc.epochs = epochs;
  tc.batch_size = batch;
  tc.huber_delta = delta;
  tc.seed = seed;
  tc.normalize = normalize;
  tc.clip_norm = clip_norm;
  return tc;
}

const std::filesystem::path& RunConfig::require_path(const std::optional<std::filesystem::path>& p,
                                                     const std::string& flag) const {
  if (!p || p->empty()) throw ConfigError(command + " requires --" + flag);
  return *p;
}

void dump_config(const RunConfig& config, std::ostream& out) {
  out << "# resolved settings for '" << config.command << "'\n";
  for (const auto& spec : setting_specs()) {
    auto it = config.resolved.find(spec.key);
    if (it == config.resolved.end()) {
      out << "# " << spec.key << " is unset\n";
    } else {
      out << spec.key << " = " << it->second << '\n';
    }
  }
}

}  // namespace pwvcast::cli
