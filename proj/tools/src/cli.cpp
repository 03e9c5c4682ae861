#include "pwvcast/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <random>
#include <vector>

#include "pwvcast/errors.hpp"
#include "pwvcast/forecast.hpp"
#include "pwvcast/model_io.hpp"
#include "pwvcast/pwv_convert.hpp"
#include "pwvcast/training.hpp"
#include "pwvcast/windows.hpp"

namespace pwvcast::cli {

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Removes the listed files unless disarmed; used so a failed command leaves
// no partial outputs behind.
class OutputGuard {
 public:
  void track(const std::filesystem::path& p) { paths_.push_back(p); }
  void commit() { paths_.clear(); }
  ~OutputGuard() {
    for (const auto& p : paths_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }

 private:
  std::vector<std::filesystem::path> paths_;
};

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

std::filesystem::path loss_path(const RunConfig& cfg, const std::filesystem::path& model_out) {
  if (cfg.loss_out) return *cfg.loss_out;
  std::filesystem::path p = model_out;
  p += ".loss.csv";
  return p;
}

void write_loss_history(const std::vector<double>& losses, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) out << e << ',' << format_double(losses[e]) << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void print_summary(const LeadTimeReport& report, std::ostream& out) {
  out << "RMSE (mm) by lead time\n";
  out << "lead      samples    model      naive      average\n";
  char line[128];
  for (const auto& row : report.rows) {
    if (row.lead_steps > 3) break;
    std::snprintf(line, sizeof line, "%3zu min  %8zu  %9.4f  %9.4f  %9.4f\n", row.lead_minutes,
                  row.sample_count, row.model_rmse_mm, row.naive_rmse_mm, row.average_rmse_mm);
    out << line;
  }
}

}  // namespace

TimeSeries load_series(const RunConfig& cfg) {
  const auto& input = cfg.require_path(cfg.input, "input");
  return ingest_csv(input, cfg.kind, cfg.station());
}

SplitSet split_series(const RunConfig& cfg, const TimeSeries& series) {
  const WindowSet windows = make_windows(series, kWindowWidth);
  if (windows.empty()) {
    throw DomainError("input has no gap-free run of " + std::to_string(kWindowWidth + 1) +
                      " consecutive samples; no windows");
  }
  return chrono_split(windows, cfg.train_fraction, cfg.purge);
}

int cmd_convert(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.kind != SeriesKind::kZwd) throw ConfigError("convert expects --kind zwd input");
  const auto& out_path = cfg.require_path(cfg.out, "out");
  const TimeSeries pwv = load_series(cfg);
  OutputGuard guard;
  guard.track(out_path);
  write_csv(pwv, out_path);
  guard.commit();
  out << "wrote " << pwv.present_count() << " PWV samples to " << out_path.string() << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& model_out = cfg.require_path(cfg.out, "out");
  const TimeSeries series = load_series(cfg);
  const SplitSet split = split_series(cfg, series);
  print_warnings(split.warnings, err);

  TrainConfig tc = cfg.train_config();
  tc.on_epoch = [&err, &cfg](std::size_t epoch, double loss) {
    err << "epoch " << (epoch + 1) << '/' << cfg.epochs << " loss " << format_double(loss) << '\n';
  };
  TrainResult result = train(split, tc, cfg.arch);

  LstmModel model = std::move(result.model);
  if (cfg.bias_mm) {
    model = apply_bias_correction(model, *cfg.bias_mm);
  } else if (cfg.estimate_bias) {
    const double beta = estimate_bias(model, split.train);
    err << "estimated bias " << format_double(beta) << " mm on training windows\n";
    model = apply_bias_correction(model, beta);
  }

  const auto history = loss_path(cfg, model_out);
  OutputGuard guard;
  guard.track(model_out);
  guard.track(history);
  save_model(model, model_out);
  write_loss_history(result.epoch_losses, history);
  guard.commit();
  out << "trained on " << split.train.size() << " windows (" << split.test.size()
      << " held out); model written to " << model_out.string() << '\n';
  return kExitOk;
}

LeadTimeReport evaluate_with(const RunConfig& cfg, const IterativeForecaster& forecaster,
                             std::ostream& out, std::ostream& err) {
  const auto& report_out = cfg.require_path(cfg.out, "out");
  const TimeSeries series = load_series(cfg);
  const SplitSet split = split_series(cfg, series);
  print_warnings(split.warnings, err);
  if (split.test.empty()) throw DomainError("test split is empty; nothing to evaluate");

  LeadTimeReport report = lead_time_sweep(forecaster, split.test, series, cfg.leads);
  print_warnings(report.warnings, err);
  OutputGuard guard;
  guard.track(report_out);
  write_report(report, report_out);
  guard.commit();
  print_summary(report, out);
  return report;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LstmModel model = load_model(cfg.require_path(cfg.model, "model"));
  if (model.window_width != kWindowWidth) {
    throw ShapeError("model window width " + std::to_string(model.window_width) + " differs from " +
                     std::to_string(kWindowWidth));
  }
  evaluate_with(
      cfg, [&model](const Window& w, std::size_t k) { return predict_iterative(model, w.inputs, k); },
      out, err);
  return kExitOk;
}

int cmd_forecast(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const LstmModel model = load_model(cfg.require_path(cfg.model, "model"));
  const TimeSeries series = load_series(cfg);
  std::size_t trailing = 0;
  while (trailing < series.size() && series[series.size() - 1 - trailing]) ++trailing;
  if (trailing < model.window_width) {
    throw DomainError("input ends with only " + std::to_string(trailing) +
                      " gap-free samples; forecasting needs " + std::to_string(model.window_width));
  }
  std::vector<double> window;
  for (std::size_t i = series.size() - model.window_width; i < series.size(); ++i) window.push_back(*series[i]);

  const std::vector<double> predictions = predict_iterative(model, window, cfg.steps);
  const std::int64_t last_epoch = series.epoch_at(series.size() - 1);
  std::vector<std::optional<double>> samples(predictions.begin(), predictions.end());
  const TimeSeries future(last_epoch + series.cadence_s(), std::move(samples), series.cadence_s());

  if (cfg.out) {
    OutputGuard guard;
    guard.track(*cfg.out);
    write_csv(future, *cfg.out);
    guard.commit();
  }
  write_csv(future, out);
  return kExitOk;
}

GradcheckFixture make_gradcheck_fixture(std::uint64_t seed, std::size_t hidden, std::size_t window_width) {
  const std::vector<std::size_t> arch{hidden};
  GradcheckFixture fx{init_model(arch, seed, window_width), {}, 0.0};
  std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ULL);
  fx.window.resize(window_width);
  for (double& x : fx.window) x = 2.0 * unit_uniform(rng) - 1.0;
  fx.target = 2.0 * unit_uniform(rng) - 1.0;
  // Non-zero head bias so no gradient path is trivially zero.
  fx.model.params.head.b = 0.1 * (2.0 * unit_uniform(rng) - 1.0);
  return fx;
}

ParameterSet corrupted_gradient(const LstmModel& model, std::span<const double> window, double target,
                                double delta) {
  ParameterSet g = analytic_gradient(model, window, target, delta);
  double& entry = g.layers.front().W[kInputGate](0, 0);
  entry = entry * 1.5 + 1e-3;
  return g;
}

int cmd_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const GradcheckFixture fx = make_gradcheck_fixture(cfg.seed, cfg.hidden);
  const GradientFn fn = cfg.corrupt ? GradientFn(corrupted_gradient) : GradientFn(analytic_gradient);
  const GradientCheckResult r = gradient_check(fx.model, fx.window, fx.target, cfg.delta, 1e-5, fn);
  out << "max relative error " << format_double(r.max_relative_error) << " over "
      << r.parameters_checked << " parameters (worst " << r.worst_tensor << ")\n";
  if (r.max_relative_error < kGradcheckThreshold) {
    out << "gradient check passed (threshold " << kGradcheckThreshold << ")\n";
    return kExitOk;
  }
  out << "gradient check FAILED (threshold " << kGradcheckThreshold << ")\n";
  return kExitCheckFailed;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GPS PWV forecasting with an LSTM: convert, train, evaluate, forecast, gradcheck"};
  app.require_subcommand(1, 1);

  RawSettings flags;
  std::string config_path;
  bool print_config = false;

  struct Command {
    std::string name;
    std::string help;
    std::vector<std::string> keys;
    int (*fn)(const RunConfig&, std::ostream&, std::ostream&);
  };
  const std::vector<std::string> shared{"input", "kind", "lat", "height", "station-id", "seed", "out"};
  auto with_shared = [&shared](std::vector<std::string> extra) {
    extra.insert(extra.begin(), shared.begin(), shared.end());
    return extra;
  };
  const std::vector<std::string> split_keys{"train-fraction", "purge"};
  auto join = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const std::vector<Command> commands = {
      {"convert", "convert a ZWD CSV to a PWV CSV", with_shared({}), &cmd_convert},
      {"train", "train an LSTM on the first part of a PWV series",
       join(with_shared({"epochs", "batch", "arch", "delta", "normalize", "bias", "estimate-bias",
                         "clip-norm", "loss-out"}),
            split_keys),
       &cmd_train},
      {"evaluate", "RMSE per lead time for model, naive and average methods on the test split",
       join(with_shared({"model", "leads"}), split_keys), &cmd_evaluate},
      {"forecast", "iterative forecast from the trailing 48 samples of a series",
       with_shared({"model", "steps"}), &cmd_forecast},
      {"gradcheck", "compare backpropagation with finite differences on a seeded model",
       with_shared({"hidden", "delta", "corrupt"}), &cmd_gradcheck},
  };

  std::vector<CLI::App*> subs;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "key = value settings file (flags override it)");
    sub->add_flag("--print-config", print_config, "print the resolved settings and exit");
    for (const auto& key : cmd.keys) {
      const SettingSpec* spec = nullptr;
      for (const auto& s : setting_specs()) {
        if (s.key == key) spec = &s;
      }
      std::string help = spec->help;
      if (spec->default_value && !spec->default_value->empty()) help += " [" + *spec->default_value + "]";
      if (spec->is_switch) {
        sub->add_flag_callback("--" + key, [&flags, key] { flags[key] = "true"; }, help);
      } else {
        sub->add_option_function<std::string>(
            "--" + key, [&flags, key](const std::string& v) { flags[key] = v; }, help);
      }
    }
    subs.push_back(sub);
  }

  std::vector<const char*> argv;
  argv.push_back("pwvcast");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand help requests also arrive here.
    if (e.get_exit_code() == 0) {
      for (auto* sub : subs) {
        if (sub->parsed()) {
          out << sub->help();
          return kExitOk;
        }
      }
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitError;
  }

  for (std::size_t c = 0; c < commands.size(); ++c) {
    if (!subs[c]->parsed()) continue;
    try {
      RawSettings file_settings;
      if (!config_path.empty()) {
        std::ifstream cf(config_path);
        if (!cf) throw IoError("cannot open config file " + config_path);
        file_settings = parse_config_file(cf);
      }
      const RunConfig cfg = resolve_config(commands[c].name, file_settings, flags);
      if (print_config) {
        dump_config(cfg, out);
        return kExitOk;
      }
      return commands[c].fn(cfg, out, err);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitError;
    }
  }
  err << "error: no subcommand given\n";
  return kExitError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace pwvcast::cli
