#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "pwvcast/evaluation.hpp"
#include "pwvcast/gradient_check.hpp"
#include "pwvcast/run_config.hpp"
#include "pwvcast/time_series.hpp"

namespace pwvcast::cli {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitCheckFailed = 2 };

// Entry point of the `pwvcast` executable: subcommands convert, train,
// evaluate, forecast and gradcheck.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Each command is a thin wrapper over the library and throws pwvcast::Error
// on failure; run() maps exceptions to exit codes.
int cmd_convert(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_forecast(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Shared pipeline steps, exposed so tests can compare against the commands.
TimeSeries load_series(const RunConfig& cfg);
SplitSet split_series(const RunConfig& cfg, const TimeSeries& series);

// The evaluate pipeline with an arbitrary model-side forecaster.
LeadTimeReport evaluate_with(const RunConfig& cfg, const IterativeForecaster& forecaster,
                             std::ostream& out, std::ostream& err);

// Deterministic gradcheck inputs derived from the seed.
struct GradcheckFixture {
  LstmModel model;
  std::vector<double> window;
  double target = 0.0;
};
GradcheckFixture make_gradcheck_fixture(std::uint64_t seed, std::size_t hidden,
                                        std::size_t window_width = 48);
// Analytic gradient with one entry of the first input-gate matrix perturbed.
ParameterSet corrupted_gradient(const LstmModel& model, std::span<const double> window, double target,
                                double delta);

inline constexpr double kGradcheckThreshold = 1e-4;

}  // namespace pwvcast::cli
