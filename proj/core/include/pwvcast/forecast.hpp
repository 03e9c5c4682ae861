#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pwvcast/lstm.hpp"
#include "pwvcast/windows.hpp"

namespace pwvcast {

// One 5-minute step ahead.
double predict_one(const LstmModel& model, std::span<const double> window);

// Feeds each prediction back as the newest input: step 1 is predict_one on
// the window, step j shifts the window left by one and appends prediction
// j - 1. Feedback runs in millimeters regardless of normalization.
std::vector<double> predict_iterative(const LstmModel& model, std::span<const double> window,
                                      std::size_t lead_steps);

// Copy of model with every prediction shifted by beta_mm. The shift is folded
// into the dense bias (divided by the output stddev when normalization is on).
LstmModel apply_bias_correction(const LstmModel& model, double beta_mm);

// -mean(prediction - label) over the windows.
double estimate_bias(const LstmModel& model, const WindowSet& validation);

// Persistence: every entry is the last window value.
std::vector<double> naive_forecast(std::span<const double> window, std::size_t lead_steps);
// Every entry is the arithmetic mean of the window.
std::vector<double> average_forecast(std::span<const double> window, std::size_t lead_steps);

enum class ForecastMethod { kModel, kNaive, kAverage };

class Predictor {
 public:
  static Predictor model(std::shared_ptr<const LstmModel> model);
  static Predictor naive();
  static Predictor average();

  ForecastMethod method() const noexcept { return method_; }
  // Requires window.size() == model window width for the model-backed kind.
  std::vector<double> forecast(std::span<const double> window, std::size_t lead_steps) const;

 private:
  Predictor(ForecastMethod method, std::shared_ptr<const LstmModel> model)
      : method_(method), model_(std::move(model)) {}

  ForecastMethod method_;
  std::shared_ptr<const LstmModel> model_;
};

}  // namespace pwvcast
