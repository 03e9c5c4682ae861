#include "pwvcast/forecast.hpp"

#include <cmath>
#include <string>

#include "pwvcast/errors.hpp"

namespace pwvcast {

namespace {

void require_lead(std::size_t lead_steps) {
  if (lead_steps == 0) throw DomainError("lead steps must be at least 1");
}

void require_window(std::span<const double> window) {
  if (window.empty()) throw DomainError("forecast window is empty");
}

}  // namespace

double predict_one(const LstmModel& model, std::span<const double> window) {
  return model_predict(model, window);
}

std::vector<double> predict_iterative(const LstmModel& model, std::span<const double> window,
                                      std::size_t lead_steps) {
  require_lead(lead_steps);
  std::vector<double> buffer(window.begin(), window.end());
  std::vector<double> out;
  out.reserve(lead_steps);
  for (std::size_t step = 0; step < lead_steps; ++step) {
    const double next = predict_one(model, buffer);
    out.push_back(next);
    if (step + 1 == lead_steps) break;
    buffer.erase(buffer.begin());
    buffer.push_back(next);
  }
  return out;
}

LstmModel apply_bias_correction(const LstmModel& model, double beta_mm) {
  if (!std::isfinite(beta_mm)) throw DomainError("bias correction must be finite");
  LstmModel corrected = model;
  if (beta_mm == 0.0) return corrected;
  const double shift = model.normalization ? beta_mm / model.normalization->stddev : beta_mm;
  corrected.params.head.b = model.params.head.b + shift;
  return corrected;
}

double estimate_bias(const LstmModel& model, const WindowSet& validation) {
  if (validation.empty()) throw DomainError("cannot estimate bias on an empty window set");
  double residual = 0.0;
  for (const auto& w : validation.windows) residual += predict_one(model, w.inputs) - w.label;
  return -residual / static_cast<double>(validation.size());
}

std::vector<double> naive_forecast(std::span<const double> window, std::size_t lead_steps) {
  require_window(window);
  require_lead(lead_steps);
  return std::vector<double>(lead_steps, window.back());
}

std::vector<double> average_forecast(std::span<const double> window, std::size_t lead_steps) {
  require_window(window);
  require_lead(lead_steps);
  double sum = 0.0;
  for (double x : window) sum += x;
  return std::vector<double>(lead_steps, sum / static_cast<double>(window.size()));
}

Predictor Predictor::model(std::shared_ptr<const LstmModel> model) {
  if (!model) throw ConfigError("model-backed predictor needs a model");
  return Predictor(ForecastMethod::kModel, std::move(model));
}

Predictor Predictor::naive() { return Predictor(ForecastMethod::kNaive, nullptr); }
Predictor Predictor::average() { return Predictor(ForecastMethod::kAverage, nullptr); }

std::vector<double> Predictor::forecast(std::span<const double> window, std::size_t lead_steps) const {
  switch (method_) {
    case ForecastMethod::kModel:
      if (window.size() != model_->window_width) {
        throw ShapeError("window has " + std::to_string(window.size()) + " values, model expects " +
                         std::to_string(model_->window_width));
      }
      return predict_iterative(*model_, window, lead_steps);
    case ForecastMethod::kNaive:
      return naive_forecast(window, lead_steps);
    case ForecastMethod::kAverage:
      return average_forecast(window, lead_steps);
  }
  throw ContractError("unknown forecast method");
}

}  // namespace pwvcast
